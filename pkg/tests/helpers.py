"""Shared program builders for the test suite.

Everything here is host-side construction of Instruction tuples; the tests
then run the encoded programs through the machine proper.
"""

from __future__ import annotations

from typing import Sequence

from fanlab.machine import Decjz, Halt, Inc, Instruction, Jmp, Program, Query
from fanlab.trees import Bits, bits_to_code


def max_slice_probe_program() -> Program:
    """On input x, query pair(max(x, 1), 0) and return the answer bit.

    pair(k, 0) is the k-th triangle number, so the program first clamps r0
    to max(x, 1), then folds it into r1 = triangle(r0) with a copy loop.
    """
    return (
        Decjz(0, 3),   # x == 0 -> clamp to 1
        Inc(0),        # undo the decrement
        Jmp(4),
        Inc(0),
        # r1 += v for v = r0 down to 1 (copy r0 through r2 each round)
        Decjz(0, 14),
        Inc(1),
        Decjz(0, 10),
        Inc(1),
        Inc(2),
        Jmp(6),
        Decjz(2, 13),
        Inc(0),
        Jmp(10),
        Jmp(4),
        Query(1, 0),
        Halt(),
    )


def load_constant_block(value: int, base: int) -> list[Instruction]:
    """Instructions at offset `base` that set r0 = value, assuming r0 = 0.

    Builds the value MSB first by repeated doubling through r1, so the block
    stays logarithmic in size (a plain run of INCs would make six-figure
    programs whose codes are megabits long).  Runs in about 5*value steps.
    """
    block: list[Instruction] = []
    first = True
    for ch in format(value, "b") if value else "0":
        if not first:
            at = base + len(block)
            block.extend([
                Decjz(0, at + 4),  # r0 drains, r1 gains double
                Inc(1),
                Inc(1),
                Jmp(at),
                Decjz(1, at + 7),  # r1 drains back into r0
                Inc(0),
                Jmp(at + 4),
            ])
        if ch == "1":
            block.append(Inc(0))
        first = False
    return block


def branch_program(prefix_codes: Sequence[int]) -> Program:
    """On input m < len(prefix_codes), return prefix_codes[m]; else 0.

    A DECJZ chain drains the input while dispatching to per-m constant
    blocks.  Used to realize branch programs from explicit per-length
    outputs, including deliberately broken ones.
    """
    chain_len = len(prefix_codes) + 1  # one DECJZ per m, then HALT
    blocks: list[list[Instruction]] = []
    offsets: list[int] = []
    at = chain_len
    for code in prefix_codes:
        offsets.append(at)
        block = load_constant_block(code, at) + [Halt()]
        blocks.append(block)
        at += len(block)
    prog: list[Instruction] = [Decjz(0, off) for off in offsets]
    prog.append(Halt())
    for block in blocks:
        prog.extend(block)
    return tuple(prog)


def pattern_prefix_codes(pattern: Sequence[int], depth: int) -> list[int]:
    """Codes of the pattern's prefixes, lengths 0 through depth."""
    bits = tuple(pattern[i % len(pattern)] for i in range(depth))
    return [bits_to_code(bits[:m]) for m in range(depth + 1)]


def pattern_bits(pattern: Sequence[int], length: int) -> Bits:
    return tuple(pattern[i % len(pattern)] for i in range(length))


def all_nodes(max_len: int, max_entry: int) -> list[tuple[int, ...]]:
    """Every node of length <= max_len with entries <= max_entry."""
    out: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(max_len):
        frontier = [n + (i,) for n in frontier for i in range(max_entry + 1)]
        out.extend(frontier)
    return out
