"""Decidable binary trees, diagonal construction, censuses, and witnesses.

Finite 0/1 sequences are coded as pair(length, value) with bit j of value
holding position j.  A decidable tree is presented by a total membership
test; the workbench builds them from native predicates or from decider
programs run over an oracle.  The central construction is the diagonal
(Kleene-style) tree: a sequence b of length n survives iff no index e < n
has a self-application that settles within n steps to a value agreeing with
b at position e.  Survival only ever depends on runs that already settled,
so the tree is prefix-closed and every level is inhabited by the sequence
that dodges each settled run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator

from .machine import (
    BLOCK_ALL,
    Blocked,
    Converged,
    DeciderPartial,
    Oracle,
    pair,
    run,
    run_decider,
    unpair,
)

Bits = tuple[int, ...]


# ---------------------------------------------------------------------------
# Sequence coding

def bits_to_code(bits: Bits) -> int:
    value = 0
    for j, b in enumerate(bits):
        if b:
            value |= 1 << j
    return pair(len(bits), value)


def code_to_bits(code: int) -> Bits:
    n, value = unpair(code)
    return tuple((value >> j) & 1 for j in range(n))


def is_canonical_bits_code(code: int) -> bool:
    n, value = unpair(code)
    return value < (1 << n)


def format_bits(bits: Bits) -> str:
    return "".join(str(b) for b in bits) if bits else "-"


def parse_bits(text: str) -> Bits:
    text = text.strip()
    if text == "-":
        return ()
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"not a 0/1 sequence: {text!r}")
    return tuple(int(c) for c in text)


# ---------------------------------------------------------------------------
# Trees

@dataclass(frozen=True)
class DecidableTree:
    membership: Callable[[Bits], bool]
    label: str = "tree"

    def contains(self, bits) -> bool:
        return bool(self.membership(tuple(bits)))

    @staticmethod
    def from_predicate(fn: Callable[[Bits], bool], label: str = "tree") -> "DecidableTree":
        return DecidableTree(fn, label)

    @staticmethod
    def from_program(code: int, oracle: Oracle = BLOCK_ALL, fuel: int = 100_000,
                     label: str = "decider") -> "DecidableTree":
        def member(bits: Bits) -> bool:
            return run_decider(code, bits_to_code(bits), oracle, fuel) != 0

        return DecidableTree(member, label)


def full_tree() -> DecidableTree:
    return DecidableTree(lambda bits: True, "full")


def zeros_tree() -> DecidableTree:
    return DecidableTree(lambda bits: all(b == 0 for b in bits), "zeros")


def at_most_ones_tree(k: int) -> DecidableTree:
    return DecidableTree(lambda bits: sum(bits) <= k, f"at-most-{k}-ones")


# ---------------------------------------------------------------------------
# Diagonal tree

class _SelfRunTable:
    """Cached bounded self-applications, one oracle per table.

    Sound to cache because runs are deterministic and a run that settles
    (converges or blocks) at step s looks the same under every budget >= s.
    """

    def __init__(self, oracle: Oracle):
        self._oracle = oracle
        self._settled: dict[int, tuple[str, int, int]] = {}  # e -> kind, steps, value
        self._probed: dict[int, int] = {}  # e -> largest budget that ran dry

    def value_within(self, e: int, fuel: int) -> int | None:
        """Converged value of running e on itself within `fuel` steps, else None."""
        hit = self._settled.get(e)
        if hit is not None:
            kind, steps, value = hit
            return value if kind == "converged" and steps <= fuel else None
        if self._probed.get(e, -1) >= fuel:
            return None
        res = run(e, e, self._oracle, fuel)
        if isinstance(res.outcome, Converged):
            self._settled[e] = ("converged", res.steps, res.outcome.value)
            return res.outcome.value
        if isinstance(res.outcome, Blocked):
            self._settled[e] = ("blocked", res.steps, 0)
            return None
        self._probed[e] = fuel
        return None


def kleene_tree(oracle: Oracle = BLOCK_ALL) -> DecidableTree:
    """The diagonal tree over an oracle.

    b of length n is a member iff no e < n has eval(e, e) settling within n
    steps to a value whose parity matches b(e).
    """
    table = _SelfRunTable(oracle)

    def member(bits: Bits) -> bool:
        n = len(bits)
        for e in range(n):
            v = table.value_within(e, n)
            if v is not None and bits[e] == v % 2:
                return False
        return True

    return DecidableTree(member, "kleene")


def kleene_witness(oracle: Oracle, n: int) -> Bits:
    """The canonical level-n member: flip every settled parity, 0 elsewhere."""
    table = _SelfRunTable(oracle)
    out = []
    for e in range(n):
        v = table.value_within(e, n)
        out.append(0 if v is None else 1 - v % 2)
    return tuple(out)


# ---------------------------------------------------------------------------
# Level censuses

def levels(tree: DecidableTree, n_max: int) -> Iterator[tuple[int, list[Bits]]]:
    """Members level by level, expanding only children of survivors.

    Sound on prefix-closed trees (use `full_scan_count` to audit that).
    """
    frontier = [()] if tree.contains(()) else []
    yield 0, frontier
    for n in range(1, n_max + 1):
        frontier = [b + (i,) for b in frontier for i in (0, 1) if tree.contains(b + (i,))]
        yield n, frontier


def full_scan_count(tree: DecidableTree, n: int) -> int:
    """Independent census: test every length-n sequence."""
    return sum(1 for bits in product((0, 1), repeat=n) if tree.contains(bits))


def level_count(tree: DecidableTree, n: int, method: str = "frontier") -> int:
    if method == "frontier":
        for depth, frontier in levels(tree, n):
            if depth == n:
                return len(frontier)
        raise AssertionError("unreachable")
    if method == "scan":
        return full_scan_count(tree, n)
    raise ValueError(f"unknown census method {method!r}")


@dataclass(frozen=True)
class LevelCensus:
    counts: tuple[int, ...]  # counts[n] = members at level n


def level_census(tree: DecidableTree, n_max: int) -> LevelCensus:
    return LevelCensus(tuple(len(front) for _, front in levels(tree, n_max)))


def measure_upper(tree: DecidableTree, n: int) -> Fraction:
    """Exact fraction of level n inside the tree; an upper bound on the
    measure of the set of paths."""
    return Fraction(level_count(tree, n), 1 << n)


def wwkl_witness(tree: DecidableTree, n_max: int) -> int | None:
    """Least level where at least half the sequences are outside the tree."""
    for n, frontier in levels(tree, n_max):
        if 2 * len(frontier) <= (1 << n):
            return n
    return None


def check_prefix_closed(tree: DecidableTree, depth: int) -> list[Bits]:
    """Members (full scan) whose parent is not a member; empty means closed."""
    bad = []
    for n in range(1, depth + 1):
        for bits in product((0, 1), repeat=n):
            if tree.contains(bits) and not tree.contains(bits[:-1]):
                bad.append(bits)
    return bad


def leftmost_path(tree: DecidableTree, depth: int) -> Bits | None:
    """Leftmost member of the given length all of whose prefixes are members."""
    if not tree.contains(()):
        return None

    def extend(bits: Bits) -> Bits | None:
        if len(bits) == depth:
            return bits
        for i in (0, 1):
            child = bits + (i,)
            if tree.contains(child):
                found = extend(child)
                if found is not None:
                    return found
        return None

    return extend(())


# ---------------------------------------------------------------------------
# Branch realizers

class IncoherentBranch(Exception):
    """A branch program returned outputs that do not line up into one path."""


class BranchDecider:
    """Membership test induced by a program that maps m to a length-m prefix.

    Each test runs the branch program exactly once (on the tested length;
    repeats are served from cache) and checks the output against everything
    seen before, so a non-chain or a wrong length surfaces as
    IncoherentBranch as soon as it is observable.
    """

    def __init__(self, code: int, oracle: Oracle = BLOCK_ALL, fuel: int = 100_000):
        self.code = code
        self.oracle = oracle
        self.fuel = fuel
        self.calls = 0
        self._outputs: dict[int, Bits] = {}

    def prefix_at(self, m: int) -> Bits:
        cached = self._outputs.get(m)
        if cached is not None:
            return cached
        value = run_decider(self.code, m, self.oracle, self.fuel)
        self.calls += 1
        if not is_canonical_bits_code(value):
            raise IncoherentBranch(f"output {value} at {m} is not a sequence code")
        bits = code_to_bits(value)
        if len(bits) != m:
            raise IncoherentBranch(f"asked for length {m}, got length {len(bits)}")
        for m2, bits2 in self._outputs.items():
            k = min(m, m2)
            if bits[:k] != bits2[:k]:
                raise IncoherentBranch(
                    f"outputs at {m2} and {m} disagree within the first {k} bits"
                )
        self._outputs[m] = bits
        return bits

    def contains(self, bits) -> bool:
        bits = tuple(bits)
        return bits == self.prefix_at(len(bits))


def branch_to_decider(code: int, oracle: Oracle = BLOCK_ALL,
                      fuel: int = 100_000) -> BranchDecider:
    """Decidable set membership for the branch computed by `code`."""
    return BranchDecider(code, oracle, fuel)


__all__ = [
    "Bits",
    "BranchDecider",
    "DecidableTree",
    "DeciderPartial",
    "IncoherentBranch",
    "LevelCensus",
    "at_most_ones_tree",
    "bits_to_code",
    "branch_to_decider",
    "check_prefix_closed",
    "code_to_bits",
    "format_bits",
    "full_scan_count",
    "full_tree",
    "is_canonical_bits_code",
    "kleene_tree",
    "kleene_witness",
    "leftmost_path",
    "level_census",
    "level_count",
    "levels",
    "measure_upper",
    "parse_bits",
    "wwkl_witness",
    "zeros_tree",
]
