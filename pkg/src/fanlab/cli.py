"""Batch command-line driver: assembler, evaluator, and experiment runner.

Output is line oriented and diffable: one record per line, fields separated
by single spaces, `#` starting comment lines.  Every run prints a header
comment naming the command and a digest of its inputs, then the payload
records, then a trailing `# wall-time` comment.  Identical inputs give
byte-identical output except for that last line.

Exit codes: 0 success, 1 a checked property failed, 2 bad input.
The environment variable FANLAB_SEED (default 0) fixes every randomized
suite, so runs are reproducible across machines.

Assembly grammar, one instruction per line::

    start:  INC r1          # labels end with ':', comments with '#'
            DECJZ r1 done   # jump targets: label or instruction index
            JMP start
    done:   QUERY r1 r2
            HALT

Registers are written `r<N>`.  A numeric jump target at or past the end of
the program simply halts.

File formats.  Ground-real family files hold lines `n: pattern <bits>`
(repeating 0/1 membership pattern) or `n: <assembly path>` (a no-oracle
decider program, nonzero output meaning member), indices contiguous from 0.
Bar table files hold one bit string per line (`-` for the empty sequence).
Tree specs: `kleene`, `full`, `zeros`, `at-most-k-ones <k>`, or
`decider <assembly path> [node]`.  Bar specs for verify-bound: `depth <k>`,
`table <file>`, or an assembly decider path.  Nodes are comma-separated
naturals, empty string for the root.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import random
import re
import shlex
import sys
import time
from pathlib import Path

from . import fan, kripke, machine, trees
from .kripke import Family, GroundReal, Node, node_oracle, parse_node
from .machine import (
    BLOCK_ALL,
    Blocked,
    Converged,
    Decjz,
    Halt,
    Inc,
    Instruction,
    Jmp,
    OutOfFuel,
    Program,
    Query,
    decode_program,
    encode_program,
    run,
    run_decider,
    unpair,
)
from .trees import Bits, DecidableTree, bits_to_code, format_bits, parse_bits

EVAL_FUEL = 100_000
EXTRACTION_FUEL = 1_000_000


class CliInputError(ValueError):
    """Anything wrong with arguments or input files (exit code 2)."""


class AsmError(CliInputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# Assembler

_MNEMONICS = {"INC", "DECJZ", "JMP", "QUERY", "HALT"}
_ARITY = {"INC": 1, "DECJZ": 2, "JMP": 1, "QUERY": 2, "HALT": 0}
_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _tokenize(line: str) -> list[tuple[str, int]]:
    """(token, 1-based column) pairs, comment stripped."""
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _parse_register(token: str, lineno: int, col: int) -> int:
    if len(token) >= 2 and token[0] in "rR" and token[1:].isdigit():
        return int(token[1:])
    raise AsmError(f"expected a register like r0, got {token!r}", lineno, col)


def parse_assembly(text: str) -> Program:
    """Assemble text into a program, resolving labels to instruction indices."""
    labels: dict[str, int] = {}
    pending: list[tuple[str, list[tuple[str, int]], int]] = []  # mnemonic, args, line
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize(raw)
        while toks and toks[0][0].endswith(":"):
            name = toks[0][0][:-1]
            if not _LABEL_RE.match(name):
                raise AsmError(f"bad label {name!r}", lineno, toks[0][1])
            if name in labels:
                raise AsmError(f"duplicate label {name!r}", lineno, toks[0][1])
            labels[name] = len(pending)
            toks = toks[1:]
        if not toks:
            continue
        mnemonic = toks[0][0].upper()
        if mnemonic not in _MNEMONICS:
            raise AsmError(f"unknown mnemonic {toks[0][0]!r}", lineno, toks[0][1])
        if len(toks) - 1 != _ARITY[mnemonic]:
            raise AsmError(
                f"{mnemonic} takes {_ARITY[mnemonic]} operand(s), got {len(toks) - 1}",
                lineno, toks[0][1],
            )
        pending.append((mnemonic, toks[1:], lineno))

    def target(token: str, lineno: int, col: int) -> int:
        if token.isdigit():
            return int(token)
        if token in labels:
            return labels[token]
        raise AsmError(f"undefined label {token!r}", lineno, col)

    out: list[Instruction] = []
    for mnemonic, args, lineno in pending:
        if mnemonic == "INC":
            out.append(Inc(_parse_register(args[0][0], lineno, args[0][1])))
        elif mnemonic == "DECJZ":
            out.append(Decjz(_parse_register(args[0][0], lineno, args[0][1]),
                             target(args[1][0], lineno, args[1][1])))
        elif mnemonic == "JMP":
            out.append(Jmp(target(args[0][0], lineno, args[0][1])))
        elif mnemonic == "QUERY":
            out.append(Query(_parse_register(args[0][0], lineno, args[0][1]),
                             _parse_register(args[1][0], lineno, args[1][1])))
        else:
            out.append(Halt())
    return tuple(out)


def format_instruction(ins: Instruction) -> str:
    match ins:
        case Inc(reg):
            return f"INC r{reg}"
        case Decjz(reg, tgt):
            return f"DECJZ r{reg} {tgt}"
        case Jmp(tgt):
            return f"JMP {tgt}"
        case Query(src, dst):
            return f"QUERY r{src} r{dst}"
        case Halt():
            return "HALT"
    raise TypeError(f"not an instruction: {ins!r}")


def format_program(program: Program, indices: bool = True) -> str:
    if not indices:
        return "\n".join(format_instruction(i) for i in program)
    width = len(str(max(len(program) - 1, 0)))
    return "\n".join(
        f"{i:>{width}}: {format_instruction(ins)}" for i, ins in enumerate(program)
    )


# ---------------------------------------------------------------------------
# Input parsing helpers

def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc.strerror}") from None


def _program_arg(value: str) -> int:
    """A program given either as a bare code or as an assembly file path."""
    if value.isdigit():
        return int(value)
    return encode_program(parse_assembly(_read_text(value)))


def default_family() -> Family:
    """Six fixed repeating-pattern ground reals, used when no file is given."""
    patterns = ("10", "01", "1", "0", "110", "10010")
    return tuple(
        GroundReal(pattern=tuple(int(c) for c in p)) for p in patterns
    )


def parse_family_file(path: str) -> Family:
    entries: dict[int, GroundReal] = {}
    base = Path(path).parent
    for lineno, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep or not head.strip().isdigit():
            raise CliInputError(f"{path}:{lineno}: expected 'n: pattern <bits>' or 'n: <asm path>'")
        n = int(head.strip())
        if n in entries:
            raise CliInputError(f"{path}:{lineno}: duplicate index {n}")
        rest = rest.strip()
        if rest.startswith("pattern"):
            bits = rest[len("pattern"):].strip()
            if not bits or set(bits) - {"0", "1"}:
                raise CliInputError(f"{path}:{lineno}: pattern must be nonempty 0/1 string")
            entries[n] = GroundReal(pattern=tuple(int(c) for c in bits))
        else:
            code = encode_program(parse_assembly(_read_text(str(base / rest))))
            entries[n] = GroundReal(decider=code)
    if not entries:
        raise CliInputError(f"{path}: empty family file")
    if sorted(entries) != list(range(len(entries))):
        raise CliInputError(f"{path}: indices must be contiguous from 0")
    return tuple(entries[k] for k in range(len(entries)))


def _family_and_node(args) -> tuple[Family, Node]:
    family = parse_family_file(args.family) if args.family else default_family()
    node = parse_node(args.node) if args.node is not None else ()
    if len(node) > len(family):
        raise CliInputError(
            f"node has {len(node)} entries but the family only {len(family)}"
        )
    return family, node


def parse_tree_spec(spec: str, family: Family, fuel: int) -> DecidableTree:
    toks = shlex.split(spec)
    if not toks:
        raise CliInputError("empty tree spec")
    kind, rest = toks[0], toks[1:]
    if kind == "full" and not rest:
        return trees.full_tree()
    if kind == "zeros" and not rest:
        return trees.zeros_tree()
    if kind == "at-most-k-ones" and len(rest) == 1 and rest[0].isdigit():
        return trees.at_most_ones_tree(int(rest[0]))
    if kind == "kleene" and len(rest) <= 1:
        oracle = node_oracle(family, parse_node(rest[0])) if rest else BLOCK_ALL
        return trees.kleene_tree(oracle)
    if kind == "decider" and 1 <= len(rest) <= 2:
        code = encode_program(parse_assembly(_read_text(rest[0])))
        oracle = node_oracle(family, parse_node(rest[1])) if len(rest) == 2 else BLOCK_ALL
        label = f"decider:{Path(rest[0]).name}"
        return trees.DecidableTree.from_program(code, oracle, fuel, label)
    raise CliInputError(f"bad tree spec: {spec!r}")


def parse_bar_table_file(path: str) -> frozenset[Bits]:
    out: set[Bits] = set()
    for lineno, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.add(parse_bits(line))
        except ValueError as exc:
            raise CliInputError(f"{path}:{lineno}: {exc}") from None
    return frozenset(out)


def parse_bar_spec(spec: str, oracle, fuel: int):
    """A bar membership test from `depth <k>`, `table <file>`, or an assembly path."""
    toks = shlex.split(spec)
    if len(toks) == 2 and toks[0] == "depth" and toks[1].isdigit():
        return fan.depth_bar(int(toks[1]))
    if len(toks) == 2 and toks[0] == "table":
        return fan.table_bar(parse_bar_table_file(toks[1]))
    if len(toks) == 1:
        code = encode_program(parse_assembly(_read_text(toks[0])))
        return lambda bits: run_decider(code, bits_to_code(bits), oracle, fuel) != 0
    raise CliInputError(f"bad bar spec: {spec!r}")


# ---------------------------------------------------------------------------
# Commands

def _cmd_asm(args) -> int:
    program = parse_assembly(_read_text(args.file))
    print(f"code {encode_program(program)}")
    if program:
        print(format_program(program))
    return 0


def _cmd_encode(args) -> int:
    print(f"code {encode_program(parse_assembly(_read_text(args.file)))}")
    return 0


def _cmd_decode(args) -> int:
    program = decode_program(args.code)
    print(f"code {args.code}")
    if program:
        print(format_program(program))
    return 0


def _cmd_eval(args) -> int:
    code = _program_arg(args.program)
    family, node = _family_and_node(args)
    oracle = node_oracle(family, node) if args.node is not None else BLOCK_ALL
    res = run(code, args.input, oracle, args.fuel)
    slices = {unpair(q)[0] for q, _ in res.trace.entries}
    match res.outcome:
        case Converged(value):
            print(f"outcome Converged {value}")
        case Blocked(query, _):
            print(f"outcome Blocked {query}")
            slices.add(unpair(query)[0])
        case OutOfFuel(_):
            print("outcome OutOfFuel")
    print(f"steps {res.steps}")
    for q, ans in res.trace.entries:
        print(f"query {q} {ans.value}")
    mq = res.trace.max_query
    print(f"max-query {'none' if mq is None else mq}")
    print(f"max-slice {max(slices) if slices else 'none'}")
    return 0


def _cmd_kleene(args) -> int:
    family, node = _family_and_node(args)
    oracle = node_oracle(family, node) if args.node is not None else BLOCK_ALL
    tree = trees.kleene_tree(oracle)
    for n, frontier in trees.levels(tree, args.depth):
        print(f"level {n} {len(frontier)}")
    witness = trees.kleene_witness(oracle, args.depth)
    print(f"witness {format_bits(witness)}")
    if not tree.contains(witness):
        print("witness-check fail")
        return 1
    return 0


def _cmd_census(args) -> int:
    family, _ = _family_and_node(args)
    tree = parse_tree_spec(args.tree, family, args.fuel)
    if args.scan:
        counts = [trees.full_scan_count(tree, n) for n in range(args.depth + 1)]
    else:
        counts = [len(f) for _, f in trees.levels(tree, args.depth)]
    for n, count in enumerate(counts):
        print(f"{n} {count} {1 << n}")
    return 0


def _cmd_wwkl(args) -> int:
    family, _ = _family_and_node(args)
    tree = parse_tree_spec(args.tree, family, args.fuel)
    witness = trees.wwkl_witness(tree, args.max)
    print(f"witness {'none' if witness is None else witness}")
    return 0


def _cmd_extract_bound(args) -> int:
    family, node = _family_and_node(args)
    base = node_oracle(family, node) if args.node is not None else BLOCK_ALL
    code = _program_arg(args.realizer)
    realizer = fan.BarRealizer(code, base, args.fuel)
    try:
        bound = fan.extract_bound(realizer, n_max=args.max)
    except fan.ExtractionExhausted as exc:
        print(f"no-bound stage {exc.stage} uncovered {len(exc.uncovered)} reason {exc.reason}")
        return 1
    except fan.InvalidRealizer as exc:
        print(f"invalid-realizer {exc}")
        return 1
    except fan.RealizerBlocked as exc:
        print(f"realizer-blocked query {exc.query}")
        return 1
    print(f"bound {bound.n}")
    for bits in sorted(bound.certificate):
        print(f"{format_bits(bits)} {format_bits(bound.certificate[bits])}")
    return 0


def _cmd_verify_bound(args) -> int:
    family, node = _family_and_node(args)
    oracle = node_oracle(family, node) if args.node is not None else BLOCK_ALL
    bar = parse_bar_spec(args.bar, oracle, args.fuel)
    ok = fan.verify_uniform_bound(bar, args.depth)
    print(f"verified {'true' if ok else 'false'}")
    return 0 if ok else 1


# --- check suites ----------------------------------------------------------

def _random_node(rng: random.Random, family: Family) -> Node:
    return tuple(rng.randrange(4) for _ in range(rng.randrange(len(family))))


def _suite_persistence(args, rng: random.Random) -> list[str]:
    family = default_family()
    failures = 0
    for _ in range(args.trials):
        program = machine.random_program(rng)
        node = _random_node(rng, family)
        child = node + (rng.randrange(4),)
        x = rng.randrange(8)
        here = machine.evaluate(encode_program(program), x, node_oracle(family, node), args.fuel)
        if isinstance(here, Converged):
            there = machine.evaluate(encode_program(program), x, node_oracle(family, child), args.fuel)
            if there != here:
                failures += 1
    status = "pass" if failures == 0 else "fail"
    return [f"persistence {status} trials {args.trials} failures {failures}"]


def _all_nodes(max_len: int, max_entry: int):
    frontier: list[Node] = [()]
    yield ()
    for _ in range(max_len):
        frontier = [n + (i,) for n in frontier for i in range(max_entry + 1)]
        yield from frontier


def _suite_slice_gate(args, rng: random.Random) -> list[str]:
    family = default_family()
    nodes = list(_all_nodes(4, 3))
    bad = 0
    for k in range(4):
        probe = encode_program(kripke.slice_probe_program(k))
        for node in nodes:
            out = machine.evaluate(probe, 0, node_oracle(family, node), args.fuel)
            if isinstance(out, Converged) != (len(node) > k):
                bad += 1
    status = "pass" if bad == 0 else "fail"
    return [f"slice-gate {status} nodes {len(nodes)} k-max 3 failures {bad}"]


def _suite_kleene(args, rng: random.Random) -> list[str]:
    tree = trees.kleene_tree(BLOCK_ALL)
    lines = []
    ok = True
    for n, frontier in trees.levels(tree, args.depth):
        lines.append(f"level {n} {len(frontier)}")
        if not frontier:
            ok = False
    violations = trees.check_prefix_closed(tree, min(args.depth, 10))
    if violations:
        ok = False
    lines.append(
        f"kleene {'pass' if ok else 'fail'} depth {args.depth} "
        f"prefix-violations {len(violations)}"
    )
    return lines


def _suite_extraction(args, rng: random.Random) -> list[str]:
    lines = []
    ok = True
    cases = [
        ("empty", machine.encode_program(()), 0),
        ("take-3", encode_program(fan.take_prefix_program(3)), 3),
        ("first-split", encode_program(fan.first_bit_split_program()), 2),
    ]
    for name, code, expected in cases:
        bound = fan.extract_bound(fan.BarRealizer(code))
        outputs = bound.realizer_outputs
        sound = fan.verify_uniform_bound(fan.prefix_hit_bar(outputs), bound.n)
        good = bound.n == expected and sound
        ok = ok and good
        lines.append(
            f"extraction-case {name} {'pass' if good else 'fail'} "
            f"bound {bound.n} expected {expected} sound {str(sound).lower()}"
        )
    random_ok = 0
    for _ in range(args.trials):
        table = fan.random_bar_table(rng, depth=4)
        code = encode_program(fan.compile_bar_table(table))
        bound = fan.extract_bound(fan.BarRealizer(code))
        if fan.verify_uniform_bound(fan.table_bar(table), bound.n):
            random_ok += 1
    ok = ok and random_ok == args.trials
    lines.append(
        f"extraction-random {'pass' if random_ok == args.trials else 'fail'} "
        f"trials {args.trials} sound {random_ok}"
    )
    return lines


def _suite_census(args, rng: random.Random) -> list[str]:
    family = default_family()
    specs = ["full", "zeros", "at-most-k-ones 1", "kleene"]
    bad = 0
    for spec in specs:
        tree = parse_tree_spec(spec, family, args.fuel)
        frontier = [len(f) for _, f in trees.levels(tree, args.depth)]
        scan = [trees.full_scan_count(tree, n) for n in range(args.depth + 1)]
        if frontier != scan:
            bad += 1
    status = "pass" if bad == 0 else "fail"
    return [f"census {status} trees {len(specs)} depth {args.depth} failures {bad}"]


_SUITES = {
    "persistence": (_suite_persistence, {"trials": 500, "fuel": 10_000}),
    "lemma1": (_suite_slice_gate, {"fuel": EVAL_FUEL}),
    "kleene": (_suite_kleene, {"depth": 12}),
    "extraction": (_suite_extraction, {"trials": 25}),
    "census": (_suite_census, {"depth": 8, "fuel": EVAL_FUEL}),
}


def _cmd_check(args) -> int:
    suite_fn, defaults = _SUITES[args.suite]
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    seed = int(os.environ.get("FANLAB_SEED", "0"))
    rng = random.Random(seed)
    lines = suite_fn(args, rng)
    failed = False
    for line in lines:
        print(line)
        if " fail " in f" {line} ":
            failed = True
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Driver

def _digest(argv: list[str]) -> str:
    return hashlib.sha256("\x00".join(argv).encode()).hexdigest()[:12]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanlab",
        description="oracle-machine workbench: assembler, trees, bound extraction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=fn)
        return p

    p = add("asm", _cmd_asm, help="assemble a file; print its code and listing")
    p.add_argument("file")

    p = add("encode", _cmd_encode, help="assemble a file; print only its code")
    p.add_argument("file")

    p = add("decode", _cmd_decode, help="print the listing of a program code")
    p.add_argument("code", type=int)

    p = add("eval", _cmd_eval, help="run a program against a node oracle")
    p.add_argument("program", help="program code, or path to an assembly file")
    p.add_argument("input", type=int)
    p.add_argument("--node", default=None, help="Kripke node, e.g. 2,0,1 (default: no oracle)")
    p.add_argument("--family", default=None, help="ground-real family file")
    p.add_argument("--fuel", type=int, default=EVAL_FUEL)

    p = add("kleene", _cmd_kleene, help="level counts and a witness path of the Kleene tree")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--node", default=None)
    p.add_argument("--family", default=None)

    p = add("census", _cmd_census, help="level counts of a tree: lines 'n count 2^n'")
    p.add_argument("--tree", required=True)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--scan", action="store_true", help="full 2^n scan instead of frontier expansion")
    p.add_argument("--node", default=None)
    p.add_argument("--family", default=None)
    p.add_argument("--fuel", type=int, default=EVAL_FUEL)

    p = add("wwkl", _cmd_wwkl, help="least level where at least half the sequences are outside the tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--max", type=int, default=10)
    p.add_argument("--node", default=None)
    p.add_argument("--family", default=None)
    p.add_argument("--fuel", type=int, default=EVAL_FUEL)

    p = add("extract-bound", _cmd_extract_bound, help="stage-wise uniform bound extraction from a realizer")
    p.add_argument("--realizer", required=True, help="assembly file or program code")
    p.add_argument("--node", default=None)
    p.add_argument("--family", default=None)
    p.add_argument("--fuel", type=int, default=EXTRACTION_FUEL)
    p.add_argument("--max", type=int, default=16, help="stage limit")

    p = add("verify-bound", _cmd_verify_bound, help="exhaustively confirm a depth bound against a bar")
    p.add_argument("--bar", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--node", default=None)
    p.add_argument("--family", default=None)
    p.add_argument("--fuel", type=int, default=EVAL_FUEL)

    p = add("check", _cmd_check, help="run a property suite; nonzero exit on failure")
    p.add_argument("suite", choices=sorted(_SUITES))
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--fuel", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    print(f"# fanlab {args.command} inputs {_digest(argv)}")
    try:
        status = args.func(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"# wall-time {time.perf_counter() - started:.3f}s")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
