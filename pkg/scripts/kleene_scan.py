#!/usr/bin/env python3
"""Scan the diagonal tree: level widths, the canonical witness, and the
first level where the frontier visibly fans out.

The tree stays width 1 for a long stretch because small codes decode to
programs that diverge or block on their own index, so no parity gets
forced.  The first interesting index is the smallest self-halting code,
and past it every member must carry the matching flipped bit.  Run with
--deep to watch that happen (the default deep level is just past the
first forcing index).

Examples:
    python3 scripts/kleene_scan.py
    python3 scripts/kleene_scan.py --depth 14 --deep 80
"""

import argparse

from fanlab.machine import BLOCK_ALL
from fanlab.trees import format_bits, kleene_tree, kleene_witness, levels


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=12,
                    help="scan levels 0..DEPTH (default 12)")
    ap.add_argument("--deep", type=int, default=77,
                    help="also sample this single deep level (default 77)")
    args = ap.parse_args()

    tree = kleene_tree()
    print(f"levels 0..{args.depth}")
    for n, frontier in levels(tree, args.depth):
        print(f"  level {n:3d} width {len(frontier)}")
    witness = kleene_witness(BLOCK_ALL, args.depth)
    print(f"witness at depth {args.depth}: {format_bits(witness)}")
    assert tree.contains(witness)

    if args.deep > args.depth:
        deep_frontier = None
        for _, frontier in levels(tree, args.deep):
            deep_frontier = frontier
        free = [p for p in range(args.deep)
                if len({member[p] for member in deep_frontier}) == 2]
        print(f"level {args.deep} width {len(deep_frontier)}")
        print(f"  positions free to vary: {free}")
        forced = [p for p in range(args.deep) if p not in set(free)]
        deepest = max(forced)
        value = deep_frontier[0][deepest]
        print(f"  deepest forced position: {deepest} "
              f"(every member carries a {value} there)")


if __name__ == "__main__":
    main()
