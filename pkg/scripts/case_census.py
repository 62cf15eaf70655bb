#!/usr/bin/env python3
"""Independent census of storage-case labels over all subsets at small b.

Instead of enumerating subsets directly, enumerate the (much fewer) sets of
at most four non-empty blocks, classify each, and weight it by the number
of subsets of size <= 4 that induce exactly that block set.  The weighted
totals must match the case histogram reported by exhaustive verification,
which enumerates subsets one by one.
"""

import argparse
import sys
from itertools import combinations, product
from math import comb
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bitprobe4.geometry import BlockAddr, Params
from bitprobe4.scheme import MAX_MEMBERS, CaseLabel, classify


def subsets_per_config(b: int, num_blocks: int) -> int:
    """Subsets of size <= 4 whose non-empty blocks are a fixed j-block set.

    Each block must hold 1 to b members; totals beyond MAX_MEMBERS do not
    count.
    """
    total = 0
    for counts in product(range(1, b + 1), repeat=num_blocks):
        if sum(counts) <= MAX_MEMBERS:
            weight = 1
            for c in counts:
                weight *= comb(b, c)
            total += weight
    return total


def census(b: int) -> dict[CaseLabel, int]:
    p = Params(b)
    g = p.grid_side
    blocks = [
        BlockAddr(s, x, y) for s in range(1, b + 1) for y in range(g) for x in range(g)
    ]
    hist = {label: 0 for label in CaseLabel}
    for j in range(MAX_MEMBERS + 1):
        weight = subsets_per_config(b, j)
        for config in combinations(blocks, j):
            hist[classify(p, config)] += weight
    return hist


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--b", type=int, default=2, help="block size (2 is fast)")
    args = parser.parse_args()
    hist = census(args.b)
    print(f"case census at b={args.b} over all subsets of size <= {MAX_MEMBERS}:")
    for label in CaseLabel:
        print(f"  {label.value:>20}: {hist[label]}")
    print(f"  {'total':>20}: {sum(hist.values())}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
