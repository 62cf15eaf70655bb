#!/usr/bin/env python3
"""Reproduce the headline verification results end to end.

Runs the space audit, the line-family checks, exhaustive verification at
b=2, randomized verification at b=3 and b=4, and the single-bit fault
audit.  `--quick` shrinks the runs to a smoke test; the default settings
match the acceptance suite.
"""

import argparse
import os
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bitprobe4.geometry import Params, lines_of_superblock, points_on_line
from bitprobe4.oracle import (
    audit_bit_flips,
    space_audit,
    verify_exhaustive,
    verify_random,
)


def stage(name):
    print(f"\n=== {name} ===", flush=True)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="small smoke-test runs")
    parser.add_argument("--jobs", type=int, default=min(os.cpu_count() or 1, 8))
    args = parser.parse_args()

    failed = False
    t0 = time.perf_counter()

    stage("space audit (b = 2 .. 16)")
    print(f"{'b':>3} {'|A|':>9} {'|B|':>9} {'|C|':>9} {'total':>10} {'ratio':>8}")
    for row in space_audit(range(2, 17)):
        print(
            f"{row.b:>3} {row.a_bits:>9} {row.b_bits:>9} {row.c_bits:>9} "
            f"{row.total_bits:>10} {row.ratio:>8.4f}"
        )

    stage("line families (b = 2 .. 8): cover, partition, counts")
    for b in range(2, 9):
        p = Params(b)
        for s in range(1, b + 1):
            covered = set()
            total = 0
            for l in lines_of_superblock(p, s):
                pts = points_on_line(p, l)
                assert pts, f"empty line {l}"
                covered.update(pts)
                total += len(pts)
            assert total == len(covered) == p.blocks_per_superblock
        print(f"  b={b}: all {b} families cover the grid exactly once")

    max_n = 2 if args.quick else 4
    stage(f"exhaustive verification (b=2, subsets up to size {max_n})")
    report = verify_exhaustive(2, max_n=max_n, jobs=args.jobs)
    print(report.to_text())
    failed |= report.verdict != "PASS"

    trials3, trials4 = (2000, 500) if args.quick else (100_000, 10_000)
    stage(f"randomized verification (b=3 x{trials3}, b=4 x{trials4}, seed=1)")
    for b, trials in ((3, trials3), (4, trials4)):
        report = verify_random(b, trials=trials, seed=1, jobs=args.jobs)
        print(
            f"  b={b}: {report.subsets_checked} subsets, "
            f"{report.queries_checked} queries, {report.failures_total} failures, "
            f"{report.elapsed:.1f}s -> {report.verdict}"
        )
        failed |= report.verdict != "PASS"

    structures = 10 if args.quick else 100
    stage(f"fault audit (b=2, {structures} structures, every bit flipped)")
    audit = audit_bit_flips(2, structures=structures, seed=0)
    print(
        f"  {audit.flips} flips: {audit.detected} detected, "
        f"{audit.harmless} proven harmless, detection rate "
        f"{audit.detection_rate:.4f}"
    )
    failed |= audit.detection_rate < 0.99
    failed |= audit.detected + audit.harmless != audit.flips

    print(f"\ntotal wall time: {time.perf_counter() - t0:.1f}s")
    print("RESULT:", "FAIL" if failed else "PASS")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
