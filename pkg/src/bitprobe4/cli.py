"""Command-line front-end: build, query, verify, stats, and dump.

Exit codes are a stable contract for CI: 0 for success (PASS / YES),
1 for a negative result (NO, or a verification FAIL), 2 for any error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .geometry import Params, element_from_ordinal
from .oracle import space_audit, verify_exhaustive, verify_random
from .scheme import build_from_ordinals, query
from .tables import deserialize, serialize


@dataclass
class CliConfig:
    command: str
    b: int | None = None
    m: int | None = None
    subset: list[int] = field(default_factory=list)
    out_path: str | None = None
    in_path: str | None = None
    element: int | None = None
    exhaustive: bool = False
    max_n: int = 4
    max_queries: int | None = None
    trials: int | None = None
    seed: int = 0
    n: int = 4
    csv: bool = False
    jobs: int = 1
    fmt: str = "plain"
    b_range: tuple[int, int] | None = None


def _parse_subset(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(part) for part in text.split(",")]


def _parse_b_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ValueError(f"bad range {text!r}, expected LO..HI")
    return int(lo), int(hi)


def _resolve_params(cfg: CliConfig) -> Params:
    if cfg.b is not None:
        return Params(cfg.b)
    assert cfg.m is not None
    p = Params.from_universe(cfg.m)
    if p.universe_size != cfg.m:
        print(
            f"note: universe padded to m={p.universe_size} (b={p.b}) "
            f"for requested m={cfg.m}"
        )
    return p


def cmd_build(cfg: CliConfig) -> int:
    p = _resolve_params(cfg)
    for n in cfg.subset:
        element_from_ordinal(p, n)  # range check before building
    st = build_from_ordinals(p, cfg.subset)
    blob = serialize(st)
    assert cfg.out_path is not None
    with open(cfg.out_path, "wb") as fh:
        fh.write(blob)
    total = st.total_bits()
    print(
        f"b={p.b} m={p.universe_size} |A|={st.table_a.nbits} "
        f"|B|={st.table_b.nbits} |C|={st.table_c.nbits} total={total} bits "
        f"({(total + 7) // 8} payload bytes) -> {cfg.out_path}"
    )
    return 0


def cmd_query(cfg: CliConfig) -> int:
    assert cfg.in_path is not None and cfg.element is not None
    with open(cfg.in_path, "rb") as fh:
        st = deserialize(fh.read())
    e = element_from_ordinal(st.params, cfg.element)
    answer, trace = query(st, e)
    (t1, p1, v1), (t2, p2, v2) = trace
    suffix = ""
    if cfg.fmt == "tuple":
        (s, x, y), i = e
        suffix = f"  (s={s},x={x},y={y},i={i})"
    print(f"{'YES' if answer else 'NO'} element={cfg.element}{suffix}")
    print(f"{t1}[{p1}]={v1} ; {t2}[{p2}]={v2}")
    return 0 if answer else 1


def cmd_verify(cfg: CliConfig) -> int:
    assert cfg.b is not None
    if cfg.exhaustive:
        kwargs = {}
        if cfg.max_queries is not None:
            kwargs["max_queries"] = cfg.max_queries
        report = verify_exhaustive(cfg.b, cfg.max_n, jobs=cfg.jobs, **kwargs)
    else:
        assert cfg.trials is not None
        report = verify_random(cfg.b, cfg.trials, cfg.seed, cfg.n, jobs=cfg.jobs)
    print(report.to_csv() if cfg.csv else report.to_text())
    return 0 if report.verdict == "PASS" else 1


def cmd_stats(cfg: CliConfig) -> int:
    assert cfg.b_range is not None
    lo, hi = cfg.b_range
    if lo < 2 or hi < lo:
        raise ValueError(f"bad range {lo}..{hi}: need 2 <= LO <= HI")
    print(f"{'b':>4} {'|A|':>12} {'|B|':>12} {'|C|':>12} {'total':>13} {'total/b^5':>10}")
    for row in space_audit(range(lo, hi + 1)):
        print(
            f"{row.b:>4} {row.a_bits:>12} {row.b_bits:>12} {row.c_bits:>12} "
            f"{row.total_bits:>13} {row.ratio:>10.4f}"
        )
    return 0


def cmd_dump(cfg: CliConfig) -> int:
    assert cfg.in_path is not None
    with open(cfg.in_path, "rb") as fh:
        st = deserialize(fh.read())
    print(f"b={st.params.b} m={st.params.universe_size}")
    for name, table in (("A", st.table_a), ("B", st.table_b), ("C", st.table_c)):
        print(f"{name}: {table.nbits} bits, set={list(table.ones())}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitprobe4",
        description="Two-probe membership structures for subsets of size at most 4.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build and serialize a structure")
    size = b.add_mutually_exclusive_group(required=True)
    size.add_argument("--b", type=int, help="block size parameter (>= 2)")
    size.add_argument("--m", type=int, help="universe size; b = ceil(m^(1/6))")
    b.add_argument("--set", default="", help="comma-separated element ordinals")
    b.add_argument("--out", required=True, help="output file path")

    q = sub.add_parser("query", help="query a serialized structure")
    q.add_argument("--in", dest="in_path", required=True)
    q.add_argument("--element", type=int, required=True)
    q.add_argument("--fmt", choices=("plain", "tuple"), default="plain")

    v = sub.add_parser("verify", help="run brute-force verification")
    v.add_argument("--b", type=int, required=True)
    mode = v.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--trials", type=int)
    v.add_argument("--max-n", type=int, default=4, help="subset size cap (exhaustive)")
    v.add_argument("--max-queries", type=int, help="override the feasibility limit")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n", type=int, default=4, help="subset size (random trials)")
    v.add_argument("--csv", action="store_true")
    v.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("stats", help="print exact table sizes per b")
    s.add_argument("--b-range", required=True, help="inclusive range LO..HI")

    d = sub.add_parser("dump", help="print the contents of a structure file")
    d.add_argument("--in", dest="in_path", required=True)

    return parser


def _config_from_args(args: argparse.Namespace) -> CliConfig:
    cfg = CliConfig(command=args.command)
    if args.command == "build":
        cfg.b = args.b
        cfg.m = args.m
        cfg.subset = _parse_subset(args.set)
        cfg.out_path = args.out
    elif args.command == "query":
        cfg.in_path = args.in_path
        cfg.element = args.element
        cfg.fmt = args.fmt
    elif args.command == "verify":
        cfg.b = args.b
        cfg.exhaustive = args.exhaustive
        cfg.max_n = args.max_n
        cfg.max_queries = args.max_queries
        cfg.trials = args.trials
        cfg.seed = args.seed
        cfg.n = args.n
        cfg.csv = args.csv
        cfg.jobs = args.jobs
    elif args.command == "stats":
        cfg.b_range = _parse_b_range(args.b_range)
    elif args.command == "dump":
        cfg.in_path = args.in_path
    return cfg


_DISPATCH = {
    "build": cmd_build,
    "query": cmd_query,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "dump": cmd_dump,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _DISPATCH[cfg.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
