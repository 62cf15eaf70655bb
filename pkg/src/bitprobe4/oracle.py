"""Brute-force verification against ground truth, plus space accounting.

Ground truth is always a direct membership test on the stored subset; the
scheme side of every comparison goes through `scheme.query`.  Exhaustive
verification enumerates every subset up to the size cap and checks every
universe element; randomized verification draws seeded subsets from a
splitmix64 stream, so identical seeds reproduce identical reports on any
platform.  Subset checks are independent and can be spread over worker
processes; partial results merge in enumeration order, so the report does
not depend on the worker count.
"""

from __future__ import annotations

import math
import multiprocessing
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, islice
from typing import Iterable, Iterator, NamedTuple

from .geometry import ElementAddr, Params, element_from_ordinal
from .scheme import (
    CaseLabel,
    MAX_MEMBERS,
    ProbeTrace,
    _fill_tables,
    assign_blocks,
    classify,
    group_members,
    query,
)
from .tables import Structure

# Full-universe checking is the default up to this b; above it, random
# verification probes the members plus a seeded non-member sample.
FULL_CHECK_MAX_B = 4
NONMEMBER_PROBES = 10_000

# Refuse exhaustive runs estimated above this many probes unless overridden.
DEFAULT_MAX_QUERIES = 1 << 31

_CASE_ORDER = tuple(CaseLabel)
_CASE_INDEX = {label: k for k, label in enumerate(_CASE_ORDER)}


class FeasibilityError(ValueError):
    """Requested exhaustive enumeration is too large to run."""


class Failure(NamedTuple):
    """One wrong answer: the subset, the element, and the probe evidence."""

    subset: tuple[int, ...]
    element: int
    expected: bool
    got: bool
    trace: ProbeTrace


class CheckResult(NamedTuple):
    queries: int
    failures: list[Failure]
    failures_total: int
    trace_violations: int


@dataclass
class VerifyReport:
    """Outcome of a verification run."""

    b: int
    subsets_checked: int
    queries_checked: int
    failures: list[Failure]
    failures_total: int
    case_histogram: dict[CaseLabel, int]
    trace_violations: int = 0
    elapsed: float = 0.0

    @property
    def verdict(self) -> str:
        return "PASS" if self.failures_total == 0 else "FAIL"

    def to_text(self) -> str:
        lines = [
            f"b={self.b} subsets={self.subsets_checked} "
            f"queries={self.queries_checked} failures={self.failures_total} "
            f"trace_violations={self.trace_violations} "
            f"seconds={self.elapsed:.2f}",
            f"verdict: {self.verdict}",
            "case histogram:",
        ]
        for label in _CASE_ORDER:
            lines.append(f"  {label.value}: {self.case_histogram.get(label, 0)}")
        for f in self.failures:
            lines.append(
                f"  FAIL subset={f.subset} element={f.element} "
                f"expected={f.expected} got={f.got} trace={f.trace}"
            )
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = [
            "b,subsets,queries,failures,seconds",
            f"{self.b},{self.subsets_checked},{self.queries_checked},"
            f"{self.failures_total},{self.elapsed:.3f}",
            "label,count",
        ]
        for label in _CASE_ORDER:
            rows.append(f"{label.value},{self.case_histogram.get(label, 0)}")
        return "\n".join(rows)


@lru_cache(maxsize=8)
def _element_table(b: int) -> tuple[ElementAddr, ...]:
    p = Params(b)
    return tuple(element_from_ordinal(p, n) for n in range(p.universe_size))


def check_membership(
    st: Structure, members: Iterable[int], cap: int | None = 32
) -> CheckResult:
    """Query every universe element of st and compare with membership in S.

    `members` are flat ordinals.  Also counts queries whose probe trace is
    malformed (not exactly two probes starting in table A).
    """
    p = st.params
    elems = _element_table(p.b)
    mem = frozenset(members)
    subset_key = tuple(sorted(mem))
    failures: list[Failure] = []
    total = 0
    violations = 0
    q = query
    for n in range(p.universe_size):
        got, trace = q(st, elems[n])
        if len(trace) != 2 or trace[0][0] != "A":
            violations += 1
        if got != (n in mem):
            total += 1
            if cap is None or len(failures) < cap:
                failures.append(Failure(subset_key, n, n in mem, got, trace))
    return CheckResult(len(elems), failures, total, violations)


def check_sampled(
    st: Structure, members: Iterable[int], probes: Iterable[int], cap: int | None = 32
) -> CheckResult:
    """Like check_membership but only for the given probe ordinals."""
    p = st.params
    elems = _element_table(p.b)
    mem = frozenset(members)
    subset_key = tuple(sorted(mem))
    failures: list[Failure] = []
    total = 0
    violations = 0
    queries = 0
    for n in probes:
        got, trace = query(st, elems[n])
        queries += 1
        if len(trace) != 2 or trace[0][0] != "A":
            violations += 1
        if got != (n in mem):
            total += 1
            if cap is None or len(failures) < cap:
                failures.append(Failure(subset_key, n, n in mem, got, trace))
    return CheckResult(queries, failures, total, violations)


# ---------------------------------------------------------------------------
# Deterministic random streams (splitmix64).

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_NONMEMBER_SALT = 0xA5A5A5A5A5A5A5A5
_FLIP_SALT = 0x0F0F0F0F0F0F0F0F


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def splitmix64_stream(seed: int) -> Iterator[int]:
    """Endless stream of 64-bit values from the splitmix64 generator."""
    state = seed & _MASK64
    while True:
        state = (state + _GOLDEN) & _MASK64
        yield _mix64(state)


def _trial_stream(seed: int, trial: int, salt: int = 0) -> Iterator[int]:
    """Independent stream for one trial, derived from (seed, trial, salt)."""
    return splitmix64_stream(_mix64(((seed + trial * _GOLDEN) ^ salt) & _MASK64))


def _draw_below(stream: Iterator[int], bound: int) -> int:
    """Uniform draw in [0, bound) by rejection, bias-free."""
    limit = (1 << 64) - (1 << 64) % bound
    while True:
        v = next(stream)
        if v < limit:
            return v % bound


def draw_subset(seed: int, trial: int, n: int, m: int) -> tuple[int, ...]:
    """The trial-th seeded uniform n-subset of [0, m), sorted."""
    stream = _trial_stream(seed, trial)
    chosen: set[int] = set()
    while len(chosen) < n:
        chosen.add(_draw_below(stream, m))
    return tuple(sorted(chosen))


def _draw_nonmembers(seed: int, trial: int, count: int, m: int, members: frozenset[int]) -> list[int]:
    stream = _trial_stream(seed, trial, _NONMEMBER_SALT)
    chosen: set[int] = set()
    while len(chosen) < count:
        v = _draw_below(stream, m)
        if v not in members:
            chosen.add(v)
    return sorted(chosen)


# ---------------------------------------------------------------------------
# Verification drivers.


def _merge(
    b: int, partials: Iterable[tuple], cap: int, elapsed: float
) -> VerifyReport:
    subsets = queries = failures_total = violations = 0
    failures: list[Failure] = []
    hist = [0] * len(_CASE_ORDER)
    for p_subsets, p_queries, p_failures, p_total, p_hist, p_viol in partials:
        subsets += p_subsets
        queries += p_queries
        failures_total += p_total
        violations += p_viol
        for k, count in enumerate(p_hist):
            hist[k] += count
        if len(failures) < cap:
            failures.extend(p_failures[: cap - len(failures)])
    histogram = {label: hist[k] for k, label in enumerate(_CASE_ORDER)}
    return VerifyReport(
        b, subsets, queries, failures, failures_total, histogram, violations, elapsed
    )


def _check_one_subset(p: Params, combo: tuple[int, ...], cap: int):
    """Build, classify, and fully check one subset; returns (label, result)."""
    members = [element_from_ordinal(p, n) for n in combo]
    grouped = group_members(p, members)
    blocks = sorted(grouped)
    label = classify(p, blocks)
    st = _fill_tables(p, grouped, assign_blocks(p, blocks))
    return label, st, check_membership(st, combo, cap)


def _exhaustive_chunk(task: tuple[int, int, int, int, int]) -> tuple:
    b, k, lo, hi, cap = task
    p = Params(b)
    m = p.universe_size
    hist = [0] * len(_CASE_ORDER)
    failures: list[Failure] = []
    subsets = queries = failures_total = violations = 0
    for combo in islice(combinations(range(m), k), lo, hi):
        label, _, res = _check_one_subset(p, combo, cap)
        hist[_CASE_INDEX[label]] += 1
        subsets += 1
        queries += res.queries
        failures_total += res.failures_total
        violations += res.trace_violations
        if res.failures and len(failures) < cap:
            failures.extend(res.failures[: cap - len(failures)])
    return subsets, queries, failures, failures_total, hist, violations


def _random_chunk(task: tuple[int, int, int, int, int, int]) -> tuple:
    b, n, seed, lo, hi, cap = task
    p = Params(b)
    m = p.universe_size
    hist = [0] * len(_CASE_ORDER)
    failures: list[Failure] = []
    subsets = queries = failures_total = violations = 0
    full = b <= FULL_CHECK_MAX_B
    for t in range(lo, hi):
        combo = draw_subset(seed, t, n, m)
        if full:
            label, _, res = _check_one_subset(p, combo, cap)
        else:
            members = [element_from_ordinal(p, v) for v in combo]
            grouped = group_members(p, members)
            blocks = sorted(grouped)
            label = classify(p, blocks)
            st = _fill_tables(p, grouped, assign_blocks(p, blocks))
            mem = frozenset(combo)
            probes = list(combo) + _draw_nonmembers(
                seed, t, NONMEMBER_PROBES, m, mem
            )
            res = check_sampled(st, combo, probes, cap)
        hist[_CASE_INDEX[label]] += 1
        subsets += 1
        queries += res.queries
        failures_total += res.failures_total
        violations += res.trace_violations
        if res.failures and len(failures) < cap:
            failures.extend(res.failures[: cap - len(failures)])
    return subsets, queries, failures, failures_total, hist, violations


def _run_tasks(worker, tasks: list, jobs: int) -> list:
    if jobs > 1 and len(tasks) > 1:
        try:
            ctx = multiprocessing.get_context("fork")
        except ValueError:
            ctx = multiprocessing.get_context()
        with ctx.Pool(min(jobs, len(tasks))) as pool:
            return pool.map(worker, tasks)
    return [worker(t) for t in tasks]


def verify_exhaustive(
    b: int,
    max_n: int = MAX_MEMBERS,
    *,
    jobs: int = 1,
    failure_cap: int = 32,
    max_queries: int = DEFAULT_MAX_QUERIES,
) -> VerifyReport:
    """Check every subset of size <= max_n against every universe element.

    Subsets are enumerated by size, then lexicographically by sorted
    ordinals.  Refuses runs whose estimated probe count exceeds max_queries;
    raise the limit explicitly to force a large run.
    """
    p = Params(b)
    if not 0 <= max_n <= MAX_MEMBERS:
        raise ValueError(f"max_n must be in [0, {MAX_MEMBERS}], got {max_n}")
    if failure_cap < 1:
        raise ValueError("failure_cap must be >= 1")
    m = p.universe_size
    total_subsets = sum(math.comb(m, k) for k in range(max_n + 1))
    estimate = total_subsets * m
    if estimate > max_queries:
        raise FeasibilityError(
            f"exhaustive verification of b={b}, max_n={max_n} needs "
            f"{total_subsets} subsets x {m} queries = {estimate} probes, "
            f"over the limit of {max_queries}; pass a larger max_queries "
            f"to force it"
        )
    chunk = max(1000, total_subsets // (max(jobs, 1) * 8) + 1)
    tasks = []
    for k in range(max_n + 1):
        count = math.comb(m, k)
        for lo in range(0, count, chunk):
            tasks.append((b, k, lo, min(lo + chunk, count), failure_cap))
    start = time.perf_counter()
    partials = _run_tasks(_exhaustive_chunk, tasks, jobs)
    return _merge(b, partials, failure_cap, time.perf_counter() - start)


def verify_random(
    b: int,
    trials: int,
    seed: int,
    n: int = MAX_MEMBERS,
    *,
    jobs: int = 1,
    failure_cap: int = 32,
) -> VerifyReport:
    """Check seeded uniform n-subsets; same seed gives the same report.

    For b <= 4 every universe element is checked per subset; for larger b
    the members plus 10,000 seeded non-members are checked.
    """
    p = Params(b)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= n <= MAX_MEMBERS:
        raise ValueError(f"n must be in [0, {MAX_MEMBERS}], got {n}")
    if n > p.universe_size:
        raise ValueError(f"n={n} exceeds universe size {p.universe_size}")
    if failure_cap < 1:
        raise ValueError("failure_cap must be >= 1")
    chunk = max(100, trials // (max(jobs, 1) * 8) + 1)
    tasks = [
        (b, n, seed, lo, min(lo + chunk, trials), failure_cap)
        for lo in range(0, trials, chunk)
    ]
    start = time.perf_counter()
    partials = _run_tasks(_random_chunk, tasks, jobs)
    return _merge(b, partials, failure_cap, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Space accounting.


class SpaceRow(NamedTuple):
    b: int
    a_bits: int
    b_bits: int
    c_bits: int
    total_bits: int
    ratio: float


def space_audit(b_values: Iterable[int]) -> list[SpaceRow]:
    """Exact table sizes and the total/b**5 ratio for each b."""
    from .tables import size_a, size_b, size_c

    rows = []
    for b in b_values:
        p = Params(b)
        a, bb, c = size_a(p), size_b(p), size_c(p)
        total = a + bb + c
        rows.append(SpaceRow(b, a, bb, c, total, total / p.num_blocks))
    return rows


# ---------------------------------------------------------------------------
# Fault injection.


class FlipOutcome(NamedTuple):
    structure_index: int
    subset: tuple[int, ...]
    table: str
    position: int
    detected: bool


@dataclass
class FlipAuditReport:
    """Single-bit fault sensitivity of seeded built structures.

    Every flip is checked against all universe elements, so an undetected
    flip is proven harmless: no query answer changes at all.  Such flips
    are reported in `harmless`, never silently passed.
    """

    b: int
    structures: int
    flips: int
    detected: int
    harmless: int
    harmless_examples: list[FlipOutcome] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def detection_rate(self) -> float:
        changing = self.flips - self.harmless
        return 1.0 if changing == 0 else self.detected / changing


def _flip_detected(st: Structure, mem: frozenset[int]) -> bool:
    elems = _element_table(st.params.b)
    for n in range(st.params.universe_size):
        got, _ = query(st, elems[n])
        if got != (n in mem):
            return True
    return False


def audit_bit_flips(
    b: int,
    structures: int = 100,
    seed: int = 0,
    *,
    example_cap: int = 64,
) -> FlipAuditReport:
    """Flip every bit of seeded built structures and test detectability.

    Structure t stores a seeded subset whose size cycles through 0..4.
    Each single-bit flip either changes some query answer (detected) or is
    proven harmless by the full sweep.
    """
    p = Params(b)
    if structures < 1:
        raise ValueError(f"structures must be >= 1, got {structures}")
    from .scheme import build_from_ordinals

    m = p.universe_size
    report = FlipAuditReport(b, structures, 0, 0, 0)
    start = time.perf_counter()
    for t in range(structures):
        size_stream = _trial_stream(seed, t, _FLIP_SALT)
        k = _draw_below(size_stream, MAX_MEMBERS + 1)
        subset = draw_subset(seed, t, k, m)
        st = build_from_ordinals(p, subset)
        mem = frozenset(subset)
        for name, table in (("A", st.table_a), ("B", st.table_b), ("C", st.table_c)):
            for pos in range(table.nbits):
                table.flip(pos)
                detected = _flip_detected(st, mem)
                table.flip(pos)
                report.flips += 1
                if detected:
                    report.detected += 1
                else:
                    report.harmless += 1
                    if len(report.harmless_examples) < example_cap:
                        report.harmless_examples.append(
                            FlipOutcome(t, subset, name, pos, False)
                        )
    report.elapsed = time.perf_counter() - start
    return report
