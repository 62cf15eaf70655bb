import math

import pytest

from bitprobe4.geometry import Params
from bitprobe4.oracle import (
    FeasibilityError,
    audit_bit_flips,
    check_membership,
    draw_subset,
    space_audit,
    splitmix64_stream,
    verify_exhaustive,
    verify_random,
)
from bitprobe4.scheme import CaseLabel, build_from_ordinals


def report_key(report):
    """Everything that must be deterministic (elapsed time is not)."""
    return (
        report.b,
        report.subsets_checked,
        report.queries_checked,
        report.failures,
        report.failures_total,
        report.case_histogram,
        report.trace_violations,
    )


class TestCheckMembership:
    def test_clean_structure_passes(self):
        st = build_from_ordinals(Params(2), [3, 17])
        res = check_membership(st, [3, 17])
        assert res.failures_total == 0 and res.trace_violations == 0
        assert res.queries == 64

    def test_flipped_bit_is_caught(self):
        st = build_from_ordinals(Params(2), [3, 17])
        st.table_b.flip(0)
        st.table_c.flip(12)
        res = check_membership(st, [3, 17])
        assert res.failures_total >= 1
        first = res.failures[0]
        assert len(first.trace) == 2 and first.trace[0][0] == "A"

    def test_failure_cap(self):
        st = build_from_ordinals(Params(2), [])
        for pos in range(st.table_b.nbits):
            st.table_b[pos] = 1
        res = check_membership(st, [], cap=5)
        assert len(res.failures) == 5
        assert res.failures_total > 5


class TestVerifyExhaustive:
    def test_singletons(self):
        report = verify_exhaustive(2, max_n=1)
        assert report.subsets_checked == 65
        assert report.queries_checked == 65 * 64
        assert report.failures_total == 0
        assert report.verdict == "PASS"
        assert report.case_histogram[CaseLabel.FEWER_THAN_4_BLOCKS] == 65

    def test_pairs_parallel_matches_serial(self):
        serial = verify_exhaustive(2, max_n=2, jobs=1)
        parallel = verify_exhaustive(2, max_n=2, jobs=2)
        assert report_key(serial) == report_key(parallel)
        assert serial.subsets_checked == 1 + 64 + math.comb(64, 2)

    def test_refuses_infeasible(self):
        with pytest.raises(FeasibilityError, match="subsets"):
            verify_exhaustive(9)
        with pytest.raises(FeasibilityError):
            verify_exhaustive(3, max_n=4)

    def test_override_allows_more(self):
        # b=3 singletons are far below any limit; force a tiny limit to be
        # sure the guard keys off the override value
        with pytest.raises(FeasibilityError):
            verify_exhaustive(2, max_n=1, max_queries=10)
        report = verify_exhaustive(3, max_n=1)
        assert report.subsets_checked == 730

    def test_rejects_bad_max_n(self):
        with pytest.raises(ValueError):
            verify_exhaustive(2, max_n=5)


class TestVerifyRandom:
    def test_reproducible(self):
        first = verify_random(3, trials=200, seed=1)
        second = verify_random(3, trials=200, seed=1, jobs=2)
        assert report_key(first) == report_key(second)
        assert first.verdict == "PASS"
        assert first.queries_checked == 200 * 729

    def test_seed_changes_draws(self):
        assert draw_subset(1, 0, 4, 729) != draw_subset(2, 0, 4, 729)

    def test_draws_are_sorted_distinct(self):
        for t in range(50):
            s = draw_subset(9, t, 4, 64)
            assert list(s) == sorted(set(s)) and len(s) == 4

    def test_sampled_mode_above_b4(self):
        report = verify_random(5, trials=2, seed=3)
        assert report.queries_checked == 2 * (4 + 10_000)
        assert report.verdict == "PASS"

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError):
            verify_random(2, trials=0, seed=1)

    def test_splitmix_reference_values(self):
        # splitmix64 of seed 0: first outputs per the reference algorithm
        stream = splitmix64_stream(0)
        assert next(stream) == 0xE220A8397B1DCDAF
        assert next(stream) == 0x6E789E6AA1B965F4


class TestSpaceAudit:
    def test_spot_rows(self):
        rows = {row.b: row for row in space_audit(range(2, 17))}
        assert rows[2][1:] == (32, 34, 32, 98, 98 / 32)
        assert rows[4][1:] == (1024, 856, 1024, 2904, 2904 / 1024)
        # 2097152 + 620416 bits over b**5 = 1048576, just under 2.6
        assert rows[16].ratio == pytest.approx(2717568 / 1048576)
        assert rows[16].ratio < 3.0

    def test_ratio_decreasing_and_bounded(self):
        rows = space_audit(range(2, 17))
        ratios = [row.ratio for row in rows]
        assert all(r <= 3.1 for r in ratios)
        assert all(earlier > later for earlier, later in zip(ratios, ratios[1:]))

    def test_rejects_bad_b(self):
        with pytest.raises(ValueError):
            space_audit([1])


class TestReportFormats:
    def test_csv_layout(self):
        report = verify_exhaustive(2, max_n=1)
        lines = report.to_csv().splitlines()
        assert lines[0] == "b,subsets,queries,failures,seconds"
        assert lines[1].startswith("2,65,4160,0,")
        assert lines[2] == "label,count"
        assert "FEWER_THAN_4_BLOCKS,65" in lines
        assert len(lines) == 3 + len(CaseLabel)

    def test_text_verdict(self):
        report = verify_exhaustive(2, max_n=1)
        text = report.to_text()
        assert "verdict: PASS" in text
        assert "failures=0" in text


class TestFlipAudit:
    def test_small_audit_accounts_for_every_flip(self):
        report = audit_bit_flips(2, structures=5, seed=0)
        assert report.flips == 5 * 98
        assert report.detected + report.harmless == report.flips
        assert report.detection_rate == 1.0
        if report.harmless:
            assert report.harmless_examples

    def test_harmless_flips_on_empty_structure(self):
        # seed 0, trial 0 draws the empty subset: every element probes table
        # B, so flipping any A or C bit cannot change an answer, while every
        # one of the 34 B-bit flips must be caught
        report = audit_bit_flips(2, structures=1, seed=0)
        assert report.harmless_examples[0].subset == ()
        assert report.harmless == 64
        assert report.detected == 34

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            audit_bit_flips(2, structures=0)
