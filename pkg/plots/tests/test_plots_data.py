import csv

import numpy as np
import pytest

from d2dplots.data import CSV_HEADER, aggregate, read_rows


class TestReadRows:
    def test_round_trip(self, golden_csv):
        rows = read_rows(golden_csv)
        assert len(rows) == 36
        assert {r["scheme"] for r in rows} == {"proposed_d2d", "no_d2d",
                                               "random_d2d"}

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            read_rows(p)


class TestAggregate:
    def test_mean_and_stderr(self, golden_csv):
        cells = {(c["scheme"], c["beta"]): c for c in aggregate(golden_csv)}
        vals = [0.41, 0.38, 0.43]
        cell = cells[("proposed_d2d", 0.1)]
        assert cell["n"] == 3
        assert cell["mean_r_min"] == pytest.approx(np.mean(vals))
        assert cell["stderr_r_min"] == pytest.approx(
            np.std(vals, ddof=1) / np.sqrt(3))
        assert cell["failure_rate"] == 0.0

    def test_failed_rows_excluded(self, golden_csv):
        cell = {(c["scheme"], c["beta"]): c
                for c in aggregate(golden_csv)}[("random_d2d", 0.1)]
        assert cell["n"] == 2
        assert cell["mean_r_min"] == pytest.approx(np.mean([0.33, 0.30]))
        assert cell["failure_rate"] == pytest.approx(1.0 / 3.0)

    def test_sorted_by_scheme_then_beta(self, golden_csv):
        keys = [(c["scheme"], c["beta"]) for c in aggregate(golden_csv)]
        assert keys == sorted(keys)

    def test_single_row_cell(self, tmp_path):
        p = tmp_path / "one.csv"
        with open(p, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(CSV_HEADER)
            w.writerow(["no_d2d", "0.5", 0, 7, "0.42", "0.1", 9,
                        "converged", "1.0"])
        (cell,) = aggregate(p)
        assert cell["mean_r_min"] == pytest.approx(0.42)
        assert cell["stderr_r_min"] == 0.0


class TestMatchesHarnessSummary:
    def test_identical_to_summarize(self, golden_csv):
        # the plotting aggregation must equal the harness's summary exactly
        bench = pytest.importorskip("d2dsec.bench")
        theirs = bench.summarize(golden_csv)
        ours = aggregate(golden_csv)
        assert len(ours) == len(theirs)
        for a, b in zip(ours, theirs):
            assert a == b
