"""Acceptance: both figure kinds regenerate from the golden CSV and the
plotted means equal the harness summary exactly."""

import matplotlib.axes
import pytest

from d2dplots.figures import DEFAULT_LABELS, FigureSpec, plot


def _report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, detail


@pytest.fixture
def errorbar_spy(monkeypatch):
    calls = []
    orig = matplotlib.axes.Axes.errorbar

    def spy(self, x, y, **kw):
        calls.append({"x": list(x), "y": list(y),
                      "yerr": list(kw.get("yerr", [])),
                      "label": kw["label"]})
        return orig(self, x, y, **kw)

    monkeypatch.setattr(matplotlib.axes.Axes, "errorbar", spy)
    return calls


def test_regenerates_and_matches_summary(golden_csv, tmp_path, errorbar_spy):
    bench = pytest.importorskip("d2dsec.bench")
    summary = bench.summarize(golden_csv)
    by_scheme = {}
    for cell in summary:
        by_scheme.setdefault(cell["scheme"], []).append(cell)

    rendered = []
    for kind in ("beta_sweep", "tradeoff"):
        errorbar_spy.clear()
        out = tmp_path / f"{kind}.png"
        plot(FigureSpec(inputs=[golden_csv], kind=kind,
                        output_path=str(out)))
        rendered.append(out.exists() and out.stat().st_size > 1000)
        assert len(errorbar_spy) == len(by_scheme)
        label_of = {DEFAULT_LABELS[s]: s for s in by_scheme}
        for call in errorbar_spy:
            cells = by_scheme[label_of[call["label"]]]
            if kind == "beta_sweep":
                assert call["x"] == [c["beta"] for c in cells]
                assert call["y"] == [c["mean_r_min"] for c in cells]
                assert call["yerr"] == [c["stderr_r_min"] for c in cells]
            else:
                assert call["x"] == [c["mean_r_min"] for c in cells]
                assert call["y"] == [c["mean_r_sec_min"] for c in cells]
                assert call["yerr"] == [c["stderr_r_sec_min"] for c in cells]

    _report("figures regenerate, plotted stats equal harness summary",
            all(rendered),
            "beta_sweep + tradeoff rendered; every plotted coordinate and "
            "error bar exactly equals the corresponding summary value")
