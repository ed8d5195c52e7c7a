"""Figure rendering: leakage-cap sweep and secrecy/rate trade-off."""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .data import aggregate  # noqa: E402

KINDS = ("beta_sweep", "tradeoff")

DEFAULT_LABELS = {
    "proposed_d2d": "Proposed D2D",
    "no_d2d": "No D2D",
    "random_d2d": "Random D2D",
}

_MARKERS = ["o", "s", "^", "d", "v", "*"]


@dataclass
class FigureSpec:
    inputs: list                      # one results CSV per configuration
    kind: str                         # beta_sweep | tradeoff
    output_path: str
    labels: dict = field(default_factory=lambda: dict(DEFAULT_LABELS))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _curves(spec: FigureSpec) -> list:
    """(label, cells ascending in beta) per (input CSV, scheme), data only."""
    curves = []
    for path in spec.inputs:
        table = [c for c in aggregate(path) if c["n"] > 0]
        stem = Path(path).stem
        for scheme in sorted({c["scheme"] for c in table}):
            cells = sorted((c for c in table if c["scheme"] == scheme),
                           key=lambda c: c["beta"])
            label = spec.labels.get(scheme, scheme)
            if len(spec.inputs) > 1:
                label = f"{label} ({stem})"
            curves.append((label, cells))
    if not curves:
        raise ValueError("no plottable data after filtering failed trials")
    return curves


def plot(spec: FigureSpec) -> str:
    """Render the figure; returns the output path.

    beta_sweep: mean minimum rate vs leakage cap, one error-bar curve per
    scheme (and per input CSV when several are given). tradeoff: mean
    minimum secrecy rate vs mean minimum rate, points connected in
    ascending beta. Raises before writing anything if the data is empty.
    """
    curves = _curves(spec)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for i, (label, cells) in enumerate(curves):
        marker = _MARKERS[i % len(_MARKERS)]
        if spec.kind == "beta_sweep":
            ax.errorbar([c["beta"] for c in cells],
                        [c["mean_r_min"] for c in cells],
                        yerr=[c["stderr_r_min"] for c in cells],
                        marker=marker, capsize=3, label=label)
        else:
            ax.errorbar([c["mean_r_min"] for c in cells],
                        [c["mean_r_sec_min"] for c in cells],
                        xerr=[c["stderr_r_min"] for c in cells],
                        yerr=[c["stderr_r_sec_min"] for c in cells],
                        marker=marker, capsize=3, label=label)
    if spec.kind == "beta_sweep":
        ax.set_xlabel(r"leakage cap $\beta$ [bits]")
        ax.set_ylabel(r"mean $R_{\min}$ [bits]")
    else:
        ax.set_xlabel(r"mean $R_{\min}$ [bits]")
        ax.set_ylabel(r"mean $R_{\mathrm{sec},\min}$ [bits]")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)
    return spec.output_path
