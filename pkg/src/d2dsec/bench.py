"""Monte Carlo benchmark harness with paired seeding and CSV output."""

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import generate_realization
from .config import SystemConfig
from .optimizer import SchemeId, run

CSV_HEADER = ["scheme", "beta", "trial", "seed", "r_min", "r_sec_min",
              "iterations", "status", "wall_time_s"]

# distinct sub-stream for scheme-internal randomness (RandomD2D phases)
_SCHEME_STREAM = 7919


@dataclass
class ExperimentSpec:
    base: SystemConfig
    beta_grid: list
    schemes: list
    n_trials: int
    seed0: int
    output_path: str

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not self.beta_grid or sorted(self.beta_grid) != list(self.beta_grid):
            raise ValueError("beta_grid must be nonempty and sorted")
        self.schemes = [SchemeId(s) if not isinstance(s, SchemeId) else s
                        for s in self.schemes]


@dataclass
class ResultRow:
    scheme: str
    beta: float
    trial: int
    seed: int
    r_min: float
    r_sec_min: float
    iterations: int
    status: str
    wall_time_s: float


def _fmt(x):
    return f"{x:.9g}"


def _run_trial(spec: ExperimentSpec, trial: int) -> list:
    """All (scheme, beta) rows of one channel realization.

    Realization r uses seed0 + r, so every scheme and every beta sees the
    identical channels (paired comparison).
    """
    seed = spec.seed0 + trial
    ch = generate_realization(spec.base, seed=seed)
    rows = []
    want_random = SchemeId.RANDOM_D2D in spec.schemes
    for bi, beta in enumerate(spec.beta_grid):
        cfg = replace(spec.base, beta=float(beta), seed=seed)
        nod2d_point = None
        nod2d_cache = {}
        if SchemeId.NO_D2D in spec.schemes or want_random:
            t0 = time.perf_counter()
            point, trace, rep = run(ch, cfg, SchemeId.NO_D2D)
            nod2d_cache = {"row": _make_row(SchemeId.NO_D2D, beta, trial, seed,
                                            trace, rep, time.perf_counter() - t0)}
            nod2d_point = point
        for scheme in spec.schemes:
            if scheme == SchemeId.NO_D2D:
                rows.append(nod2d_cache["row"])
                continue
            rng = np.random.default_rng([spec.seed0 + trial, _SCHEME_STREAM, bi])
            t0 = time.perf_counter()
            point, trace, rep = run(ch, cfg, scheme, rng=rng,
                                    nod2d_point=nod2d_point)
            rows.append(_make_row(scheme, beta, trial, seed, trace, rep,
                                  time.perf_counter() - t0))
    return rows


def _make_row(scheme, beta, trial, seed, trace, rep, wall) -> ResultRow:
    failed = trace.status == "failed"
    return ResultRow(scheme=scheme.value, beta=float(beta), trial=trial,
                     seed=seed,
                     r_min=float("nan") if failed else rep.R_min,
                     r_sec_min=float("nan") if failed else rep.R_sec_min,
                     iterations=trace.iterations_used, status=trace.status,
                     wall_time_s=wall)


def run_experiment(spec: ExperimentSpec, parallel: int = 1) -> list:
    """Run all trials and write the CSV; returns the rows in trial order."""
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            per_trial = list(pool.map(_run_trial, [spec] * spec.n_trials,
                                      range(spec.n_trials)))
    else:
        per_trial = [_run_trial(spec, r) for r in range(spec.n_trials)]

    rows = [row for trial_rows in per_trial for row in trial_rows]
    with open(spec.output_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.scheme, _fmt(r.beta), r.trial, r.seed,
                        _fmt(r.r_min), _fmt(r.r_sec_min), r.iterations,
                        r.status, _fmt(r.wall_time_s)])
    return rows


def read_rows(csv_path) -> list:
    with open(csv_path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        out = []
        for rec in reader:
            out.append(ResultRow(scheme=rec["scheme"], beta=float(rec["beta"]),
                                 trial=int(rec["trial"]), seed=int(rec["seed"]),
                                 r_min=float(rec["r_min"]),
                                 r_sec_min=float(rec["r_sec_min"]),
                                 iterations=int(rec["iterations"]),
                                 status=rec["status"],
                                 wall_time_s=float(rec["wall_time_s"])))
        return out


def summarize(csv_path) -> list:
    """Aggregate mean/stderr per (scheme, beta), excluding failed trials."""
    rows = read_rows(csv_path)
    cells = {}
    for r in rows:
        cells.setdefault((r.scheme, r.beta), []).append(r)
    out = []
    for (scheme, beta) in sorted(cells, key=lambda c: (c[0], c[1])):
        group = cells[(scheme, beta)]
        ok = [r for r in group if r.status != "failed"]
        r_min = np.array([r.r_min for r in ok])
        r_sec = np.array([r.r_sec_min for r in ok])
        n = len(ok)
        out.append({
            "scheme": scheme,
            "beta": beta,
            "n": n,
            "mean_r_min": float(r_min.mean()) if n else float("nan"),
            "stderr_r_min": float(r_min.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0,
            "mean_r_sec_min": float(r_sec.mean()) if n else float("nan"),
            "stderr_r_sec_min": float(r_sec.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0,
            "failure_rate": 1.0 - n / len(group),
        })
    return out
