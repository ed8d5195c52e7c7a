"""Results-CSV reading and per-(scheme, beta) aggregation.

The statistics here are the plotting-side mirror of the harness's
`summarize`: mean and standard error (ddof=1) over non-failed trials,
failed trials counted into failure_rate only. Plots never recompute
statistics differently from the summary tool.
"""

import csv

import numpy as np

CSV_HEADER = ["scheme", "beta", "trial", "seed", "r_min", "r_sec_min",
              "iterations", "status", "wall_time_s"]


def read_rows(csv_path) -> list:
    """Parse one results CSV into a list of dicts with typed fields."""
    with open(csv_path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(
                f"{csv_path}: unexpected CSV header {reader.fieldnames}, "
                f"expected {CSV_HEADER}")
        rows = []
        for rec in reader:
            rows.append({
                "scheme": rec["scheme"],
                "beta": float(rec["beta"]),
                "r_min": float(rec["r_min"]),
                "r_sec_min": float(rec["r_sec_min"]),
                "status": rec["status"],
            })
    return rows


def aggregate(csv_path) -> list:
    """Mean/stderr per (scheme, beta) cell, excluding failed trials.

    Returns dicts sorted by (scheme, beta) with keys scheme, beta, n,
    mean_r_min, stderr_r_min, mean_r_sec_min, stderr_r_sec_min,
    failure_rate.
    """
    cells = {}
    for r in read_rows(csv_path):
        cells.setdefault((r["scheme"], r["beta"]), []).append(r)
    out = []
    for scheme, beta in sorted(cells):
        group = cells[(scheme, beta)]
        ok = [r for r in group if r["status"] != "failed"]
        r_min = np.array([r["r_min"] for r in ok])
        r_sec = np.array([r["r_sec_min"] for r in ok])
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
