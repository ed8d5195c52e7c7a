"""Figure generation for the benchmark results CSVs.

Consumes only the results-CSV contract of the benchmark harness:
columns scheme,beta,trial,seed,r_min,r_sec_min,iterations,status,wall_time_s.
"""

from .data import CSV_HEADER, aggregate, read_rows
from .figures import KINDS, FigureSpec, plot

__all__ = ["CSV_HEADER", "FigureSpec", "KINDS", "aggregate", "plot",
           "read_rows"]
