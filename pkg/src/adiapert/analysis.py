"""Small fitting helpers shared by the sweep command and the acceptance suite."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    stderr: float
    rvalue: float

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol


def loglog_slope(x, y) -> PowerLawFit:
    """Least-squares slope of ``log y`` against ``log x``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if len(x) < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs at least two strictly positive points")
    r = stats.linregress(np.log(x), np.log(y))
    return PowerLawFit(float(r.slope), float(r.intercept), float(r.stderr), float(r.rvalue))


def read_sweep(path, x: str = "T", y: str = "deviation_norm") -> tuple:
    """Columns ``x`` and ``y`` of a sweep CSV as float arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r[x]) for r in rows]), np.array([float(r[y]) for r in rows])
