"""Maximal GWI values along the mixed-state families rho1..rho4 (figure data).

Each grid point is optimized with fresh random restarts plus a warm start from
the previous point's optimum; a backward pass then re-seeds every point from
its successor and keeps whichever is better.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .inequalities import gwi_headline
from .optimizer import OptConfig, maximize_violation
from .states import FAMILIES, mixed_family

SWEEP_RESTARTS = 12
CSV_COLUMNS = ("family", "kind", "q", "p", "w_max")


def default_grid(points=51):
    if points < 2:
        raise InputError("a sweep grid needs at least two points")
    return list(np.linspace(0.0, 1.0, points))


@dataclass(frozen=True)
class SweepPoint:
    p: float
    w_max: float
    settings: object


@dataclass
class SweepSeries:
    family: str
    kind: str
    q: object
    points: list = field(default_factory=list)

    @property
    def ps(self):
        return np.array([pt.p for pt in self.points])

    @property
    def values(self):
        return np.array([pt.w_max for pt in self.points])

    def to_json(self):
        return {
            "family": self.family,
            "kind": self.kind,
            "q": self.q,
            "points": [{"p": pt.p, "w_max": pt.w_max, "settings": pt.settings.to_json()} for pt in self.points],
        }


def _check_grid(grid):
    g = [float(p) for p in grid]
    if any(not (0.0 <= p <= 1.0) for p in g):
        raise InputError("grid values must lie in [0, 1]")
    if any(b <= a for a, b in zip(g, g[1:])):
        raise InputError("grid must be strictly increasing")
    return g


def sweep(family, kind, q=None, grid=None, config=None):
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}")
    if family == "rho4" and q is None:
        raise InputError("rho4 sweeps need q")
    grid = _check_grid(default_grid() if grid is None else grid)
    cfg = config or OptConfig(restarts=SWEEP_RESTARTS)
    spec = gwi_headline()
    states = [mixed_family(family, p, q) for p in grid]

    results = []
    for n, rho in enumerate(states):
        seeds = [results[-1].best_settings] if results else []
        results.append(maximize_violation(spec, kind, rho, cfg, seeds=seeds))

    warm = cfg.replace(restarts=0)
    for n in range(len(states) - 2, -1, -1):
        back = maximize_violation(spec, kind, states[n], warm, seeds=[results[n + 1].best_settings])
        if back.best_value > results[n].best_value:
            results[n] = back

    q_out = float(q) if family == "rho4" else None
    points = [SweepPoint(p, r.best_value, r.best_settings) for p, r in zip(grid, results)]
    return SweepSeries(family, kind, q_out, points)


def write_csv(series_list, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for s in series_list:
            for pt in s.points:
                w.writerow([s.family, s.kind, "" if s.q is None else repr(s.q), repr(pt.p), repr(pt.w_max)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(series_list, path):
    with open(path, "w") as fh:
        json.dump({"series": [s.to_json() for s in series_list]}, fh, indent=2)


# --- analysis ------------------------------------------------------------------

def violation_mask(series, tol=1e-9):
    return series.values > tol


def violation_region(series, tol=1e-9):
    """Grid values of p where the GWI is violated (w_max > tol)."""
    return series.ps[violation_mask(series, tol)]


def is_contiguous(mask):
    idx = np.flatnonzero(mask)
    return len(idx) > 0 and bool(np.all(np.diff(idx) == 1))


def affine_residual(ps, values):
    """Max absolute residual of the least-squares line through (ps, values)."""
    ps = np.asarray(ps, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(ps) < 3:
        return 0.0
    slope, intercept = np.polyfit(ps, values, 1)
    return float(np.max(np.abs(values - (slope * ps + intercept))))


def residual_above_threshold(series, tol=1e-9):
    mask = violation_mask(series, tol)
    return affine_residual(series.ps[mask], series.values[mask])
