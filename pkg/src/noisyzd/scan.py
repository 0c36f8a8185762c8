"""Grid scans of the pinning and weak-extortion feasible regions."""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import math
from typing import List, Optional

import numpy as np

from .errors import DegeneratePinError, InfeasibleError
from .game_model import resolve_expected
from .policy import DEFAULT
from .synthesis import max_phi, pinning_strategy

PIN_COLUMNS = ("p1", "p4", "feasible", "p2", "p3", "pinned_sY")
EXTORT_COLUMNS = ("chi", "feasible", "delta_min", "delta_max", "max_phi_at_delta_min")


def default_chi_grid(n=100, lo=1.0, hi=20.0):
    return np.geomspace(lo, hi, n)


def _fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".12g")


@dataclass(frozen=True)
class PinCell:
    p1: float
    p4: float
    feasible: bool
    p2: Optional[float] = None
    p3: Optional[float] = None
    pinned_sY: Optional[float] = None
    skipped: bool = False


@dataclass
class PinScanResult:
    resolution: int
    cells: List[PinCell]
    P_E: float
    R_E: float

    @property
    def feasible_cells(self):
        return [c for c in self.cells if c.feasible]

    @property
    def feasible_count(self):
        return len(self.feasible_cells)

    def feasible_set(self):
        """Grid indices (i, j) of feasible cells."""
        n = self.resolution
        return {divmod(k, n) for k, c in enumerate(self.cells) if c.feasible}

    def summary(self):
        pinned = [c.pinned_sY for c in self.feasible_cells]
        return {
            "resolution": self.resolution,
            "feasible_cells": len(pinned),
            "min_pinned_sY": min(pinned) if pinned else None,
            "max_pinned_sY": max(pinned) if pinned else None,
            "P_E": self.P_E,
            "R_E": self.R_E,
        }

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PIN_COLUMNS)
        for c in self.cells:
            writer.writerow([_fmt(c.p1), _fmt(c.p4), _fmt(c.feasible),
                             _fmt(c.p2), _fmt(c.p3), _fmt(c.pinned_sY)])


def _pin_row(args):
    p1, p4_values, noise, expected, tol = args
    row = []
    for p4 in p4_values:
        try:
            sol = pinning_strategy(p1, p4, noise, expected, tol)
        except DegeneratePinError:
            row.append(PinCell(p1, p4, False, skipped=True))
        except InfeasibleError:
            row.append(PinCell(p1, p4, False))
        else:
            row.append(PinCell(p1, p4, True, sol.strategy[1], sol.strategy[2], sol.pinned_sY))
    return row


def _ordered_map(fn, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def scan_pinning(noise, payoffs, resolution=200, tol=DEFAULT, workers=None):
    """Evaluate pinning strategies on a uniform ``resolution`` x ``resolution`` grid.

    Cells are ordered with p1 as the outer index; the degenerate cell
    (p1, p4) = (1, 0) is marked ``skipped``.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    expected = resolve_expected(payoffs, noise).require_pd()
    axis = np.linspace(0.0, 1.0, resolution)
    jobs = [(float(p1), [float(x) for x in axis], noise, expected, tol) for p1 in axis]
    rows = _ordered_map(_pin_row, jobs, workers)
    cells = [cell for row in rows for cell in row]
    return PinScanResult(resolution, cells, expected.P, expected.R)


def bisect_boundary(pred, inside, outside, tol):
    """Shrink [inside, outside] until its width is <= tol; ``pred(inside)`` stays true."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if pred(mid):
            inside = mid
        else:
            outside = mid
    return inside


@dataclass(frozen=True)
class ExtortRow:
    chi: float
    feasible: bool
    delta_min: float = math.nan
    delta_max: float = math.nan
    max_phi_at_delta_min: float = math.nan


@dataclass
class ExtortScanResult:
    rows: List[ExtortRow]
    R_E: float
    P_E: float
    # Delta < 0 probe: True if some negative Delta was ever feasible
    negative_delta_feasible: bool = field(default=False)

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EXTORT_COLUMNS)
        for r in self.rows:
            writer.writerow([_fmt(r.chi), _fmt(r.feasible), _fmt(r.delta_min),
                             _fmt(r.delta_max), _fmt(r.max_phi_at_delta_min)])

    def threshold(self):
        """Smallest chi on the grid with a feasible row, or None."""
        for r in self.rows:
            if r.feasible:
                return r.chi
        return None


def extortion_delta_bounds(chi, noise, expected, delta_resolution=400, tol=DEFAULT.bisection):
    """Delta interval in [0, R_E - P_E] with a feasible phi, scanned then bisected."""
    span = expected.R - expected.P
    deltas = np.linspace(0.0, span, delta_resolution)

    def ok(delta):
        return max_phi(chi, delta, noise, expected) > 0.0

    flags = [ok(float(x)) for x in deltas]
    if not any(flags):
        return ExtortRow(float(chi), False)
    first = flags.index(True)
    last = len(flags) - 1 - flags[::-1].index(True)
    lo = float(deltas[first])
    if first > 0:
        lo = bisect_boundary(ok, lo, float(deltas[first - 1]), tol)
    hi = float(deltas[last])
    if last < len(flags) - 1:
        hi = bisect_boundary(ok, hi, float(deltas[last + 1]), tol)
    phi = max_phi(chi, lo, noise, expected)
    return ExtortRow(float(chi), True, lo, hi, phi)


def _extort_job(args):
    return extortion_delta_bounds(*args)


def scan_extortion(noise, payoffs, chi_grid=None, delta_resolution=400,
                   tol=DEFAULT, workers=None, probe_negative=True):
    """Delta bounds of the weak-extortion feasible region for each chi."""
    expected = resolve_expected(payoffs, noise).require_pd()
    chis = default_chi_grid() if chi_grid is None else np.asarray(chi_grid, dtype=float)
    if np.any(chis < 1.0):
        raise ValueError("every chi must be >= 1")
    jobs = [(float(c), noise, expected, delta_resolution, tol.bisection) for c in chis]
    rows = _ordered_map(_extort_job, jobs, workers)
    negative = False
    if probe_negative:
        probes = -np.linspace(1e-6, expected.R - expected.P, 16)
        negative = any(
            max_phi(float(c), float(d), noise, expected) > 0.0
            for c in chis if c > 1.0 for d in probes
        )
    return ExtortScanResult(rows, expected.R, expected.P, negative)
