"""Numerical support routines: integration, regression and summaries.

The integrator exists to cross-check the closed forms in :mod:`.model`
against the differential system itself, so it deliberately stays a plain
fixed-step classical Runge-Kutta scheme instead of an adaptive library
solver: with a known step size its global error is O(step**4) and the
comparison against the analytic solution is a genuine independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import ModelParams, SectorShares, rhs

__all__ = [
    "DegenerateDataError",
    "NoBracketError",
    "Trajectory",
    "QuartileGroup",
    "QuartileStats",
    "HistogramResult",
    "rk4_integrate",
    "ols_fit",
    "pearson_r",
    "quartile_stats",
    "histogram",
    "find_crossing",
]


class DegenerateDataError(ValueError):
    """Sample has no variance (or too few points) for the statistic."""


class NoBracketError(ValueError):
    """Bisection interval does not bracket a sign change."""


@dataclass(frozen=True)
class Trajectory:
    """Integrated path: g_values (n,) and the matching shares (n, 3)."""

    g_values: np.ndarray
    shares: np.ndarray


@dataclass(frozen=True)
class QuartileGroup:
    """Summary of one quartile of the keying variable."""

    size: int
    key_lo: float
    key_hi: float
    u_mean: float
    u_std: float
    v_mean: float
    v_std: float


@dataclass(frozen=True)
class QuartileStats:
    """Four QuartileGroup entries in ascending key order."""

    groups: tuple[QuartileGroup, ...]


@dataclass(frozen=True)
class HistogramResult:
    """Counts per half-open bin [edge_k, edge_k+1), plus out-of-range tallies."""

    counts: np.ndarray
    underflow: int
    overflow: int


def rk4_integrate(
    params: ModelParams,
    g_start: float,
    start: SectorShares,
    g_end: float,
    step: float,
) -> Trajectory:
    """Integrate the transfer system from g_start to g_end.

    Takes whole steps of the given size and one shorter final step when the
    interval is not an exact multiple.  Returns every mesh point including
    both endpoints.  step must be positive and g_end >= g_start.
    """
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step!r}")
    if g_end < g_start:
        raise ValueError(f"g_end {g_end!r} precedes g_start {g_start!r}")

    span = g_end - g_start
    n_full = int(span / step)
    # Guard against a float-roundoff final sliver when span is a multiple.
    remainder = span - n_full * step
    if remainder <= step * 1e-12:
        remainder = 0.0

    g_points = [g_start]
    states = [(start.a, start.i, start.s)]
    a, i, s = start.a, start.i, start.s
    sizes = [step] * n_full + ([remainder] if remainder > 0.0 else [])
    for k, h in enumerate(sizes):
        d1 = rhs(params, SectorShares(a, i, s))
        d2 = rhs(params, SectorShares(a + 0.5 * h * d1[0], i + 0.5 * h * d1[1], s + 0.5 * h * d1[2]))
        d3 = rhs(params, SectorShares(a + 0.5 * h * d2[0], i + 0.5 * h * d2[1], s + 0.5 * h * d2[2]))
        d4 = rhs(params, SectorShares(a + h * d3[0], i + h * d3[1], s + h * d3[2]))
        a += h / 6.0 * (d1[0] + 2.0 * d2[0] + 2.0 * d3[0] + d4[0])
        i += h / 6.0 * (d1[1] + 2.0 * d2[1] + 2.0 * d3[1] + d4[1])
        s += h / 6.0 * (d1[2] + 2.0 * d2[2] + 2.0 * d3[2] + d4[2])
        g = g_end if k == len(sizes) - 1 else g_start + (k + 1) * step
        g_points.append(g)
        states.append((a, i, s))
    return Trajectory(np.array(g_points, dtype=float), np.array(states, dtype=float))


def ols_fit(x, y) -> tuple[float, float, float]:
    """Ordinary least squares line fit.

    Returns (slope, intercept, residual_sum_of_squares).  Raises
    DegenerateDataError when fewer than two points are given or x has zero
    variance; raises ValueError on mismatched lengths.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"x and y must be 1-d of equal length, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise DegenerateDataError(f"need at least 2 points, got {x.size}")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateDataError("x has zero variance")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    return slope, intercept, float(resid @ resid)


def pearson_r(x, y) -> float:
    """Pearson correlation coefficient of two equal-length samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"x and y must be 1-d of equal length, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise DegenerateDataError(f"need at least 2 points, got {x.size}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("zero variance in sample")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    # roundoff can push a perfectly collinear sample a ulp past +/-1
    return float(min(1.0, max(-1.0, r)))


def quartile_stats(key, paired) -> QuartileStats:
    """Quartile summary of two variables keyed by a third.

    Sorts the paired sample (u, v) by key, splits it into four contiguous
    groups (earlier groups take the extra point when the size is not a
    multiple of four) and reports each group's size, key range and the mean
    and population standard deviation of u and v.
    """
    key = np.asarray(key, dtype=float)
    uv = np.asarray(paired, dtype=float)
    if uv.ndim != 2 or uv.shape[1] != 2:
        raise ValueError(f"paired must have shape (n, 2), got {uv.shape}")
    if key.ndim != 1 or key.size != uv.shape[0]:
        raise ValueError(f"key length {key.shape} does not match paired {uv.shape}")
    n = key.size
    if n < 4:
        raise ValueError(f"need at least 4 points for quartiles, got {n}")
    order = np.argsort(key, kind="stable")
    key = key[order]
    uv = uv[order]
    base, extra = divmod(n, 4)
    sizes = [base + 1] * extra + [base] * (4 - extra)
    groups = []
    at = 0
    for size in sizes:
        k = key[at : at + size]
        u = uv[at : at + size, 0]
        v = uv[at : at + size, 1]
        groups.append(
            QuartileGroup(
                size=size,
                key_lo=float(k[0]),
                key_hi=float(k[-1]),
                u_mean=float(u.mean()),
                u_std=float(u.std()),
                v_mean=float(v.mean()),
                v_std=float(v.std()),
            )
        )
        at += size
    return QuartileStats(groups=tuple(groups))


def histogram(values, bin_edges) -> HistogramResult:
    """Count values into half-open bins [e_k, e_k+1).

    Values below the first edge or at/above the last edge are tallied as
    underflow/overflow instead of raising.  Edges must be strictly
    increasing with at least two entries.
    """
    edges = np.asarray(bin_edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError(f"need at least 2 bin edges, got {edges.shape}")
    if not np.all(np.diff(edges) > 0.0):
        raise ValueError("bin edges must be strictly increasing")
    v = np.asarray(values, dtype=float).ravel()
    idx = np.searchsorted(edges, v, side="right") - 1
    n_bins = edges.size - 1
    in_range = (idx >= 0) & (idx < n_bins)
    counts = np.bincount(idx[in_range], minlength=n_bins)
    return HistogramResult(
        counts=counts,
        underflow=int(np.count_nonzero(idx < 0)),
        overflow=int(np.count_nonzero(idx >= n_bins)),
    )


def find_crossing(
    f: Callable[[float], float], g_lo: float, g_hi: float, tol: float = 1e-10
) -> float:
    """Bisection root of f on [g_lo, g_hi].

    Requires f(g_lo) and f(g_hi) to differ in sign (an endpoint root counts);
    otherwise raises NoBracketError.  Returns the midpoint of the final
    interval once it shrinks below tol.
    """
    if not g_hi > g_lo:
        raise ValueError(f"need g_lo < g_hi, got [{g_lo!r}, {g_hi!r}]")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    f_lo = f(g_lo)
    f_hi = f(g_hi)
    if f_lo == 0.0:
        return g_lo
    if f_hi == 0.0:
        return g_hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NoBracketError(f"no sign change on [{g_lo!r}, {g_hi!r}]")
    lo, hi = float(g_lo), float(g_hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
