"""Fits and scaling analyses: g-functions, data collapse, scaling dimensions.

Pure post-processing over (parameter, size, value) tables produced by the
contraction engines.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_DELTA_L = 4
COLLAPSE_BINS = 12
NU_GRID_RANGE = (0.3, 5.0)
NU_GRID_POINTS = 60


@dataclass
class GTable:
    """logg(L) values for one channel-family slice."""

    params: np.ndarray  # channel parameter per row (p or theta)
    sizes: np.ndarray
    log_z: np.ndarray
    logg: np.ndarray
    n: int
    delta_l: int


@dataclass
class EntropyFit:
    alpha_n: float
    loggn: float
    residual: float
    n: int


@dataclass
class CollapseFit:
    p_c: float
    nu: float
    quality: float
    baseline: float
    window: dict = field(default_factory=dict)


@dataclass
class ExponentFit:
    delta: float
    kind: str
    stderr: float
    window: dict = field(default_factory=dict)


def g_from_log_z(sizes, log_z, delta_l=DEFAULT_DELTA_L):
    """Central-difference logg(L) = logZ - L d(logZ)/dL on a uniform grid.

    `sizes` must be uniformly spaced by delta_l; interior sizes (those with
    both neighbors) get a logg value.
    """
    sizes = np.asarray(sizes, dtype=int)
    log_z = np.asarray(log_z, dtype=float)
    order = np.argsort(sizes)
    sizes, log_z = sizes[order], log_z[order]
    if sizes.size < 3:
        raise ValueError("need at least three sizes for the central difference")
    if np.any(np.diff(sizes) != delta_l):
        raise ValueError(f"sizes must be uniformly spaced by {delta_l}")
    mid = slice(1, -1)
    deriv = (log_z[2:] - log_z[:-2]) / (2.0 * delta_l)
    logg = log_z[mid] - sizes[mid] * deriv
    return sizes[mid], logg


def detect_fixed_point(sizes, logg, slope_tol=0.05):
    """Plateau value of logg over the largest-L half, or None if flowing."""
    sizes = np.asarray(sizes, dtype=float)
    logg = np.asarray(logg, dtype=float)
    if sizes.size < 4:
        raise ValueError("need at least four sizes")
    order = np.argsort(sizes)
    sizes, logg = sizes[order], logg[order]
    half = sizes.size // 2
    tail_l, tail_g = sizes[half:], logg[half:]
    slope = np.polyfit(np.log(tail_l), tail_g, 1)[0]
    if abs(slope) < slope_tol:
        return float(np.mean(tail_g))
    return None


def _master_curve_objective(xi, y, bins=COLLAPSE_BINS):
    """Mean squared deviation from a piecewise-linear master curve in xi."""
    order = np.argsort(xi)
    xi, y = xi[order], y[order]
    lo, hi = xi[0], xi[-1]
    if hi - lo < 1e-12:
        warnings.warn("degenerate xi cluster; widening bins")
        return float(np.var(y))
    knots = np.linspace(lo, hi, bins + 1)
    # hat-function design matrix: y_i ~ sum_j m_j phi_j(xi_i)
    idx = np.clip(np.searchsorted(knots, xi, side="right") - 1, 0, bins - 1)
    t = (xi - knots[idx]) / (knots[idx + 1] - knots[idx])
    a = np.zeros((xi.size, bins + 1))
    a[np.arange(xi.size), idx] = 1.0 - t
    a[np.arange(xi.size), idx + 1] = t
    # tiny ridge keeps unsupported knots harmless
    ata = a.T @ a + 1e-9 * np.eye(bins + 1)
    m = np.linalg.solve(ata, a.T @ y)
    resid = y - a @ m
    return float(np.mean(resid**2))


def _collapse_objective(samples, p_c, inv_nu, bins=COLLAPSE_BINS):
    p, size, y = samples
    xi = np.abs(p - p_c) * size**inv_nu
    return _master_curve_objective(xi, y, bins=bins)


def _golden_minimize(fun, lo, hi, tol=1e-4):
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fun(d)
    return (a + b) / 2.0


def collapse_fit(samples, p_c, nu_grid=None, bins=COLLAPSE_BINS):
    """Best collapse exponent nu for logg(p, L) data near a fixed point.

    `samples` is an iterable of (p, L, logg) triples.  Every candidate nu
    rescales to xi = |p - p_c| L^{1/nu}; the quality is the mean squared
    deviation from a piecewise-linear master curve.  The ungathered
    baseline (nu = infinity, xi = |p - p_c|) is reported for comparison.
    """
    rows = np.asarray(list(samples), dtype=float)
    if rows.shape[0] < 12:
        raise ValueError("too few samples for a collapse fit")
    p, size, y = rows[:, 0], rows[:, 1], rows[:, 2]
    if np.unique(size).size < 3 or np.unique(p).size < 4:
        raise ValueError("need at least 3 sizes and 4 parameter values")
    data = (p, size, y)
    if nu_grid is None:
        nu_grid = np.geomspace(*NU_GRID_RANGE, NU_GRID_POINTS)
    nu_grid = np.asarray(nu_grid, dtype=float)
    losses = [_collapse_objective(data, p_c, 1.0 / nu, bins=bins) for nu in nu_grid]
    best = int(np.argmin(losses))
    lo = np.log(nu_grid[max(best - 1, 0)])
    hi = np.log(nu_grid[min(best + 1, nu_grid.size - 1)])
    log_nu = _golden_minimize(
        lambda t: _collapse_objective(data, p_c, np.exp(-t), bins=bins), lo, hi)
    nu = float(np.exp(log_nu))
    quality = _collapse_objective(data, p_c, 1.0 / nu, bins=bins)
    baseline = _collapse_objective(data, p_c, 0.0, bins=bins)
    window = {"p": (float(p.min()), float(p.max())),
              "L": (int(size.min()), int(size.max()))}
    return CollapseFit(p_c=float(p_c), nu=nu, quality=quality,
                       baseline=baseline, window=window)


def _linear_fit(x, y):
    """Least-squares line with slope standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    coef, cov = np.polyfit(x, y, 1, cov=True)
    return coef[0], coef[1], float(np.sqrt(cov[0, 0]))


def chord_length(l_a, total):
    """Conformal chord length (L/pi) sin(pi L_A / L)."""
    return total / np.pi * np.sin(np.pi * np.asarray(l_a, dtype=float) / total)


def fit_single_interval_dimension(points, total, n):
    """Slope of I^(n)(A, rest) vs log chord length -> 4 Delta / (n-1).

    `points` is an iterable of (L_A, I) pairs; interval sizes within 4 sites
    of either end are excluded from the fit.
    """
    rows = np.asarray(list(points), dtype=float)
    if rows.shape[0] < 6:
        raise ValueError("need at least six interval sizes")
    keep = (rows[:, 0] >= 4) & (rows[:, 0] <= total - 4)
    rows = rows[keep]
    if rows.shape[0] < 4:
        raise ValueError("fewer than four usable interval sizes after trimming")
    x = np.log(chord_length(rows[:, 0], total))
    slope, _, err = _linear_fit(x, rows[:, 1])
    pref = 1 if n == "von_neumann" else n - 1
    delta = slope * pref / 4.0
    window = {"L_A": (float(rows[:, 0].min()), float(rows[:, 0].max())), "L": total}
    return ExponentFit(delta=float(delta), kind="single_interval",
                       stderr=err * pref / 4.0, window=window)


def cross_ratio(x1, x2, x3, x4, total):
    """eta = (X12 X34) / (X13 X24) with X_ij = sin(pi |x_i - x_j| / L)."""
    pts = (x1, x2, x3, x4)
    if len(set(pts)) != 4:
        raise ValueError("cross ratio needs four distinct points")

    def chord(i, j):
        return np.sin(np.pi * abs(pts[i] - pts[j]) / total)

    return float(chord(0, 1) * chord(2, 3) / (chord(0, 2) * chord(1, 3)))


def fit_cross_ratio_dimension(points, eta_max=0.1):
    """Slope of log I vs log eta over the small-eta window -> Delta_O."""
    rows = np.asarray(list(points), dtype=float)
    rows = rows[(rows[:, 0] > 0) & (rows[:, 0] < eta_max) & (rows[:, 1] > 0)]
    if rows.shape[0] < 3:
        raise ValueError("too few points inside the small-eta window")
    slope, _, err = _linear_fit(np.log(rows[:, 0]), np.log(rows[:, 1]))
    window = {"eta": (float(rows[:, 0].min()), float(rows[:, 0].max()))}
    return ExponentFit(delta=float(slope), kind="cross_ratio", stderr=err, window=window)


def fit_volume_and_g(points, n):
    """Linear fit S^(n)(L) = alpha L - logg/(n-1)."""
    rows = np.asarray(list(points), dtype=float)
    if rows.shape[0] < 4:
        raise ValueError("need at least four sizes")
    slope, intercept, _ = _linear_fit(rows[:, 0], rows[:, 1])
    pred = slope * rows[:, 0] + intercept
    residual = float(np.sqrt(np.mean((rows[:, 1] - pred) ** 2)))
    return EntropyFit(alpha_n=float(slope), loggn=float(-intercept * (n - 1)),
                      residual=residual, n=n)
