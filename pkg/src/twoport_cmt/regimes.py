"""Parameter-space exploration: lineshape regimes, critical-coupling loci,
and coherent-perfect-absorption frequencies."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .model import Background, ModelParams, _det_s_grid, poles_zeros, scattering_matrix
from .twoport import joint_extrema

_SWEEPABLE = ("gamma_r", "gamma_nr", "gamma_m", "omega_rabi")
_PEAK_FLOOR = 1e-9  # minimum absorbance for a countable peak


class WindowTooNarrowError(ValueError):
    """A spectral extremum sits on the window boundary; widen the window."""


@dataclass(frozen=True)
class RegimeReport:
    n_peaks: int
    peak_positions: tuple[float, ...]
    scc_residual: float
    wcc_residual: float
    cpa_frequencies: tuple[float, ...]


@dataclass(frozen=True)
class CpaPoint:
    omega: float
    dets_min: float
    phi_star: float


@dataclass(frozen=True)
class CriticalLociMap:
    """Row-major maps over a 2-D rate sweep (y outer, x inner)."""

    x_param: str
    y_param: str
    x_values: np.ndarray
    y_values: np.ndarray
    scc_residual: np.ndarray
    wcc_residual: np.ndarray
    min_abs_dets: np.ndarray


def scc_residual(p: ModelParams) -> float:
    """Strong-critical-coupling residual gamma_r - gamma_nr - gamma_m."""
    return p.gamma_r - p.gamma_nr - p.gamma_m


def wcc_residual(p: ModelParams) -> float:
    """Weak-critical-coupling residual gamma_m (gamma_r - gamma_nr) - Omega^2."""
    return p.gamma_m * (p.gamma_r - p.gamma_nr) - p.omega_rabi**2


def default_window(p: ModelParams, pad: float = 1.0) -> tuple[float, float]:
    span = max(3 * p.omega_rabi, 3 * p.gamma_c, 3 * p.gamma_m) + pad
    return (p.omega0 - span, p.omega0 + span)


def _abs_dets_sq(p: ModelParams):
    pz = poles_zeros(p)
    z0, z1 = pz.zeros
    p0, p1 = pz.poles

    def f(w: float) -> float:
        den = (w - p0) * (w - p1)
        if den == 0:
            return math.nan
        return abs((w - z0) * (w - z1) / den) ** 2

    return f


def _stationary_polish(p: ModelParams, x: float, lo: float, hi: float) -> float:
    """Newton refinement of a stationary point of |det S|^2 on the real axis.

    Works on F = A'B - AB' with A = |numerator|^2, B = |denominator|^2 in
    factored complex form; reaches machine precision where bounded
    golden-section search stalls at sqrt(eps)*|x|, including exact real zeros.
    """
    pz = poles_zeros(p)
    z0, z1 = pz.zeros
    p0, p1 = pz.poles

    for _ in range(60):
        n = (x - z0) * (x - z1)
        npr = (x - z0) + (x - z1)
        d = (x - p0) * (x - p1)
        dpr = (x - p0) + (x - p1)
        A = abs(n) ** 2
        B = abs(d) ** 2
        Ap = 2.0 * (npr * n.conjugate()).real
        Bp = 2.0 * (dpr * d.conjugate()).real
        App = 4.0 * n.real + 2.0 * abs(npr) ** 2
        Bpp = 4.0 * d.real + 2.0 * abs(dpr) ** 2
        F = Ap * B - A * Bp
        Fp = App * B - A * Bpp
        if Fp == 0.0:
            break
        x_new = min(max(x - F / Fp, lo), hi)
        if abs(x_new - x) < 1e-15 * max(1.0, abs(x)):
            x = x_new
            break
        x = x_new
    return x


def _refine_extrema(f, grid: np.ndarray, vals: np.ndarray, xatol: float,
                    polish=None):
    """Strict interior 3-point minima of vals, refined by bounded 1-D search.

    Minima closer than three grid spacings are merged, keeping the deeper one.
    Returns a list of (x, f(x)) sorted by x.
    """
    spacing = grid[1] - grid[0]
    found = []
    for i in range(1, len(grid) - 1):
        if np.isnan(vals[i - 1]) or np.isnan(vals[i]) or np.isnan(vals[i + 1]):
            continue
        if vals[i] < vals[i - 1] and vals[i] < vals[i + 1]:
            res = minimize_scalar(
                f, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                options={"xatol": xatol},
            )
            x = float(res.x)
            fx = float(res.fun)
            if polish is not None:
                xp = polish(x, grid[i - 1], grid[i + 1])
                fp = f(xp)
                if fp <= fx:
                    x, fx = xp, fp
            found.append((x, fx))
    found.sort()
    merged: list[tuple[float, float]] = []
    for x, fx in found:
        if merged and x - merged[-1][0] < 3 * spacing:
            if fx < merged[-1][1]:
                merged[-1] = (x, fx)
        else:
            merged.append((x, fx))
    return merged


def classify_regime(p: ModelParams, window=None, n_grid: int = 1001,
                    cpa_tol: float = 1e-6) -> RegimeReport:
    """Count the absorbance peaks of B(omega) and report the critical residuals.

    The window must cover omega0 +/- max(3 Omega, 3 gamma_c, 3 gamma_m) and a
    strict maximum on the boundary raises WindowTooNarrowError.
    """
    if n_grid < 501:
        raise ValueError("n_grid must be >= 501")
    lo_req, hi_req = default_window(p, pad=0.0)
    if window is None:
        window = default_window(p)
    lo, hi = window
    if lo > lo_req or hi < hi_req:
        raise ValueError(
            f"window {window} must cover ({lo_req}, {hi_req})"
        )
    grid = np.linspace(lo, hi, n_grid)
    fsq = _abs_dets_sq(p)
    vals = np.array([fsq(w) for w in grid])
    b_vals = 1.0 - vals
    rising_lo = b_vals[0] > b_vals[1] and b_vals[0] > _PEAK_FLOOR
    rising_hi = b_vals[-1] > b_vals[-2] and b_vals[-1] > _PEAK_FLOOR
    if rising_lo or rising_hi:
        raise WindowTooNarrowError(
            "B(omega) has a maximum on the window boundary; widen the window"
        )
    # maxima of B are exactly the minima of |det S|^2; an absorbance floor
    # rejects float-noise wiggles of a flat (decoupled, B = 0) spectrum
    polish = lambda x, a, b: _stationary_polish(p, x, a, b)
    peaks = _refine_extrema(fsq, grid, vals, xatol=1e-10 * max(1.0, abs(hi)),
                            polish=polish)
    positions = tuple(x for x, fx in peaks if 1.0 - fx > _PEAK_FLOOR)
    cpa = tuple(
        pt.omega for pt in find_cpa(p, window=window) if pt.dets_min < cpa_tol
    )
    return RegimeReport(
        n_peaks=len(positions),
        peak_positions=positions,
        scc_residual=scc_residual(p),
        wcc_residual=wcc_residual(p),
        cpa_frequencies=cpa,
    )


def find_cpa(p: ModelParams, window=None, tol: float = 1e-10,
             n_grid: int = 2001) -> list[CpaPoint]:
    """Local minima of |det S| on the real axis, refined to tol.

    Every interior local minimum is reported together with the input
    dephasing that maximizes the joint absorbance there; an empty list is a
    valid outcome (no interior minimum, e.g. a lossless model).
    """
    if window is None:
        window = default_window(p)
    lo, hi = window
    grid = np.linspace(lo, hi, n_grid)
    fsq = _abs_dets_sq(p)
    vals = np.array([fsq(w) for w in grid])
    minima = _refine_extrema(fsq, grid, vals, xatol=tol,
                             polish=lambda x, a, b: _stationary_polish(p, x, a, b))
    bg = Background()
    points = []
    for x, fx in minima:
        ext = joint_extrema(scattering_matrix(p, bg, x))
        points.append(CpaPoint(omega=x, dets_min=math.sqrt(max(fx, 0.0)),
                               phi_star=ext.phi_max))
    return points


def min_abs_dets(p: ModelParams, window=None, n_grid: int = 801) -> float:
    """Numerically minimized |det S| over real frequency."""
    if window is None:
        window = default_window(p)
    lo, hi = window
    grid = np.linspace(lo, hi, n_grid)
    dets, bad = _det_s_grid(p, grid)
    vals = np.abs(dets) ** 2
    vals[bad] = np.nan
    if np.all(np.isnan(vals)):
        return math.nan
    fsq = _abs_dets_sq(p)
    best = float(np.nanmin(vals))
    refined = _refine_extrema(fsq, grid, vals,
                              xatol=1e-10 * max(1.0, abs(hi)),
                              polish=lambda x, a, b: _stationary_polish(p, x, a, b))
    for x, fx in refined:
        best = min(best, fx)
    return math.sqrt(max(best, 0.0))


def critical_loci(base: ModelParams, x_param: str, x_values, y_param: str,
                  y_values, n_grid: int = 801) -> CriticalLociMap:
    """Residuals and minimized |det S| over a 2-D sweep of two rates.

    Grid points are evaluated independently and assembled in row-major order
    (y outer, x inner).
    """
    for name in (x_param, y_param):
        if name not in _SWEEPABLE:
            raise ValueError(f"sweep parameter must be one of {_SWEEPABLE}, got {name!r}")
    if x_param == y_param:
        raise ValueError("sweep axes must differ")
    xs = np.asarray(x_values, dtype=float)
    ys = np.asarray(y_values, dtype=float)
    if np.any(xs < 0) or np.any(ys < 0):
        raise ValueError("sweep axes must be non-negative")
    scc = np.empty((ys.size, xs.size))
    wcc = np.empty_like(scc)
    mds = np.empty_like(scc)
    for j, yv in enumerate(ys):
        for i, xv in enumerate(xs):
            p = replace(base, **{x_param: float(xv), y_param: float(yv)})
            scc[j, i] = scc_residual(p)
            wcc[j, i] = wcc_residual(p)
            mds[j, i] = min_abs_dets(p, n_grid=n_grid)
    return CriticalLociMap(
        x_param=x_param, y_param=y_param, x_values=xs, y_values=ys,
        scc_residual=scc, wcc_residual=wcc, min_abs_dets=mds,
    )


def count_peaks(p: ModelParams, window=None, n_grid: int = 601) -> int:
    """Quick strict-maxima count of B(omega) without refinement (sweep helper)."""
    if window is None:
        window = default_window(p)
    grid = np.linspace(window[0], window[1], n_grid)
    dets, bad = _det_s_grid(p, grid)
    b = 1.0 - np.abs(dets) ** 2
    b[bad] = -np.inf
    interior = (b[1:-1] > b[:-2]) & (b[1:-1] > b[2:]) & (b[1:-1] > _PEAK_FLOOR)
    return int(np.count_nonzero(interior))
