"""Measurements taken along trajectories: alignment, conservation, decay rates.

Every function here is pure: it reads a state (or a series) and returns
numbers, never mutating its input.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .dynamics import FieldState, compute_e, resolve_convention
from .kernels import KernelSpec, UnsupportedKernelError
from .spectral import PeriodicGrid, dissipation_field, shift, spectral_derivative


class DegenerateSupportError(ValueError):
    pass


class FitDomainError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class VacuumError(ArithmeticError):
    pass


CSV_COLUMNS = (
    "t", "M", "P", "V", "D", "min_e", "max_e", "min_rho", "max_rho", "Q",
    "sup_ux", "sup_uxx", "l2_uxxx", "flock_residual", "free_energy",
)


@dataclass
class DiagnosticsRecord:
    t: float
    M: float
    P: float
    V: float
    D: float | None
    min_e: float
    max_e: float
    min_rho: float
    max_rho: float
    Q: float | None
    sup_ux: float
    sup_uxx: float
    l2_uxxx: float
    flock_residual: float | None = None
    free_energy: float | None = None
    # transported integral of e, kept for the conservation checks (not a CSV column)
    e_mean: float = 0.0

    def row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


@dataclass
class DecayFit:
    """Least-squares fit ``value ~ C exp(-delta t)`` on a time window."""

    delta: float
    C: float
    window: tuple[float, float]
    r_squared: float
    samples: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class FlockingProfile:
    ubar: float
    rho_inf: np.ndarray
    residual_series: np.ndarray


def support_mask(state: FieldState, eps_supp: float | None) -> np.ndarray:
    if eps_supp is None:
        return np.ones(state.grid.n, dtype=bool)
    rho_max = float(np.max(state.rho))
    if not rho_max > 0:
        raise DegenerateSupportError("density has empty support")
    return state.rho > eps_supp * rho_max


def velocity_diameter(state: FieldState, eps_supp: float | None = None) -> float:
    """``max u - min u`` over the nodes, optionally restricted to ``{rho > eps_supp max rho}``."""
    mask = support_mask(state, eps_supp)
    if not mask.any():
        raise DegenerateSupportError("density has empty support")
    u = state.u[mask]
    return float(u.max() - u.min())


def support_diameter(state: FieldState, eps_supp: float = 1e-4) -> float:
    """Diameter of ``{rho > eps_supp max rho}``: ``L`` minus the widest empty arc."""
    mask = support_mask(state, eps_supp)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise DegenerateSupportError("density has empty support")
    grid = state.grid
    if idx.size == grid.n:
        return grid.L
    gaps = np.diff(np.concatenate([idx, [idx[0] + grid.n]]))
    return float(grid.L - gaps.max() * grid.dx)


def free_energy(state: FieldState, kernel: KernelSpec, eps_supp: float = 1e-4) -> float:
    """``V + int_0^D phi``, both measured on the thresholded support."""
    if kernel.is_singular:
        raise UnsupportedKernelError("free energy needs an integrable kernel")
    V = velocity_diameter(state, eps_supp)
    return V + kernel.integral(support_diameter(state, eps_supp))


def derivative_norms(state: FieldState) -> tuple[float, float, float]:
    """``(sup|u_x|, sup|u_xx|, ||u_xxx||_2)`` with the L2 norm taken against ``dx``."""
    grid = state.grid
    ux = spectral_derivative(grid, state.u, 1)
    uxx = spectral_derivative(grid, state.u, 2)
    uxxx = spectral_derivative(grid, state.u, 3)
    return (float(np.max(np.abs(ux))), float(np.max(np.abs(uxx))),
            float(math.sqrt(grid.dx * np.sum(uxxx * uxxx))))


def fit_decay(t, values, window: tuple[float, float] | None = None, min_samples: int = 10) -> DecayFit:
    """Fit ``log(value) = log C - delta t`` by least squares on ``window``.

    A constant series has no explained variance; its ``r_squared`` is
    reported as 0 by convention.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape:
        raise ValueError("times and values must have the same length")
    if window is None:
        window = (float(t.min()), float(t.max())) if t.size else (0.0, 0.0)
    lo, hi = window
    sel = (t >= lo) & (t <= hi)
    ts, vs = t[sel], v[sel]
    if ts.size < min_samples:
        raise InsufficientDataError(f"{ts.size} samples in window {window}; need {min_samples}")
    if not np.all(vs > 0) or not np.all(np.isfinite(vs)):
        raise FitDomainError("decay fit needs strictly positive, finite values on the window")
    y = np.log(vs)
    A = np.column_stack([np.ones_like(ts), ts])
    (intercept, slope), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (intercept + slope * ts)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 0.0 if ss_tot <= 1e-30 * max(1.0, float(np.sum(y * y))) else max(0.0, 1.0 - ss_res / ss_tot)
    return DecayFit(delta=float(-slope), C=float(math.exp(intercept)), window=(float(lo), float(hi)),
                    r_squared=float(min(1.0, r2)), samples=int(ts.size))


def decay_window(t, values, skip: float = 0.2, floor: float = 1e-10) -> tuple[float, float]:
    """Window for :func:`fit_decay` over the measurable part of a decaying series.

    The window ends at the last sample before the series first falls below
    ``floor`` times its largest value (beyond that, rounding dominates) and
    skips the leading fraction ``skip`` of what remains.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.size == 0 or not np.any(np.isfinite(v)):
        raise InsufficientDataError("empty series")
    below = np.flatnonzero(~(v > floor * np.nanmax(v)))
    end = t[below[0] - 1] if below.size and below[0] > 0 else t[-1]
    if below.size and below[0] == 0:
        end = t[0]
    start = t[0] + skip * (end - t[0])
    return float(start), float(end)


def flocking_residual(grid: PeriodicGrid, times, densities, ubar: float) -> FlockingProfile:
    """Distance of the co-moving density ``rho(x + t ubar, t)`` to its final value.

    ``densities`` is a sequence of nodal snapshots taken at ``times``; the
    last co-moving snapshot serves as the limiting profile.
    """
    times = np.asarray(times, dtype=float)
    comoving = np.array([shift(grid, r, t * ubar) for t, r in zip(times, densities)])
    rho_inf = comoving[-1]
    resid = np.max(np.abs(comoving - rho_inf), axis=1)
    return FlockingProfile(ubar=float(ubar), rho_inf=rho_inf, residual_series=resid)


def limit_velocity(state: FieldState) -> float:
    """``ubar = P / M`` from the averaged mass and momentum."""
    return float(np.mean(state.rho * state.u) / np.mean(state.rho))


def threshold_classify(state0: FieldState, kernel: KernelSpec) -> tuple[float, bool]:
    """Minimum of ``e0 = u0' + phi*rho0``; the data are subcritical iff it is positive."""
    if kernel.is_singular:
        raise UnsupportedKernelError("the critical threshold is defined for bounded kernels")
    e0 = compute_e(state0, kernel, "convolution")
    m = float(np.min(e0))
    return m, m > 0


def q_extremum(state: FieldState, kernel: KernelSpec) -> float:
    """``Q = max |e / rho|`` with ``e = u_x + L_phi(rho)``."""
    if not float(np.min(state.rho)) > 0:
        raise VacuumError("q = e/rho is undefined where the density vanishes")
    e = compute_e(state, kernel, "operator")
    return float(np.max(np.abs(e / state.rho)))


def enhancement_ratio(grid: PeriodicGrid, u, alpha: float = 1.0, level: float = 0.1,
                      truncation: int = 64) -> float:
    """Smallest value of ``D u'(x) V / |u'(x)|^3`` over nodes where ``|u'| > level sup|u'|``.

    A positive, scale-free lower bound of this ratio is what small amplitude
    buys in dissipation; the value is reported, not prescribed.
    """
    u = np.asarray(u, dtype=float)
    V = float(u.max() - u.min())
    if V == 0.0:
        raise ValueError("enhancement ratio is undefined for a constant velocity")
    du = spectral_derivative(grid, u, 1)
    slope = np.abs(du)
    active = slope > level * slope.max()
    if not active.any():
        raise ValueError("enhancement ratio is undefined for a constant velocity")
    D = dissipation_field(grid, du, alpha, truncation)
    return float(np.min(D[active] * V / slope[active] ** 3))


def measure(state: FieldState, kernel: KernelSpec, *, convention: str = "auto",
            line_mode: bool = False, eps_supp: float = 1e-4) -> DiagnosticsRecord:
    """All per-snapshot diagnostics except the flocking residual (which needs the whole run)."""
    grid = state.grid
    e = compute_e(state, kernel, resolve_convention(kernel, convention))
    sup_ux, sup_uxx, l2_uxxx = derivative_norms(state)
    min_rho = float(np.min(state.rho))
    Q = None
    if kernel.is_singular and min_rho > 0:
        Q = q_extremum(state, kernel)
    D = F = None
    if line_mode:
        D = support_diameter(state, eps_supp)
        if not kernel.is_singular:
            F = free_energy(state, kernel, eps_supp)
    return DiagnosticsRecord(
        t=float(state.t),
        M=float(np.mean(state.rho)),
        P=float(np.mean(state.rho * state.u)),
        V=velocity_diameter(state, eps_supp if line_mode else None),
        D=D,
        min_e=float(np.min(e)),
        max_e=float(np.max(e)),
        min_rho=min_rho,
        max_rho=float(np.max(state.rho)),
        Q=Q,
        sup_ux=sup_ux,
        sup_uxx=sup_uxx,
        l2_uxxx=l2_uxxx,
        free_energy=F,
        e_mean=float(np.mean(e)),
    )


def series(records, name: str) -> np.ndarray:
    """Column ``name`` of a list of records as a float array (``nan`` for blanks)."""
    if name not in {f.name for f in fields(DiagnosticsRecord)}:
        raise KeyError(name)
    return np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in records],
                    dtype=float)
