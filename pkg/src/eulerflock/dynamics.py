"""Right-hand side and explicit time stepping of the hydrodynamic system

    rho_t + (rho u)_x = 0,
    u_t + u u_x = F[rho, u],

where ``F`` is the alignment force of the chosen kernel.  The state is kept
band-limited to the 2/3-rule range: initial data are filtered once and
every right-hand side is filtered, so the quadratic products are exact and
discrete mass and (for symmetric kernels) momentum are conserved to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .kernels import KernelSpec, commutator_force, kernel_symbol, mt_normalized_force
from .spectral import (
    PeriodicGrid,
    check_field,
    dealias,
    derivative_symbol,
    fractional_constant,
    fractional_laplacian_apply,
    spectral_derivative,
)

E_CONVENTIONS = ("auto", "convolution", "operator")


class BlowUp(Exception):
    """Raised when a trajectory leaves the resolvable regime.

    Carries the time, the reason (``nonfinite``, ``gradient``,
    ``negative_density`` or ``vacuum``) and the offending norm.
    """

    def __init__(self, t: float, reason: str, norm: float):
        super().__init__(f"blow-up at t={t:.6g}: {reason} (norm {norm:.6g})")
        self.t = t
        self.reason = reason
        self.norm = norm


@dataclass
class FieldState:
    grid: PeriodicGrid
    rho: np.ndarray
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.rho = check_field(self.grid, self.rho)
        self.u = check_field(self.grid, self.u)

    def filtered(self) -> FieldState:
        """Copy projected onto the 2/3-rule band."""
        return replace(self, rho=dealias(self.grid, self.rho), u=dealias(self.grid, self.u))

    def roll(self, cells: int) -> FieldState:
        return replace(self, rho=np.roll(self.rho, cells), u=np.roll(self.u, cells))


@dataclass(frozen=True)
class StepControl:
    cfl_advective: float = 0.5
    cfl_dissipative: float = 0.4
    dt_max: float = 0.002
    t_end: float = 1.0

    def __post_init__(self):
        for name in ("cfl_advective", "cfl_dissipative", "dt_max"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be positive, got {val}")
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")


def resolve_convention(kernel: KernelSpec, convention: str = "auto") -> str:
    if convention not in E_CONVENTIONS:
        raise ValueError(f"unknown e-convention {convention!r}; expected one of {E_CONVENTIONS}")
    if convention == "auto":
        return "operator" if kernel.is_singular else "convolution"
    if convention == "convolution" and kernel.is_singular:
        raise ValueError("the convolution form of e needs a bounded kernel")
    return convention


def apply_kernel_operator(grid: PeriodicGrid, kernel: KernelSpec, f, form: str = "operator"):
    """``L_phi f`` (``form='operator'``) or ``phi*f`` (``form='convolution'``)."""
    f = check_field(grid, f)
    if kernel.is_singular:
        return fractional_laplacian_apply(grid, f, kernel.alpha)
    sym = kernel_symbol(kernel, grid)
    conv = np.fft.irfft(sym * np.fft.rfft(f), n=grid.n)
    if form == "convolution":
        return conv
    # sym[0] is the discrete integral of phi
    return conv - sym[0] * f


def compute_e(state: FieldState, kernel: KernelSpec, convention: str = "auto") -> np.ndarray:
    """``e = u_x + L_phi(rho)`` or, for bounded kernels, ``u_x + phi*rho``."""
    form = resolve_convention(kernel, convention)
    return (spectral_derivative(state.grid, state.u, 1)
            + apply_kernel_operator(state.grid, kernel, state.rho, form))


def alignment_force(grid: PeriodicGrid, kernel: KernelSpec, rho, u) -> np.ndarray:
    if kernel.variant == "mt":
        return mt_normalized_force(grid, kernel, rho, u)
    return commutator_force(grid, kernel, rho, u)


def _spectral_rhs(grid: PeriodicGrid, kernel: KernelSpec, R: np.ndarray, U: np.ndarray):
    """Right-hand side on masked rfft coefficients ``R = rho^, U = u^``."""
    n = grid.n
    mask = grid.dealias_mask
    ik = derivative_symbol(grid, 1)
    rfft, irfft = np.fft.rfft, np.fft.irfft
    rho = irfft(R, n=n)
    u = irfft(U, n=n)
    m_hat = rfft(rho * u)
    dR = -mask * ik * m_hat
    if kernel.variant == "mt":
        ux = irfft(ik * U, n=n)
        force = mt_normalized_force(grid, kernel, rho, u)
        dU = mask * rfft(force - u * ux)
    else:
        # u_t = L(rho u) - u L(rho) - u u_x = L(rho u) - u e
        sym = kernel_symbol(kernel, grid)
        e = irfft(sym * R + ik * U, n=n)
        dU = mask * (sym * m_hat - rfft(u * e))
    return dR, dU


def _rhs(grid: PeriodicGrid, kernel: KernelSpec, rho: np.ndarray, u: np.ndarray):
    mask = grid.dealias_mask
    dR, dU = _spectral_rhs(grid, kernel, mask * np.fft.rfft(rho), mask * np.fft.rfft(u))
    return np.fft.irfft(dR, n=grid.n), np.fft.irfft(dU, n=grid.n)


def rhs(state: FieldState, kernel: KernelSpec):
    """Time derivatives ``(d rho/dt, du/dt)`` of the band-limited projection of ``state``.

    Both outputs lie in the 2/3-rule band.
    """
    return _rhs(state.grid, kernel, state.rho, state.u)


def stable_dt(state: FieldState, kernel: KernelSpec, ctl: StepControl, eps: float = 1e-12) -> float:
    dx = state.grid.dx
    dt = min(ctl.dt_max, ctl.cfl_advective * dx / (float(np.max(np.abs(state.u))) + eps))
    if kernel.is_singular:
        c = fractional_constant(kernel.alpha)
        rho_max = max(float(np.max(state.rho)), eps)
        dt = min(dt, ctl.cfl_dissipative * dx ** kernel.alpha / (c * rho_max))
    return dt


def step(state: FieldState, kernel: KernelSpec, dt: float) -> FieldState:
    """One step of the three-stage, third-order SSP Runge-Kutta scheme (Shu-Osher form).

    The stages run on the masked Fourier coefficients, so modes above the
    2/3-rule cutoff are exactly zero throughout and rounding left there by
    earlier transforms cannot accumulate.
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    grid = state.grid
    mask = grid.dealias_mask
    R0 = mask * np.fft.rfft(state.rho)
    U0 = mask * np.fft.rfft(state.u)
    dR, dU = _spectral_rhs(grid, kernel, R0, U0)
    R1, U1 = R0 + dt * dR, U0 + dt * dU
    dR, dU = _spectral_rhs(grid, kernel, R1, U1)
    R2 = 0.75 * R0 + 0.25 * (R1 + dt * dR)
    U2 = 0.75 * U0 + 0.25 * (U1 + dt * dU)
    dR, dU = _spectral_rhs(grid, kernel, R2, U2)
    R3 = R0 / 3.0 + 2.0 / 3.0 * (R2 + dt * dR)
    U3 = U0 / 3.0 + 2.0 / 3.0 * (U2 + dt * dU)
    t = state.t + dt
    r3 = np.fft.irfft(R3, n=grid.n)
    u3 = np.fft.irfft(U3, n=grid.n)
    if not (np.all(np.isfinite(r3)) and np.all(np.isfinite(u3))):
        raise BlowUp(t, "nonfinite", math.inf)
    return FieldState(grid, r3, u3, t)


def integrate(state: FieldState, kernel: KernelSpec, dt: float, t_end: float) -> FieldState:
    """Fixed-step integration to ``t_end``; the last step is shortened to land on it."""
    if t_end <= state.t:
        return state
    nsteps = max(1, math.ceil((t_end - state.t) / dt - 1e-9))
    h = (t_end - state.t) / nsteps
    for _ in range(nsteps):
        state = step(state, kernel, h)
    return state
