"""Cucker-Smale particle system on the torus and its empirical moments.

Velocities relax through pairwise exchange weighted by the kernel at
nearest-image distance.  With ``mass = L * M`` the mean-normalized model
is the particle counterpart of the hydrodynamic system whose averaged
mass is ``M``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .kernels import KernelSpec, UnsupportedKernelError
from .spectral import PeriodicGrid, check_field

NORMALIZATIONS = ("mean", "adaptive")


class UnderResolvedError(ValueError):
    pass


@dataclass
class AgentState:
    x: np.ndarray
    v: np.ndarray
    t: float = 0.0
    L: float = 2.0 * math.pi

    def __post_init__(self):
        self.x = np.remainder(np.asarray(self.x, dtype=float), self.L)
        self.v = np.asarray(self.v, dtype=float)
        if self.x.ndim != 1 or self.x.shape != self.v.shape or self.x.size == 0:
            raise ValueError("positions and velocities must be matching non-empty 1-D arrays")

    @property
    def N(self) -> int:
        return self.x.size

    def velocity_diameter(self) -> float:
        return float(self.v.max() - self.v.min())


def _pair_weights(kernel: KernelSpec, x: np.ndarray, L: float) -> np.ndarray:
    d = np.subtract.outer(x, x)
    np.abs(d, out=d)
    if d.max() > 1.5 * L:
        np.remainder(d, L, out=d)
    # nearest-image distance; valid for offsets up to 1.5 L
    far = L - d
    np.abs(far, out=far)
    np.minimum(d, far, out=d)
    return kernel.phi(d)


def cs_rhs(agents: AgentState, kernel: KernelSpec, normalization: str = "mean",
           mass: float = 1.0):
    """``(dx/dt, dv/dt)`` of the particle system.

    ``mean``: ``dv_i/dt = (mass/N) sum_j phi(d_ij) (v_j - v_i)``.
    ``adaptive``: the sum divided by ``sum_j phi(d_ij)`` instead; ``mass``
    cancels and is ignored.
    """
    if kernel.is_singular:
        raise UnsupportedKernelError("the particle model needs a bounded kernel")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")
    W = _pair_weights(kernel, agents.x, agents.L)
    v = agents.v
    # sum_j W_ij (v_j - v_i), pairwise so that equal velocities give exactly zero
    diff = np.subtract.outer(v, v)
    diff *= W
    exchange = -diff.sum(axis=1)
    if normalization == "mean":
        dv = (mass / agents.N) * exchange
    else:
        dv = exchange / W.sum(axis=1)
    return v.copy(), dv


def agents_step(agents: AgentState, kernel: KernelSpec, dt: float, normalization: str = "mean",
                mass: float = 1.0) -> AgentState:
    """One classical fourth-order Runge-Kutta step."""
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")

    def f(x, v):
        return cs_rhs(replace(agents, x=x, v=v), kernel, normalization, mass)

    # positions are unwrapped inside the step; the kernel sees torus distances anyway
    x0, v0 = agents.x, agents.v
    k1x, k1v = f(x0, v0)
    k2x, k2v = f(x0 + 0.5 * dt * k1x, v0 + 0.5 * dt * k1v)
    k3x, k3v = f(x0 + 0.5 * dt * k2x, v0 + 0.5 * dt * k2v)
    k4x, k4v = f(x0 + dt * k3x, v0 + dt * k3v)
    x = x0 + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    v = v0 + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return AgentState(x, v, agents.t + dt, agents.L)


def agents_integrate(agents: AgentState, kernel: KernelSpec, dt: float, t_end: float,
                     normalization: str = "mean", mass: float = 1.0, record_every: int = 0):
    """Fixed-step integration to ``t_end``; returns the final state and the recorded states."""
    history = [agents]
    if t_end <= agents.t:
        return agents, history
    nsteps = max(1, math.ceil((t_end - agents.t) / dt - 1e-9))
    h = (t_end - agents.t) / nsteps
    for i in range(1, nsteps + 1):
        agents = agents_step(agents, kernel, h, normalization, mass)
        if record_every and i % record_every == 0:
            history.append(agents)
    return agents, history


def sample_agents(grid: PeriodicGrid, rho, u, N: int, seed: int = 0) -> AgentState:
    """Place ``N`` agents by inverse-CDF sampling of ``rho``; velocities from ``u``.

    The quantile levels are stratified, ``(i + s_i) / N``, with one seeded
    uniform offset ``s_i`` per stratum: repeated calls with one seed agree
    exactly, and the sampling error still shrinks with ``N`` faster than
    for independent draws.
    """
    from .spectral import interpolate

    rho = check_field(grid, rho)
    if N < 1:
        raise ValueError("need at least one agent")
    if not np.all(rho >= 0) or not rho.sum() > 0:
        raise ValueError("sampling density must be non-negative with positive mass")
    # fine piecewise-linear CDF of the trigonometric interpolant
    fine = np.linspace(0.0, grid.L, 16 * grid.n + 1)
    dens = np.maximum(np.asarray(interpolate(grid, rho, fine[:-1])), 0.0)
    dens = np.append(dens, dens[0])
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(fine))])
    cdf /= cdf[-1]
    offset = np.random.default_rng(seed).random(N)
    levels = (np.arange(N) + offset) / N
    x = np.interp(levels, cdf, fine)
    v = np.asarray(interpolate(grid, u, x), dtype=float).reshape(N)
    return AgentState(x, v, 0.0, grid.L)


def mollifier(grid: PeriodicGrid, width: float, center: float = 0.0) -> np.ndarray:
    """Periodic gaussian of standard deviation ``width`` with unit integral on the grid."""
    d = grid.torus_distance(grid.x - center)
    psi = np.exp(-0.5 * (d / width) ** 2)
    return psi / (grid.dx * psi.sum())


def empirical_moments(agents: AgentState, grid: PeriodicGrid, mollifier_width: float):
    """Mollified density and momentum ``(L/N) sum_i psi_w(x - x_i) (1, v_i)``.

    ``psi_w`` is a periodic gaussian of standard deviation ``mollifier_width``
    with unit mass, so the averaged density is exactly one.
    """
    if not math.isclose(agents.L, grid.L):
        raise ValueError("agents and grid live on different tori")
    if mollifier_width < 2.0 * grid.dx:
        raise UnderResolvedError(
            f"mollifier width {mollifier_width} is below 2 dx = {2 * grid.dx}")
    n = grid.n
    # deposit by spectral convolution: psi_w * (sum of deltas)
    psi_hat = np.fft.rfft(mollifier(grid, mollifier_width))
    # exact Fourier coefficients of the point masses, with the cosine Nyquist convention
    phase = np.exp(-1j * np.multiply.outer(grid.k, agents.x))
    coeff_rho = phase.sum(axis=1)
    coeff_m = phase @ agents.v
    coeff_rho[-1] = coeff_rho[-1].real
    coeff_m[-1] = coeff_m[-1].real
    # sum_i psi(x_j - x_i) has rfft coefficients psi_hat * sum_i exp(-i k x_i), up to
    # aliasing of the gaussian tail, which is below 1e-8 for widths >= 2 dx
    scale = grid.L / agents.N
    rho = np.fft.irfft(psi_hat * coeff_rho * scale, n=n)
    mom = np.fft.irfft(psi_hat * coeff_m * scale, n=n)
    return rho, mom


def mollify(grid: PeriodicGrid, f, width: float) -> np.ndarray:
    """``psi_w * f`` with the same kernel as :func:`empirical_moments`."""
    f = check_field(grid, f)
    psi_hat = np.fft.rfft(mollifier(grid, width))
    return np.fft.irfft(grid.dx * psi_hat * np.fft.rfft(f), n=grid.n)


def write_agents_csv(path, history) -> None:
    """One row per (time, agent): ``t, i, x, v``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "i", "x", "v"])
        for st in history:
            for i, (xi, vi) in enumerate(zip(st.x, st.v)):
                w.writerow([repr(float(st.t)), i, repr(float(xi)), repr(float(vi))])
