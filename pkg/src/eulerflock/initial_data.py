"""Registry of initial configurations ``(rho0, u0)``.

Every generator takes the grid plus keyword parameters and returns the
pair of nodal arrays.  The parameter dictionaries in :data:`REGISTRY` are
the defaults that scenario files may override.
"""

from __future__ import annotations

import math

import numpy as np

from .spectral import PeriodicGrid

# a gaussian bump drops to 1e-4 of its height at |d| = halfwidth
_GAUSS_WIDTH = math.sqrt(2.0 * math.log(1e4))


def perturbed_constant(grid: PeriodicGrid, mass=1.0, rho_amp=0.5, rho_phase=0.0,
                       u_amp=0.1, u_phase=0.0, u_shift=0.0, wavenumber=1):
    """``rho0 = M (1 + a cos(kx + theta))``, ``u0 = c + b sin(kx + psi)`` with ``k = 2 pi m / L``."""
    if abs(rho_amp) >= 1.0:
        raise ValueError("rho_amp must satisfy |rho_amp| < 1 to keep the density positive")
    kx = 2.0 * math.pi * int(wavenumber) / grid.L * grid.x
    rho = mass * (1.0 + rho_amp * np.cos(kx + rho_phase))
    u = u_shift + u_amp * np.sin(kx + u_phase)
    return rho, u


def bump_profile(grid: PeriodicGrid, center: float, halfwidth: float, height: float = 1.0,
                 shape: str = "compact") -> np.ndarray:
    """Smooth bump of the given half-width around ``center`` (torus distance).

    ``compact`` is the C-infinity bump ``exp(1 - 1/(1 - r^2))`` supported in
    ``|d| < halfwidth``; ``gaussian`` has full support but falls to 1e-4 of
    its height at ``|d| = halfwidth``.
    """
    d = grid.torus_distance(grid.x - center)
    if shape == "compact":
        r2 = (d / halfwidth) ** 2
        out = np.zeros_like(d)
        inside = r2 < 1.0
        out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
        return out
    if shape == "gaussian":
        return height * np.exp(-0.5 * (_GAUSS_WIDTH * d / halfwidth) ** 2)
    raise ValueError(f"unknown bump shape {shape!r}; expected 'compact' or 'gaussian'")


def bump(grid: PeriodicGrid, center=math.pi, halfwidth=1.0, height=1.0, shape="compact",
         u_amp=0.0, u_shift=0.0):
    rho = bump_profile(grid, center, halfwidth, height, shape)
    u = u_shift + u_amp * np.sin(2.0 * math.pi * (grid.x - center) / grid.L)
    return rho, u


def two_bump(grid: PeriodicGrid, center=math.pi, separation=2.0, halfwidth=0.5, height=1.0,
             shape="gaussian", u_amp=0.5, u_shift=0.0):
    """Two equal bumps ``separation`` apart, the left one moving right and the right one left
    when ``u_amp > 0``."""
    left = bump_profile(grid, center - 0.5 * separation, halfwidth, height, shape)
    right = bump_profile(grid, center + 0.5 * separation, halfwidth, height, shape)
    u = u_shift - u_amp * np.sin(2.0 * math.pi * (grid.x - center) / grid.L)
    return left + right, u


REGISTRY = {
    "perturbed_constant": (perturbed_constant, {
        "mass": 1.0, "rho_amp": 0.5, "rho_phase": 0.0, "u_amp": 0.1, "u_phase": 0.0,
        "u_shift": 0.0, "wavenumber": 1}),
    "bump": (bump, {
        "center": math.pi, "halfwidth": 1.0, "height": 1.0, "shape": "compact",
        "u_amp": 0.0, "u_shift": 0.0}),
    "two_bump": (two_bump, {
        "center": math.pi, "separation": 2.0, "halfwidth": 0.5, "height": 1.0,
        "shape": "gaussian", "u_amp": 0.5, "u_shift": 0.0}),
}


def make_initial(grid: PeriodicGrid, name: str, **params):
    try:
        fn, defaults = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown initial data {name!r}; expected one of {sorted(REGISTRY)}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)} for initial data {name!r}")
    return fn(grid, **{**defaults, **params})
