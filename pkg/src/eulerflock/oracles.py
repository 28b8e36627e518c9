"""Slow, independent reference computations for the spectral operators.

Nothing here shares code paths with the fast operators beyond the grid
layout: closed forms go through ``scipy.special``, kernel sums are
brute-forced, and integrals use adaptive quadrature or direct O(n^2) sums.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .kernels import KernelSpec
from .spectral import TWO_PI, PeriodicGrid


def fractional_constant_closed(alpha: float) -> float:
    """``c_alpha = -2 Gamma(-alpha) cos(pi alpha / 2)``, with the limit ``pi`` at ``alpha = 1``."""
    if alpha == 1.0:
        return math.pi
    return float(-2.0 * special.gamma(-alpha) * math.cos(0.5 * math.pi * alpha))


def periodized_kernel_zeta(alpha: float, x, period: float = TWO_PI):
    """Closed form ``P^{-s} [zeta(s, r/P) + zeta(s, 1 - r/P)]``, ``s = 1 + alpha``, via Hurwitz zeta."""
    s = 1.0 + alpha
    r = np.remainder(np.abs(np.asarray(x, dtype=float)), period) / period
    out = period ** (-s) * (special.zeta(s, r) + special.zeta(s, 1.0 - r))
    return float(out) if np.ndim(out) == 0 else out


def periodized_kernel_bruteforce(alpha: float, x: float, terms: int = 10 ** 6,
                                 period: float = TWO_PI) -> float:
    """Image sum over ``|k| <= terms`` plus the leading integral of what is left.

    Summation runs from the smallest terms up to limit rounding.
    """
    s = 1.0 + alpha
    k = np.arange(terms, 0, -1, dtype=float)
    partial = np.sum(np.abs(x + period * k) ** -s) + np.sum(np.abs(x - period * k) ** -s)
    partial += abs(x) ** -s
    # remaining images |k| > terms, each side approximated by its integral from terms + 1/2
    tail = sum((period * (terms + 0.5) + sgn * x) ** (1.0 - s) / (period * (s - 1.0)) for sgn in (1.0, -1.0))
    return float(partial + tail)


# --- trigonometric polynomials -----------------------------------------------------

def trig_eval(coeffs, x, derivative: int = 0):
    """Evaluate ``a_0 + sum_k (a_k cos kx + b_k sin kx)`` or one of its derivatives.

    ``coeffs`` is an array of shape ``(K + 1, 2)`` holding ``(a_k, b_k)``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x) + (coeffs[0, 0] if derivative == 0 else 0.0)
    for k in range(1, coeffs.shape[0]):
        a, b = coeffs[k]
        # d^m/dx^m cos(kx) = k^m cos(kx + m pi/2)
        shift = 0.5 * math.pi * derivative
        out = out + k ** derivative * (a * np.cos(k * x + shift) + b * np.sin(k * x + shift))
    return out


def random_trig_coeffs(rng, degree: int = 8) -> np.ndarray:
    c = rng.standard_normal((degree + 1, 2))
    c[0, 1] = 0.0
    return c


def fractional_laplacian_direct(coeffs, x, alpha: float, m: int = 1024, corrections: int = 12):
    """``int phi_alpha(|z|) (f(x+z) - f(x)) dz`` for a trigonometric polynomial on the 2 pi torus.

    Trapezoid sum over ``m`` offsets with the periodized kernel, corrected
    for the ``|z|^{-1-alpha}`` singularity by the generalized
    Euler-Maclaurin (Navot) expansion, whose terms involve
    ``zeta(1 + alpha - 2j)`` and the even derivatives of ``f`` at ``x``.
    O(m) kernel evaluations per point.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = TWO_PI / m
    z = h * np.arange(1, m)
    w = periodized_kernel_zeta(alpha, z)
    out = np.empty_like(x)
    f0 = trig_eval(coeffs, x)
    for i, xi in enumerate(x):
        out[i] = h * np.dot(w, trig_eval(coeffs, xi + z) - f0[i])
    s = 1.0 + alpha
    for j in range(1, corrections + 1):
        d2j = trig_eval(coeffs, x, 2 * j)
        out -= 2.0 * special.zeta(s - 2 * j) * d2j * h ** (2 * j + 1 - s) / math.factorial(2 * j)
    return out


# --- forces --------------------------------------------------------------------------

def commutator_direct(grid: PeriodicGrid, kernel: KernelSpec, rho, u) -> np.ndarray:
    """``dx sum_j phi(d(x_i, x_j)) (u_j - u_i) rho_j`` by an explicit double loop over nodes."""
    n, dx = grid.n, grid.dx
    x = grid.x
    out = np.empty(n)
    for i in range(n):
        d = np.abs(x - x[i])
        d = np.minimum(d, grid.L - d)
        out[i] = dx * np.sum(kernel.phi(d) * (u - u[i]) * rho)
    return out


def mt_force_direct(grid: PeriodicGrid, kernel: KernelSpec, rho, u) -> np.ndarray:
    n, dx = grid.n, grid.dx
    x = grid.x
    out = np.empty(n)
    for i in range(n):
        d = np.abs(x - x[i])
        d = np.minimum(d, grid.L - d)
        w = kernel.phi(d) * rho
        out[i] = np.sum(w * (u - u[i])) / np.sum(w)
    return out


# --- dissipation ---------------------------------------------------------------------

def dissipation_quad(g, x: float, alpha: float = 1.0, dg0: float | None = None) -> float:
    """``int |g(x) - g(x+z)|^2 phi_alpha(|z|) dz`` over one period by adaptive quadrature.

    ``g`` is a 2 pi-periodic callable.  Each half-period is integrated with
    the algebraic weight ``z^{1-alpha}``, leaving the smooth factor
    ``phi_alpha(z) z^{1+alpha} ((g(x) - g(x+z)) / z)^2``; ``dg0`` is
    ``g'(x)``, the limit of the difference quotient.
    """
    if dg0 is None:
        hh = 1e-6
        dg0 = (g(x + hh) - g(x - hh)) / (2 * hh)
    total = 0.0
    for sgn in (1.0, -1.0):
        def smooth(z, sgn=sgn):
            if z == 0.0:
                return dg0 * dg0
            q = (g(x) - g(x + sgn * z)) / z
            return float(periodized_kernel_zeta(alpha, z)) * z ** (1.0 + alpha) * q * q

        val, _ = integrate.quad(smooth, 0.0, math.pi, weight="alg", wvar=(1.0 - alpha, 0.0),
                                epsabs=1e-13, epsrel=1e-12, limit=400)
        total += val
    return total


def dissipation_cos_closed(alpha: float) -> float:
    """``D cos(0) = int_R (1 - cos z)^2 |z|^{-1-alpha} dz = c_alpha (2 - 2^{alpha-1})``."""
    return fractional_constant_closed(alpha) * (2.0 - 2.0 ** (alpha - 1.0))


def enhancement_sin_closed() -> float:
    """For ``u = sin x`` and ``alpha = 1``: ``D cos(x) = pi`` at every ``x``, so the minimum of
    ``D u' V / |u'|^3`` is ``2 pi`` (attained where ``|cos x| = 1``)."""
    return 2.0 * math.pi
