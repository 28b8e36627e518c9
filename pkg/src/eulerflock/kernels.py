"""Influence kernels and the alignment forces they generate.

Three families are supported:

``bounded``
    a positive, even, bounded ``phi`` acting through the symmetric
    commutator ``phi*(rho u) - (phi*rho) u``;
``mt``
    the same ``phi`` with the adaptive (locally normalized) form
    ``1 / (phi*rho)``;
``singular``
    the periodized kernel ``sum_k |x + L k|^{-1-alpha}`` of the fractional
    Laplacian, applied in commutator form ``L(rho u) - u L(rho)``.

Bounded profiles come from a small registry of closed forms (or from a
user table) and are evaluated at torus distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .spectral import (
    TWO_PI,
    PeriodicGrid,
    check_field,
    convolution_symbol,
    fractional_constant,
    fractional_symbol,
)

VARIANTS = ("bounded", "mt", "singular")


class SingularPointError(ValueError):
    """The periodized singular kernel was evaluated at its pole."""


class DegenerateNormalizationError(ArithmeticError):
    """``phi*rho`` vanished somewhere, so the adaptive normalization is undefined."""


class UnsupportedKernelError(ValueError):
    pass


# --- bounded profile registry -------------------------------------------------

def _constant(r, c=1.0):
    return np.full_like(np.asarray(r, dtype=float), c)


def _raised_cosine(r, a=2.0, b=1.0):
    return a + b * np.cos(r)


def _gaussian(r, amp=1.0, sigma=1.0):
    return amp * np.exp(-0.5 * (np.asarray(r) / sigma) ** 2)


def _algebraic(r, amp=1.0, beta=1.0):
    return amp * (1.0 + np.asarray(r) ** 2) ** (-0.5 * beta)


KERNEL_REGISTRY: dict[str, tuple[Callable, dict[str, float]]] = {
    "constant": (_constant, {"c": 1.0}),
    "raised_cosine": (_raised_cosine, {"a": 2.0, "b": 1.0}),
    "gaussian": (_gaussian, {"amp": 1.0, "sigma": 1.0}),
    "algebraic": (_algebraic, {"amp": 1.0, "beta": 1.0}),
}


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of an influence kernel.

    Use the constructors :meth:`bounded`, :meth:`mt`, :meth:`singular` and
    :meth:`from_table` rather than building instances by hand.
    """

    variant: str
    name: str = "constant"
    params: tuple = ()
    alpha: float | None = None
    truncation: int = 64
    table: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown kernel variant {self.variant!r}; expected one of {VARIANTS}")
        if self.variant == "singular":
            if self.alpha is None or not 0.0 < self.alpha < 2.0:
                raise ValueError(f"singular kernel needs alpha in (0, 2), got {self.alpha}")
            if self.truncation < 1:
                raise ValueError("image-sum truncation must be >= 1")
            return
        if self.name == "tabulated":
            if self.table is None:
                raise ValueError("tabulated kernel needs a (radii, values) table")
            return
        if self.name not in KERNEL_REGISTRY:
            raise ValueError(f"unknown kernel profile {self.name!r}; "
                             f"expected one of {sorted(KERNEL_REGISTRY)} or 'tabulated'")
        allowed = KERNEL_REGISTRY[self.name][1]
        unknown = set(dict(self.params)) - set(allowed)
        if unknown:
            raise ValueError(f"unknown parameters {sorted(unknown)} for kernel {self.name!r}")

    # constructors
    @classmethod
    def bounded(cls, name: str = "constant", **params) -> KernelSpec:
        return cls("bounded", name, tuple(sorted(params.items())))

    @classmethod
    def mt(cls, name: str = "constant", **params) -> KernelSpec:
        return cls("mt", name, tuple(sorted(params.items())))

    @classmethod
    def singular(cls, alpha: float, truncation: int = 64) -> KernelSpec:
        return cls("singular", "fractional", (), float(alpha), int(truncation))

    @classmethod
    def from_table(cls, radii, values, variant: str = "bounded") -> KernelSpec:
        """Kernel given as samples of ``phi(r)`` on increasing radii, linearly interpolated."""
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.shape != values.shape or radii.size < 2:
            raise ValueError("kernel table needs matching 1-D radii and values")
        if np.any(np.diff(radii) <= 0) or radii[0] > 0:
            raise ValueError("kernel table radii must increase and start at 0")
        if not np.all(values > 0) or not np.all(np.isfinite(values)):
            raise ValueError("tabulated kernel must be finite and strictly positive")
        return cls(variant, "tabulated", (), table=(tuple(radii), tuple(values)))

    @property
    def is_singular(self) -> bool:
        return self.variant == "singular"

    @property
    def parameters(self) -> dict[str, float]:
        if self.name == "tabulated" or self.is_singular:
            return dict(self.params)
        return {**KERNEL_REGISTRY[self.name][1], **dict(self.params)}

    def phi(self, r, period: float = TWO_PI):
        """Radial profile ``phi(r)``; for the singular family, the periodized kernel."""
        if self.is_singular:
            return periodized_kernel_eval(self.alpha, r, self.truncation, period=period)
        r = np.abs(np.asarray(r, dtype=float))
        if self.name == "tabulated":
            radii, values = (np.asarray(a) for a in self.table)
            return np.interp(r, radii, values)
        fn = KERNEL_REGISTRY[self.name][0]
        return fn(r, **self.parameters)

    def integral(self, upper: float) -> float:
        """``int_0^upper phi(s) ds`` for bounded profiles."""
        if self.is_singular:
            raise UnsupportedKernelError("the singular kernel is not integrable at the origin")
        if upper <= 0:
            return 0.0
        val, _ = integrate.quad(lambda s: float(self.phi(s)), 0.0, upper, limit=200)
        return val


def kernel_table(kernel: KernelSpec, grid: PeriodicGrid) -> np.ndarray:
    """``phi`` sampled at the torus distance of every node from the origin."""
    return _table(kernel, grid).copy()


@lru_cache(maxsize=64)
def _table(kernel: KernelSpec, grid: PeriodicGrid) -> np.ndarray:
    if kernel.is_singular:
        raise UnsupportedKernelError("the singular kernel has no finite table; use its symbol")
    tab = kernel.phi(grid.torus_distance(grid.x))
    if not np.all(tab > 0):
        raise ValueError(f"kernel {kernel.name!r} is not strictly positive on the torus")
    tab.setflags(write=False)
    return tab


@lru_cache(maxsize=64)
def kernel_symbol(kernel: KernelSpec, grid: PeriodicGrid) -> np.ndarray:
    """Real rfft multiplier of the operator ``f -> phi*f`` (bounded) or ``L_alpha f`` (singular)."""
    if kernel.is_singular:
        sym = fractional_symbol(grid, kernel.alpha)
    else:
        sym = convolution_symbol(grid, _table(kernel, grid)).real
    sym.setflags(write=False)
    return sym


def kernel_bounds(kernel: KernelSpec, period: float = TWO_PI) -> tuple[float, float]:
    """Infimum and supremum of ``phi`` over torus distances ``[0, period/2]``.

    The singular family is unbounded above; its infimum sits at the antipode.
    """
    half = 0.5 * period
    if kernel.is_singular:
        return float(periodized_kernel_eval(kernel.alpha, half, kernel.truncation, period)), math.inf

    r = np.linspace(0.0, half, 20001)
    vals = kernel.phi(r)
    lo, hi = float(vals.min()), float(vals.max())
    step = r[1] - r[0]
    for sign, idx in ((1.0, int(vals.argmin())), (-1.0, int(vals.argmax()))):
        a, b = max(0.0, r[idx] - step), min(half, r[idx] + step)
        res = optimize.minimize_scalar(lambda s: sign * float(kernel.phi(s)), bounds=(a, b),
                                       method="bounded", options={"xatol": 1e-13})
        if sign > 0:
            lo = min(lo, float(res.fun))
        else:
            hi = max(hi, -float(res.fun))
    return lo, hi


def _tail_sum(offset, s: float, period: float, start: int):
    """Euler-Maclaurin estimate of ``sum_{k >= start} (period k + offset)^{-s}``."""
    y = period * (start - 0.5) + offset
    integral = y ** (1.0 - s) / (period * (s - 1.0))
    d1 = -s * period * y ** (-s - 1.0)
    d3 = -s * (s + 1.0) * (s + 2.0) * period ** 3 * y ** (-s - 3.0)
    return integral + d1 / 24.0 - 7.0 * d3 / 5760.0


def periodized_kernel_eval(alpha: float, x, truncation: int = 64, period: float = TWO_PI):
    """``sum_k |x + period k|^{-1-alpha}`` by a truncated image sum plus a tail correction.

    Images with ``|k| <= truncation`` are summed exactly; the rest is
    replaced by its Euler-Maclaurin integral estimate (error far below
    1e-10 for the default truncation of 64).
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    s = 1.0 + alpha
    xs = np.asarray(x, dtype=float)
    r = np.remainder(np.abs(xs), period)
    r = np.minimum(r, period - r)
    if np.any(r == 0.0):
        raise SingularPointError("periodized kernel is singular at x = 0 (mod period)")
    ks = period * np.arange(1, truncation + 1)
    rr = r[..., None]
    total = r ** -s + np.sum((ks + rr) ** -s + (ks - rr) ** -s, axis=-1)
    total = total + _tail_sum(r, s, period, truncation + 1) + _tail_sum(-r, s, period, truncation + 1)
    return float(total) if total.ndim == 0 else total


# --- forces -------------------------------------------------------------------

def commutator_force(grid: PeriodicGrid, kernel: KernelSpec, rho, u) -> np.ndarray:
    """Alignment force ``int phi(|x-y|) (u(y) - u(x)) rho(y) dy``.

    Bounded kernels: ``phi*(rho u) - (phi*rho) u``.  Singular kernels:
    ``L_alpha(rho u) - u L_alpha(rho)``.  The adaptive variant is delegated
    to :func:`mt_normalized_force`.
    """
    if kernel.variant == "mt":
        return mt_normalized_force(grid, kernel, rho, u)
    rho = check_field(grid, rho)
    u = check_field(grid, u)
    sym = kernel_symbol(kernel, grid)
    n = grid.n
    return (np.fft.irfft(sym * np.fft.rfft(rho * u), n=n)
            - u * np.fft.irfft(sym * np.fft.rfft(rho), n=n))


def mt_normalized_force(grid: PeriodicGrid, kernel: KernelSpec, rho, u) -> np.ndarray:
    """Force with adaptive normalization: ``[phi*(rho u) - (phi*rho) u] / (phi*rho)``."""
    if kernel.is_singular:
        raise UnsupportedKernelError("adaptive normalization needs a bounded kernel")
    rho = check_field(grid, rho)
    u = check_field(grid, u)
    sym = kernel_symbol(kernel, grid)
    n = grid.n
    h = np.fft.irfft(sym * np.fft.rfft(rho), n=n)
    if not np.all(h > 0):
        raise DegenerateNormalizationError(
            f"phi*rho has minimum {h.min():.3e}; the adaptive normalization is undefined")
    return np.fft.irfft(sym * np.fft.rfft(rho * u), n=n) / h - u


__all__ = [
    "KERNEL_REGISTRY", "KernelSpec", "SingularPointError", "DegenerateNormalizationError",
    "UnsupportedKernelError", "kernel_table", "kernel_symbol", "kernel_bounds",
    "periodized_kernel_eval", "commutator_force", "mt_normalized_force", "fractional_constant",
]
