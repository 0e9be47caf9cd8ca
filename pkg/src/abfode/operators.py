r"""Discrete Atangana-Baleanu operators on uniformly sampled functions.

All operators use base point 0 and the kernel

.. math::

    K_\alpha(s) = E_\alpha\left[-\frac{\alpha s^\alpha}{1 - \alpha}\right],

which is bounded with :math:`K_\alpha(0) = 1`. Integrals against this kernel
use the plain composite trapezoid rule. The weakly singular integral inside
the fractional integral uses the product trapezoid weights, which are exact
for piecewise-linear data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from abfode.special import (
    DEFAULT_ML_CONFIG,
    DomainError,
    MlConfig,
    Order,
    ab_kernel,
)
from abfode.weights import trapezoid_weights

__all__ = [
    "Mesh",
    "SampledFunction",
    "ab_caputo_derivative",
    "ab_integral",
    "ab_rl_derivative",
    "kernel_samples",
]


@dataclass(frozen=True)
class Mesh:
    """Uniform lattice ``t_n = n h`` on ``[0, t_end]`` with ``h = t_end / n_steps``."""

    t_end: float
    n_steps: int

    def __post_init__(self) -> None:
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise DomainError(f"t_end must be positive and finite, got {self.t_end!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError(f"n_steps must be a positive integer, got {self.n_steps!r}")

    @property
    def h(self) -> float:
        return self.t_end / self.n_steps

    @cached_property
    def nodes(self) -> np.ndarray:
        t = np.arange(self.n_steps + 1, dtype=np.float64) * self.h
        t.setflags(write=False)
        return t


@dataclass(frozen=True)
class SampledFunction:
    mesh: Mesh
    values: np.ndarray
    derivative_values: np.ndarray | None = None

    def __post_init__(self) -> None:
        npts = self.mesh.n_steps + 1
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (npts,):
            raise DomainError(f"expected {npts} samples, got shape {values.shape}")
        object.__setattr__(self, "values", values)

        if self.derivative_values is not None:
            dvalues = np.asarray(self.derivative_values, dtype=np.float64)
            if dvalues.shape != (npts,):
                raise DomainError(
                    f"expected {npts} derivative samples, got shape {dvalues.shape}"
                )
            object.__setattr__(self, "derivative_values", dvalues)

    @classmethod
    def from_callable(cls, mesh, func, derivative=None) -> SampledFunction:
        t = mesh.nodes
        values = np.array([func(ti) for ti in t], dtype=np.float64)
        dvalues = None
        if derivative is not None:
            dvalues = np.array([derivative(ti) for ti in t], dtype=np.float64)
        return cls(mesh, values, dvalues)


def _check_node(mesh: Mesh, n: int, lo: int, hi: int) -> None:
    if int(n) != n or not lo <= n <= hi:
        raise IndexError(f"node index {n!r} outside [{lo}, {hi}] (N = {mesh.n_steps})")


def _require_fractional(order: Order) -> None:
    if order.alpha == 1.0:
        raise DomainError(
            "Atangana-Baleanu derivatives are undefined at alpha = 1; "
            "use the classical derivative instead"
        )


def kernel_samples(
    mesh: Mesh, order: Order, cfg: MlConfig = DEFAULT_ML_CONFIG
) -> np.ndarray:
    """Return ``K[m] = K_alpha(m h)`` for ``m = 0..N``."""
    _require_fractional(order)
    return np.array(
        [ab_kernel(order.alpha, m * mesh.h, cfg) for m in range(mesh.n_steps + 1)]
    )


def _kernel_trapezoid(samples: np.ndarray, kernel: np.ndarray, m: int, h: float) -> float:
    # int_0^{t_m} f(x) K(t_m - x) dx, composite trapezoid
    if m == 0:
        return 0.0
    prod = samples[: m + 1] * kernel[m::-1]
    return h * (0.5 * prod[0] + prod[1:m].sum() + 0.5 * prod[m])


def ab_integral(f: SampledFunction, order: Order, n: int) -> float:
    """Atangana-Baleanu fractional integral of *f* at node ``t_n``.

    The Riemann-Liouville part is evaluated with the product trapezoid rule,
    so the result is exact for piecewise-linear *f*. At ``alpha = 1`` it
    reduces to the composite trapezoid rule for the ordinary integral.
    """
    mesh = f.mesh
    _check_node(mesh, n, 0, mesh.n_steps)

    local = order.local_weight * f.values[n]
    if n == 0:
        return local

    alpha = order.alpha
    a = trapezoid_weights(n - 1, alpha)
    riemann_liouville = mesh.h**alpha / (alpha * (alpha + 1.0)) * np.dot(a, f.values[: n + 1])
    return local + order.memory_weight * riemann_liouville


def ab_caputo_derivative(
    f: SampledFunction,
    order: Order,
    n: int,
    cfg: MlConfig = DEFAULT_ML_CONFIG,
    *,
    kernel: np.ndarray | None = None,
) -> float:
    """Atangana-Baleanu derivative in Caputo sense at node ``t_n``.

    Requires the caller-supplied samples of ``f'``. *kernel* may carry
    precomputed :func:`kernel_samples` for repeated calls on one mesh.
    """
    _require_fractional(order)
    if f.derivative_values is None:
        raise DomainError("the Caputo-sense derivative needs derivative samples of f")
    mesh = f.mesh
    _check_node(mesh, n, 0, mesh.n_steps)

    if n == 0:
        return 0.0
    if kernel is None:
        kernel = kernel_samples(mesh, order, cfg)

    integral = _kernel_trapezoid(f.derivative_values, kernel, n, mesh.h)
    return order.b_alpha / (1.0 - order.alpha) * integral


def ab_rl_derivative(
    f: SampledFunction,
    order: Order,
    n: int,
    cfg: MlConfig = DEFAULT_ML_CONFIG,
    *,
    kernel: np.ndarray | None = None,
) -> float:
    """Atangana-Baleanu derivative in Riemann-Liouville sense at an interior
    node ``1 <= n <= N - 1``.

    The outer time derivative is a centered difference of the kernel
    convolution evaluated at ``t_{n-1}`` and ``t_{n+1}``.
    """
    _require_fractional(order)
    mesh = f.mesh
    _check_node(mesh, n, 1, mesh.n_steps - 1)

    if kernel is None:
        kernel = kernel_samples(mesh, order, cfg)

    h = mesh.h
    upper = _kernel_trapezoid(f.values, kernel, n + 1, h)
    lower = _kernel_trapezoid(f.values, kernel, n - 1, h)
    return order.b_alpha / (1.0 - order.alpha) * (upper - lower) / (2.0 * h)
