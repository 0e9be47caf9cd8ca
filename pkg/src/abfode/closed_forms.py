"""Reference solutions: closed forms of the fractional test problems and
classical (integer-order) solutions used for comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from abfode.operators import Mesh
from abfode.solver import RhsSpec
from abfode.special import (
    DomainError,
    MlConfig,
    DEFAULT_ML_CONFIG,
    b_normalization,
    gamma_ln,
    mittag_leffler,
)

__all__ = [
    "REFERENCE_LABELS",
    "ReferenceCurve",
    "classical_logistic",
    "exact_example1",
    "exact_example1_half",
    "exact_example3",
    "rk4_reference",
]

REFERENCE_LABELS = ("exact-fractional", "classical-exact", "classical-rk4")


@dataclass(frozen=True)
class ReferenceCurve:
    mesh: Mesh
    values: np.ndarray
    label: str

    def __post_init__(self) -> None:
        if self.label not in REFERENCE_LABELS:
            raise ValueError(f"unknown reference label {self.label!r}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != self.mesh.n_steps + 1:
            raise ValueError(
                f"expected {self.mesh.n_steps + 1} rows, got {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("reference values must be finite")
        object.__setattr__(self, "values", values)


def _check_open_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def exact_example1(t: float, alpha: float, y0: float) -> float:
    """Solution of the fractional problem with right-hand side ``g = t``."""
    _check_open_alpha(alpha)
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t!r}")

    gamma_a = math.exp(gamma_ln(alpha))
    gamma_a2 = math.exp(gamma_ln(alpha + 2.0))
    num = alpha * (alpha * (alpha + 1.0) * y0 + t ** (alpha + 1.0)) - (
        alpha - 1.0
    ) * gamma_a2 * (y0 + t)
    den = alpha * (alpha + 1.0) * (alpha - alpha * gamma_a + gamma_a)
    return num / den


def exact_example1_half(t: float, y0: float) -> float:
    """:func:`exact_example1` simplified for ``alpha = 1/2``."""
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t!r}")
    return y0 + (4.0 * t**1.5 / math.sqrt(math.pi) + 3.0 * t) / (
        6.0 * b_normalization(0.5)
    )


def exact_example3(
    t: float, alpha: float, y0: float, cfg: MlConfig = DEFAULT_ML_CONFIG
) -> float:
    """Closed form for the right-hand side ``g = y``.

    Note that this expression does not reduce to ``y0`` at ``t = 0``; it
    carries the factor ``B / (B + alpha - 1)`` there.
    """
    _check_open_alpha(alpha)
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t!r}")

    b = b_normalization(alpha)
    denom = b + alpha - 1.0
    return b / denom * y0 * mittag_leffler(alpha, alpha * t**alpha / denom, cfg)


def classical_logistic(t: float, r: float, y0: float) -> float:
    """Solution of ``y' = r y (1 - y)``."""
    if not 0.0 < y0 < 1.0:
        raise DomainError(f"y0 must lie in (0, 1), got {y0!r}")

    # written with exp(-r t) when r t > 0 so that large growth cannot overflow
    rt = r * t
    if rt > 0:
        return y0 / (y0 + (1.0 - y0) * math.exp(-rt))
    e = math.exp(rt)
    return y0 * e / (1.0 - y0 + y0 * e)


def rk4_reference(
    rhs: RhsSpec, y0, mesh: Mesh, *, substeps: int = 1
) -> ReferenceCurve:
    """Classical fourth-order Runge-Kutta solution of ``y' = g(t, y)`` sampled
    at the mesh nodes, taking *substeps* RK4 steps per mesh interval."""
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps!r}")

    y = np.atleast_1d(np.asarray(y0, dtype=np.float64)).copy()
    if y.shape != (rhs.dim,):
        raise DomainError(f"{rhs.id!r} has dimension {rhs.dim}, got y0 of shape {y.shape}")

    h = mesh.h / substeps
    values = np.empty((mesh.n_steps + 1, rhs.dim))
    values[0] = y

    for n in range(mesh.n_steps):
        for k in range(substeps):
            t = (n * substeps + k) * h
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        if not np.all(np.isfinite(y)):
            raise ArithmeticError(f"RK4 reference produced a non-finite state at step {n}")
        values[n + 1] = y

    return ReferenceCurve(mesh, values, "classical-rk4")
