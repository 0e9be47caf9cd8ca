"""Product-integration weights for the kernel ``(t_{n+1} - s)^(alpha - 1)``.

With a uniform step ``h`` the two rules read

* trapezoid (piecewise-linear interpolant)::

      int_0^{t_{n+1}} (t_{n+1} - s)^(alpha-1) g(s) ds
          ~ h^alpha / (alpha (alpha + 1)) * sum_{j=0}^{n+1} a[j] g(t_j)

* rectangle (piecewise-constant, left endpoint)::

      int_0^{t_{n+1}} (t_{n+1} - s)^(alpha-1) g(s) ds
          ~ h^alpha / alpha * sum_{j=0}^{n} b[j] g(t_j)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from abfode.special import DomainError, _check_alpha

__all__ = ["WeightTable", "rectangle_weights", "trapezoid_weights", "weight_table"]


def _check_step(n: int) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"step index must be a non-negative integer, got {n!r}")


def trapezoid_weights(n: int, alpha: float) -> np.ndarray:
    """Weights ``a[j]`` (``j = 0..n+1``) of the product trapezoid rule on
    ``[0, t_{n+1}]``; the last weight is exactly 1."""
    _check_step(n)
    _check_alpha(alpha)

    p = alpha + 1.0
    a = np.empty(n + 2)
    a[0] = float(n) ** p - (n - alpha) * float(n + 1) ** alpha

    # second differences of m^(alpha+1), m = n - j
    m = np.arange(n - 1, -1, -1, dtype=np.float64)
    a[1 : n + 1] = np.power(m + 2.0, p) + np.power(m, p) - 2.0 * np.power(m + 1.0, p)
    a[n + 1] = 1.0

    return a


def rectangle_weights(n: int, alpha: float) -> np.ndarray:
    """Weights ``b[j] = (n + 1 - j)^alpha - (n - j)^alpha`` for ``j = 0..n``."""
    _check_step(n)
    _check_alpha(alpha)

    m = np.arange(n, -1, -1, dtype=np.float64)
    return np.power(m + 1.0, alpha) - np.power(m, alpha)


@dataclass(frozen=True)
class WeightTable:
    """Cached trapezoid and rectangle weights for steps ``n = 0..n_steps-1``."""

    alpha: float
    a: tuple[np.ndarray, ...]
    b: tuple[np.ndarray, ...]

    @property
    def n_steps(self) -> int:
        return len(self.a)


@lru_cache(maxsize=32)
def weight_table(alpha: float, n_steps: int) -> WeightTable:
    a = []
    b = []
    for n in range(n_steps):
        an = trapezoid_weights(n, alpha)
        bn = rectangle_weights(n, alpha)
        an.setflags(write=False)
        bn.setflags(write=False)
        a.append(an)
        b.append(bn)

    return WeightTable(alpha=alpha, a=tuple(a), b=tuple(b))
