"""Real-argument special functions: log-gamma, the one-parameter
Mittag-Leffler function and the Atangana-Baleanu normalization B(alpha).

The Mittag-Leffler function

.. math::

    E_\\alpha(z) = \\sum_{k=0}^\\infty \\frac{z^k}{\\Gamma(\\alpha k + 1)}

is evaluated on three branches:

* the power series for ``z >= -integral_switch`` (every positive argument),
* a finite-interval integral representation for moderately negative ``z``,
  which has a positive integrand and therefore no cancellation,
* the algebraic asymptotic expansion for ``z <= -asymptotic_switch``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.integrate import quad

__all__ = [
    "DomainError",
    "MlConfig",
    "NonConvergenceError",
    "Order",
    "ab_kernel",
    "b_normalization",
    "gamma_ln",
    "mittag_leffler",
]


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NonConvergenceError(ArithmeticError):
    """An iterative evaluation stopped before meeting its tolerance."""


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 1.0) or math.isnan(alpha):
        raise DomainError(f"order alpha must lie in (0, 1], got {alpha!r}")


@dataclass(frozen=True)
class MlConfig:
    #: relative truncation threshold for the power series
    rel_tol: float = 1.0e-13
    #: hard cap on the number of series (or asymptotic) terms
    max_terms: int = 500
    #: ``z <= -asymptotic_switch`` uses the asymptotic expansion
    asymptotic_switch: float = 1.0e3
    #: ``-asymptotic_switch < z < -integral_switch`` uses the integral form
    integral_switch: float = 0.25

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if self.max_terms < 10:
            raise DomainError(f"max_terms must be >= 10, got {self.max_terms!r}")
        if not 0 < self.integral_switch <= self.asymptotic_switch:
            raise DomainError(
                "need 0 < integral_switch <= asymptotic_switch, got "
                f"{self.integral_switch!r} and {self.asymptotic_switch!r}"
            )


DEFAULT_ML_CONFIG = MlConfig()


@dataclass(frozen=True)
class Order:
    """Fractional order together with its cached normalization B(alpha)."""

    alpha: float
    b_alpha: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        object.__setattr__(self, "b_alpha", b_normalization(self.alpha))

    @property
    def local_weight(self) -> float:
        """Coefficient ``(1 - alpha) / B(alpha)`` of the local term."""
        return (1.0 - self.alpha) / self.b_alpha

    @property
    def memory_weight(self) -> float:
        """Coefficient ``alpha / (B(alpha) Gamma(alpha))`` of the memory term."""
        return self.alpha / (self.b_alpha * math.gamma(self.alpha))


def gamma_ln(x: float) -> float:
    """Natural logarithm of the gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"gamma_ln requires x > 0, got {x!r}")
    return math.lgamma(x)


def b_normalization(alpha: float) -> float:
    r"""Return :math:`B(\alpha) = 1 - \alpha + \alpha / \Gamma(\alpha)`."""
    _check_alpha(alpha)
    return 1.0 - alpha + alpha / math.gamma(alpha)


def _rgamma(x: float) -> float:
    # 1/Gamma is entire; zero at the poles of Gamma
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _ml_series(alpha: float, z: float, cfg: MlConfig) -> float:
    if z == 0.0:
        return 1.0

    terms = [1.0]
    partial = 1.0
    log_abs_z = math.log(abs(z))
    quiet = 0
    for k in range(1, cfg.max_terms):
        arg = alpha * k + 1.0
        if arg < 170.0:
            term = z**k / math.gamma(arg)
        else:
            # log form once Gamma overflows
            term = math.exp(k * log_abs_z - math.lgamma(arg))
            if z < 0 and k % 2 == 1:
                term = -term
        terms.append(term)
        partial += term

        # alternating terms: a single small term is not enough
        if abs(term) <= cfg.rel_tol * abs(partial):
            quiet += 1
            if quiet == 2:
                return math.fsum(terms)
        else:
            quiet = 0

    raise NonConvergenceError(
        f"Mittag-Leffler series did not converge in {cfg.max_terms} terms "
        f"(alpha={alpha!r}, z={z!r})"
    )


def _ml_negative_integral(alpha: float, x: float, cfg: MlConfig) -> float:
    # E_a(-x) = 1/(a pi) int_0^{a pi} exp(-(x sin(a pi - p)/sin p)^{1/a}) dp
    # the integrand rises monotonically from 0 to 1 with boundary layers at
    # both ends, so the interval is cut geometrically towards each end
    api = alpha * math.pi
    log_x = math.log(x)

    def integrand(p: float) -> float:
        ratio = math.sin(api - p) / math.sin(p)
        if ratio <= 0.0:
            return 1.0
        log_arg = (log_x + math.log(ratio)) / alpha
        if log_arg > 6.6:
            # exp(-exp(6.6)) underflows
            return 0.0
        return math.exp(-math.exp(log_arg))

    cuts = {api * 10.0**-k for k in range(1, 17)}
    cuts |= {api * (1.0 - 10.0**-k) for k in range(1, 17)}
    edges = [0.0, *sorted(cuts), api]

    epsrel = max(cfg.rel_tol, 5.0e-14)
    pieces = [
        # full_output keeps quadpack diagnostics off the warnings channel
        quad(integrand, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200, full_output=1)[0]
        for lo, hi in zip(edges[:-1], edges[1:])
        if hi > lo
    ]
    return math.fsum(pieces) / api


def _ml_asymptotic(alpha: float, z: float, cfg: MlConfig) -> float:
    # E_a(z) ~ -sum_{k>=1} z^{-k} / Gamma(1 - a k), truncated at its smallest term
    terms: list[float] = []
    smallest = math.inf
    for k in range(1, cfg.max_terms):
        term = -_rgamma(1.0 - alpha * k) * z ** (-k)
        if term == 0.0:
            continue
        if abs(term) > smallest:
            break
        smallest = abs(term)
        terms.append(term)
        if smallest <= 1e-17 * abs(terms[0]):
            break
    return math.fsum(terms)


def mittag_leffler(alpha: float, z: float, cfg: MlConfig = DEFAULT_ML_CONFIG) -> float:
    r"""Evaluate :math:`E_\alpha(z)` for real ``z`` and ``0 < alpha <= 1``.

    :raises DomainError: if *alpha* is outside :math:`(0, 1]` or *z* is NaN.
    :raises NonConvergenceError: if the power series needs more than
        ``cfg.max_terms`` terms (large positive arguments).
    """
    _check_alpha(alpha)
    z = float(z)
    if math.isnan(z):
        raise DomainError("z must not be NaN")

    if z == 0.0:
        return 1.0
    if z >= -cfg.integral_switch:
        return _ml_series(alpha, z, cfg)
    if alpha == 1.0:
        return math.exp(z)
    if z > -cfg.asymptotic_switch:
        return _ml_negative_integral(alpha, -z, cfg)
    return _ml_asymptotic(alpha, z, cfg)


def ab_kernel(
    alpha: float, t_minus_x: float, cfg: MlConfig = DEFAULT_ML_CONFIG
) -> float:
    r"""Atangana-Baleanu kernel
    :math:`E_\alpha[-\alpha (t - x)^\alpha / (1 - \alpha)]` for ``0 < alpha < 1``.

    The kernel is undefined at ``alpha = 1``, where the derivative becomes the
    classical one; callers must handle that case themselves.
    """
    _check_alpha(alpha)
    if alpha == 1.0:
        raise DomainError("the Atangana-Baleanu kernel is undefined at alpha = 1")
    if not t_minus_x >= 0:
        raise DomainError(f"t - x must be non-negative, got {t_minus_x!r}")
    if t_minus_x == 0.0:
        return 1.0
    return mittag_leffler(alpha, -alpha * t_minus_x**alpha / (1.0 - alpha), cfg)
