r"""Predictor-corrector time stepping for

.. math::

    {}^{ABC}_0 D^\alpha_t y(t) = g(t, y(t)), \qquad y(0) = y_0,

written as the Volterra equation

.. math::

    y(t) = y_0 + \frac{1 - \alpha}{B(\alpha)} g(t, y(t))
        + \frac{\alpha}{B(\alpha) \Gamma(\alpha)}
          \int_0^t (t - s)^{\alpha - 1} g(s, y(s)) \,\mathrm{d}s.

Each step applies a product-rectangle predictor and a product-trapezoid
corrector. Both keep the local term :math:`(1-\alpha)/B(\alpha)\, g(t_{n+1}, y)`
implicit, and each implicit equation is solved by damped fixed-point
iteration.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from abfode.operators import Mesh
from abfode.special import DomainError, Order
from abfode.weights import weight_table

log = logging.getLogger(__name__)

__all__ = [
    "RHS_REGISTRY",
    "ImplicitSolveError",
    "Problem",
    "RhsDefinition",
    "RhsSpec",
    "SolverConfig",
    "StepResult",
    "Trajectory",
    "corrector_step",
    "integrate",
    "predictor_step",
    "register_rhs",
    "solve_implicit",
]

Array = np.ndarray
RhsFunction = Callable[[float, Array, Mapping[str, float]], Array]


class ImplicitSolveError(ArithmeticError):
    """The fixed-point iteration for an implicit step did not converge."""

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step


# {{{ right-hand sides


@dataclass(frozen=True)
class RhsDefinition:
    name: str
    dim: int
    func: RhsFunction
    defaults: Mapping[str, float] = field(default_factory=dict)
    #: False when g(t, y) does not depend on y
    state_dependent: bool = True
    description: str = ""


RHS_REGISTRY: dict[str, RhsDefinition] = {}


def register_rhs(definition: RhsDefinition) -> RhsDefinition:
    if definition.name in RHS_REGISTRY:
        raise ValueError(f"right-hand side {definition.name!r} is already registered")
    RHS_REGISTRY[definition.name] = definition
    return definition


def _linear_t(t: float, y: Array, p: Mapping[str, float]) -> Array:
    return np.full_like(y, t)


def _exp_ty(t: float, y: Array, p: Mapping[str, float]) -> Array:
    return np.exp(-t * y)


def _linear_y(t: float, y: Array, p: Mapping[str, float]) -> Array:
    return y.copy()


def _logistic(t: float, y: Array, p: Mapping[str, float]) -> Array:
    return p["r"] * y * (1.0 - y)


def _lotka_volterra(t: float, y: Array, p: Mapping[str, float]) -> Array:
    x, z = y
    return np.array([p["a"] * x - p["b"] * x * z, -p["c"] * z + p["d"] * x * z])


for _definition in (
    RhsDefinition("linear_t", 1, _linear_t, state_dependent=False, description="g = t"),
    RhsDefinition("exp_ty", 1, _exp_ty, description="g = exp(-t y)"),
    RhsDefinition("linear_y", 1, _linear_y, description="g = y"),
    RhsDefinition(
        "logistic", 1, _logistic, defaults={"r": -5.0}, description="g = r y (1 - y)"
    ),
    RhsDefinition(
        "lotka_volterra",
        2,
        _lotka_volterra,
        defaults={"a": 1.0, "b": 2.0, "c": 3.0, "d": 4.0},
        description="g = (a x - b x y, -c y + d x y)",
    ),
):
    register_rhs(_definition)


@dataclass(frozen=True)
class RhsSpec:
    """A registered right-hand side together with its parameter values.

    Missing parameters are filled from the registry defaults; unknown ones
    are rejected.
    """

    id: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.id not in RHS_REGISTRY:
            raise DomainError(
                f"unknown right-hand side {self.id!r}; "
                f"available: {', '.join(sorted(RHS_REGISTRY))}"
            )
        definition = RHS_REGISTRY[self.id]

        unknown = set(self.params) - set(definition.defaults)
        if unknown:
            raise DomainError(
                f"unknown parameters for {self.id!r}: {', '.join(sorted(unknown))}"
            )
        params = {**definition.defaults, **{k: float(v) for k, v in self.params.items()}}
        object.__setattr__(self, "params", params)

    @property
    def definition(self) -> RhsDefinition:
        return RHS_REGISTRY[self.id]

    @property
    def dim(self) -> int:
        return self.definition.dim

    @property
    def state_dependent(self) -> bool:
        return self.definition.state_dependent

    def __call__(self, t: float, y: Array) -> Array:
        return self.definition.func(t, y, self.params)


# }}}


# {{{ problem and configuration


@dataclass(frozen=True)
class Problem:
    rhs: RhsSpec
    order: Order
    mesh: Mesh
    y0: Array

    def __post_init__(self) -> None:
        y0 = np.atleast_1d(np.asarray(self.y0, dtype=np.float64)).copy()
        if y0.shape != (self.rhs.dim,):
            raise DomainError(
                f"{self.rhs.id!r} has dimension {self.rhs.dim}, got y0 of shape {y0.shape}"
            )
        if not np.all(np.isfinite(y0)):
            raise DomainError("y0 must be finite")
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)


@dataclass(frozen=True)
class SolverConfig:
    #: max-norm residual tolerance of the implicit equations
    fp_tol: float = 1.0e-12
    #: iterations allowed per damping level
    fp_max_iter: int = 200
    #: initial relaxation factor of the fixed-point iteration
    damping: float = 1.0
    #: which past values the predictor memory sum is evaluated on,
    #: ``"predictor"`` (its own earlier values) or ``"corrector"``
    predictor_history: str = "predictor"

    def __post_init__(self) -> None:
        if not self.fp_tol > 0:
            raise DomainError(f"fp_tol must be positive, got {self.fp_tol!r}")
        if self.fp_max_iter < 1:
            raise DomainError(f"fp_max_iter must be >= 1, got {self.fp_max_iter!r}")
        if not 0 < self.damping <= 1:
            raise DomainError(f"damping must be in (0, 1], got {self.damping!r}")
        if self.predictor_history not in ("predictor", "corrector"):
            raise DomainError(
                "predictor_history must be 'predictor' or 'corrector', "
                f"got {self.predictor_history!r}"
            )


MIN_DAMPING = 2.0**-6


@dataclass(frozen=True)
class Trajectory:
    mesh: Mesh
    predictor_values: Array
    corrector_values: Array
    #: ``(N, 2)`` iteration counts of the predictor and corrector solves
    iteration_counts: Array

    @property
    def t(self) -> Array:
        return self.mesh.nodes

    @property
    def dim(self) -> int:
        return self.corrector_values.shape[1]


class StepResult(NamedTuple):
    value: Array
    iterations: int


# }}}


# {{{ implicit solve


def solve_implicit(
    func: Callable[[Array], Array], seed: Array, cfg: SolverConfig
) -> StepResult:
    """Find ``y = func(y)`` by damped fixed-point iteration.

    The relaxation factor starts at ``cfg.damping``. It is halved (down to
    ``2**-6``) when the max-norm residual grows three times in a row, when
    the map produces non-finite values, or when ``cfg.fp_max_iter``
    iterations pass without convergence. Each new level restarts from the
    best iterate seen so far.

    :returns: the fixed point and the number of iterations after the seed
        evaluation.
    :raises ImplicitSolveError: if the iteration budget at the minimum
        relaxation factor is exhausted.
    """
    seed = np.atleast_1d(np.asarray(seed, dtype=np.float64))
    damping = cfg.damping
    total = 0
    best, best_residual = seed, math.inf

    while True:
        y = best
        fy = func(y)
        prev_residual = math.inf
        growth = 0

        for _ in range(cfg.fp_max_iter):
            total += 1
            if not np.all(np.isfinite(fy)):
                break

            y = fy if damping == 1.0 else (1.0 - damping) * y + damping * fy
            fy = func(y)
            residual = float(np.max(np.abs(y - fy)))
            if residual <= cfg.fp_tol:
                return StepResult(y, total)
            if not math.isfinite(residual):
                break
            if residual < best_residual:
                best, best_residual = y, residual

            growth = growth + 1 if residual > prev_residual else 0
            if growth >= 3:
                break
            prev_residual = residual

        if damping <= MIN_DAMPING:
            raise ImplicitSolveError(
                f"fixed-point iteration did not converge to {cfg.fp_tol:g} "
                f"(residual {best_residual:.3g} after {total} iterations)"
            )

        damping = max(0.5 * damping, MIN_DAMPING)
        log.debug("implicit solve stalled: damping reduced to %g", damping)


# }}}


# {{{ steps


def _g_rows(problem: Problem, values: Array, count: int) -> Array:
    t = problem.mesh.nodes
    return np.array([problem.rhs(t[j], values[j]) for j in range(count)])


def _local_map(problem: Problem, n: int, offset: Array) -> Callable[[Array], Array]:
    t_next = problem.mesh.nodes[n + 1]
    c = problem.order.local_weight
    rhs = problem.rhs

    if c == 0.0:
        # alpha = 1: the local term vanishes and the step is explicit
        return lambda y: offset

    return lambda y: offset + c * rhs(t_next, y)


def predictor_step(
    problem: Problem,
    history: Array,
    n: int,
    cfg: SolverConfig,
    *,
    g_history: Array | None = None,
    seed: Array | None = None,
) -> StepResult:
    """Predicted value at ``t_{n+1}`` from the product rectangle rule.

    *history* holds the rows ``0..n`` the memory sum is evaluated on;
    *g_history* may carry the matching right-hand-side values.
    """
    alpha = problem.order.alpha
    h = problem.mesh.h
    history = np.asarray(history, dtype=np.float64).reshape(-1, problem.rhs.dim)
    if g_history is None:
        g_history = _g_rows(problem, history, n + 1)

    b = weight_table(alpha, problem.mesh.n_steps).b[n]
    scale = h**alpha / (problem.order.b_alpha * math.gamma(alpha))
    offset = problem.y0 + scale * (b @ g_history[: n + 1])

    if seed is None:
        seed = history[n]
    return solve_implicit(_local_map(problem, n, offset), seed, cfg)


def corrector_step(
    problem: Problem,
    history: Array,
    y_pred: Array,
    n: int,
    cfg: SolverConfig,
    *,
    g_history: Array | None = None,
) -> StepResult:
    """Corrected value at ``t_{n+1}`` from the product trapezoid rule, with
    the memory endpoint ``g(t_{n+1}, y_pred)`` taken from the predictor."""
    alpha = problem.order.alpha
    h = problem.mesh.h
    history = np.asarray(history, dtype=np.float64).reshape(-1, problem.rhs.dim)
    y_pred = np.atleast_1d(np.asarray(y_pred, dtype=np.float64))
    if g_history is None:
        g_history = _g_rows(problem, history, n + 1)

    a = weight_table(alpha, problem.mesh.n_steps).a[n]
    scale = alpha * h**alpha / (problem.order.b_alpha * math.gamma(alpha + 2.0))
    t_next = problem.mesh.nodes[n + 1]
    memory = a[n + 1] * problem.rhs(t_next, y_pred) + a[: n + 1] @ g_history[: n + 1]
    offset = problem.y0 + scale * memory

    return solve_implicit(_local_map(problem, n, offset), y_pred, cfg)


# }}}


def integrate(problem: Problem, cfg: SolverConfig | None = None) -> Trajectory:
    """March the predictor-corrector scheme over the whole mesh.

    :raises ImplicitSolveError: with ``.step`` set to the failing step index.
    """
    if cfg is None:
        cfg = SolverConfig()

    mesh = problem.mesh
    nsteps = mesh.n_steps
    dim = problem.rhs.dim
    t = mesh.nodes
    own_history = cfg.predictor_history == "predictor"

    predictor = np.empty((nsteps + 1, dim))
    corrector = np.empty((nsteps + 1, dim))
    predictor[0] = corrector[0] = problem.y0
    g_corr = np.empty((nsteps + 1, dim))
    g_corr[0] = problem.rhs(t[0], problem.y0)
    g_pred = g_corr.copy() if own_history else g_corr
    iterations = np.zeros((nsteps, 2), dtype=np.int64)

    for n in range(nsteps):
        try:
            y_pred, it_pred = predictor_step(
                problem,
                predictor if own_history else corrector,
                n,
                cfg,
                g_history=g_pred,
                seed=corrector[n],
            )
            y_corr, it_corr = corrector_step(
                problem, corrector, y_pred, n, cfg, g_history=g_corr
            )
        except ImplicitSolveError as exc:
            raise ImplicitSolveError(f"step {n}: {exc}", step=n) from exc

        if not (np.all(np.isfinite(y_pred)) and np.all(np.isfinite(y_corr))):
            raise ImplicitSolveError(f"step {n}: non-finite state", step=n)

        predictor[n + 1] = y_pred
        corrector[n + 1] = y_corr
        iterations[n] = it_pred, it_corr
        g_corr[n + 1] = problem.rhs(t[n + 1], y_corr)
        if own_history:
            g_pred[n + 1] = problem.rhs(t[n + 1], y_pred)

    return Trajectory(mesh, predictor, corrector, iterations)
