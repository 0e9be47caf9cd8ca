from __future__ import annotations

import math

import numpy as np
import pytest

from abfode.operators import Mesh
from abfode.solver import (
    ImplicitSolveError,
    Problem,
    RhsSpec,
    SolverConfig,
    corrector_step,
    integrate,
    predictor_step,
    solve_implicit,
)
from abfode.special import DomainError, Order

CFG = SolverConfig()

EX1_PREDICTOR = [0.0, 0.0639309, 0.150674, 0.246866, 0.350309, 0.459864,
                 0.574804, 0.694613, 0.818899, 0.947352, 1.07972]
EX1_CORRECTOR = [0.0, 0.079139, 0.170877, 0.270816, 0.377388, 0.489686,
                 0.607097, 0.729174, 0.855567, 0.985996, 1.12023]
EX3_PREDICTOR = [1.1937, 1.27314, 1.35327, 1.43591, 1.52179, 1.6114, 1.70514,
                 1.80337, 1.90641, 2.01459, 2.12824, 2.24771, 2.37333, 2.50546,
                 2.64448, 2.79077, 2.94474, 3.10682, 3.27746, 3.45713]


def make_problem(rid, alpha, n_steps, y0, t_end=1.0, **params):
    return Problem(RhsSpec(rid, params), Order(alpha), Mesh(t_end, n_steps), np.atleast_1d(y0))


@pytest.fixture(scope="module")
def example1():
    problem = make_problem("linear_t", 0.5, 10, 0.0)
    return problem, integrate(problem)


# {{{ solve_implicit


def test_implicit_linear_map():
    result = solve_implicit(lambda y: 0.5 * y + 1.0, np.array([0.0]), CFG)
    assert result.value[0] == pytest.approx(2.0, abs=1e-11)


def test_implicit_constant_map_single_iteration():
    result = solve_implicit(lambda y: np.array([3.5]), np.array([0.0]), CFG)
    assert result.value[0] == 3.5
    assert result.iterations == 1


def test_implicit_damping_rescues_divergent_map():
    # slope -2: plain iteration diverges, relaxation 1/2 contracts
    result = solve_implicit(lambda y: -2.0 * y + 3.0, np.array([0.0]), CFG)
    assert result.value[0] == pytest.approx(1.0, abs=1e-11)


def test_implicit_without_fixed_point():
    with pytest.raises(ImplicitSolveError):
        solve_implicit(lambda y: y + 1.0, np.array([0.0]), SolverConfig(fp_max_iter=20))


def test_implicit_example3_first_corrector():
    problem = make_problem("linear_y", 0.9, 20, 1.0)
    order = problem.order
    h = problem.mesh.h
    y0 = problem.y0
    predictor = predictor_step(problem, y0[None, :], 0, CFG).value

    # corrector map at n = 0, with a_{0,1} = alpha
    scale = 0.9 * h**0.9 / (order.b_alpha * math.gamma(2.9))
    offset = y0 + scale * (predictor + 0.9 * y0)
    result = solve_implicit(lambda y: offset + order.local_weight * y, predictor, CFG)
    assert result.value[0] == pytest.approx(1.20134, rel=5e-6)


@pytest.mark.parametrize(
    "kwargs", [{"fp_tol": 0.0}, {"fp_max_iter": 0}, {"damping": 0.0}, {"damping": 1.5},
               {"predictor_history": "both"}]
)
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        SolverConfig(**kwargs)


# }}}


# {{{ single steps


def test_predictor_first_step(example1):
    problem, _ = example1
    value = predictor_step(problem, problem.y0[None, :], 0, CFG).value
    # equals the local term (1 - a)/B t_1
    assert value[0] == pytest.approx(problem.order.local_weight * 0.1, rel=1e-14)
    assert value[0] == pytest.approx(0.0639309, abs=5e-7)


def test_corrector_first_step(example1):
    problem, _ = example1
    predicted = predictor_step(problem, problem.y0[None, :], 0, CFG).value
    value = corrector_step(problem, problem.y0[None, :], predicted, 0, CFG).value
    assert value[0] == pytest.approx(0.079139, abs=5e-7)


def test_last_steps_from_history(example1):
    problem, trajectory = example1
    pred = predictor_step(problem, trajectory.predictor_values[:10], 9, CFG)
    corr = corrector_step(problem, trajectory.corrector_values[:10], pred.value, 9, CFG)
    assert pred.value[0] == pytest.approx(1.07972, abs=5e-6)
    assert corr.value[0] == pytest.approx(1.12023, abs=5e-6)


@pytest.mark.parametrize("alpha", [0.3, 0.9, 1.0])
def test_zero_rhs_stays_at_initial_value(alpha):
    problem = make_problem("test_zero", alpha, 12, 0.75)
    trajectory = integrate(problem)
    assert np.all(trajectory.predictor_values == 0.75)
    assert np.all(trajectory.corrector_values == 0.75)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_state_independent_rhs_needs_one_iteration(alpha):
    trajectory = integrate(make_problem("linear_t", alpha, 25, 0.0))
    assert np.all(trajectory.iteration_counts == 1)


# }}}


# {{{ integrate


def test_example1_tables(example1):
    _, trajectory = example1
    np.testing.assert_allclose(trajectory.predictor_values[:, 0], EX1_PREDICTOR, atol=5e-6, rtol=0)
    np.testing.assert_allclose(trajectory.corrector_values[:, 0], EX1_CORRECTOR, atol=5e-6, rtol=0)


def test_example3_predictor_table():
    trajectory = integrate(make_problem("linear_y", 0.9, 20, 1.0))
    np.testing.assert_allclose(trajectory.predictor_values[1:, 0], EX3_PREDICTOR, rtol=5e-4)
    assert trajectory.corrector_values[1, 0] == pytest.approx(1.20134, rel=5e-4)
    assert trajectory.corrector_values[-1, 0] == pytest.approx(3.58067, rel=5e-4)


def test_example2_endpoints():
    trajectory = integrate(make_problem("exp_ty", 0.9, 20, 1.0))
    assert trajectory.corrector_values[1, 0] == pytest.approx(1.16513, rel=5e-4)
    assert trajectory.corrector_values[-1, 0] == pytest.approx(1.53168, rel=5e-4)


def test_predictor_on_corrector_history_misses_printed_table():
    # same scheme, but the predictor memory sums over corrected values
    cfg = SolverConfig(predictor_history="corrector")
    trajectory = integrate(make_problem("linear_y", 0.9, 20, 1.0), cfg)
    deviation = np.max(np.abs(trajectory.predictor_values[1:, 0] / EX3_PREDICTOR - 1))
    assert deviation > 1e-2

    # both variants coincide when g does not depend on y
    a = integrate(make_problem("linear_t", 0.5, 10, 0.0), cfg)
    b = integrate(make_problem("linear_t", 0.5, 10, 0.0))
    np.testing.assert_array_equal(a.predictor_values, b.predictor_values)


def test_classical_limit_order():
    errors = []
    for n_steps in (32, 128):
        trajectory = integrate(make_problem("linear_y", 1.0, n_steps, 1.0))
        errors.append(np.max(np.abs(trajectory.corrector_values[:, 0] - np.exp(trajectory.t))))
    assert math.log(errors[0] / errors[1], 4) >= 1.9


def test_initial_rows_and_finiteness():
    problem = make_problem("lotka_volterra", 0.8, 50, [1.0, 1.0])
    trajectory = integrate(problem)
    np.testing.assert_array_equal(trajectory.predictor_values[0], problem.y0)
    np.testing.assert_array_equal(trajectory.corrector_values[0], problem.y0)
    assert np.all(np.isfinite(trajectory.predictor_values))
    assert np.all(np.isfinite(trajectory.corrector_values))
    assert trajectory.iteration_counts.shape == (50, 2)


def test_determinism():
    problem = make_problem("exp_ty", 0.7, 64, 1.0)
    a = integrate(problem)
    b = integrate(problem)
    assert a.corrector_values.tobytes() == b.corrector_values.tobytes()
    assert a.predictor_values.tobytes() == b.predictor_values.tobytes()


def test_decoupled_system_has_identical_columns():
    trajectory = integrate(make_problem("test_diag2", 0.6, 40, [1.5, 1.5], lam=-2.0))
    values = trajectory.corrector_values
    assert np.max(np.abs(values[:, 0] - values[:, 1])) <= 1e-13

    scalar = integrate(make_problem("linear_y", 0.6, 40, 1.5))
    np.testing.assert_allclose(
        integrate(make_problem("test_diag2", 0.6, 40, [1.5, 1.5], lam=1.0)).corrector_values[:, 0],
        scalar.corrector_values[:, 0],
        rtol=1e-13,
    )


def test_failure_reports_step():
    problem = make_problem("test_stiff", 0.5, 10, 1.0)
    with pytest.raises(ImplicitSolveError) as info:
        integrate(problem, SolverConfig(fp_max_iter=30))
    assert info.value.step == 0


# }}}


# {{{ problem validation


def test_rhs_spec_validation():
    with pytest.raises(DomainError):
        RhsSpec("nope")
    with pytest.raises(DomainError):
        RhsSpec("logistic", {"k": 1.0})
    assert RhsSpec("logistic").params == {"r": -5.0}
    assert RhsSpec("lotka_volterra", {"a": 2}).params["a"] == 2.0
    assert RhsSpec("lotka_volterra").dim == 2


def test_problem_validation():
    with pytest.raises(DomainError):
        make_problem("lotka_volterra", 0.9, 10, [1.0])
    with pytest.raises(DomainError):
        make_problem("linear_y", 0.9, 10, [math.nan])


# }}}
