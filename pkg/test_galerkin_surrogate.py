# test_galerkin_surrogate.py - Galerkin Surrogate Tests

import numpy as np
import pytest

from models import (
    EmpiricalMeasure, LinearStochasticODE, BasisKind, create_node_set, uniform_nodes,
    create_scalar_ode, InvalidInputError, ConditioningError, EvaluationError, BlowUpError
)
from maxent_basis import MaxentBasis
from apc_basis import build_orthonormal
from empirical_measure import uniform_grid
from galerkin_surrogate import (
    build_surrogate, initial_coefficients, time_grid, integrate, moments, galerkin_residual
)

def _midpoint_measure(n):
    return EmpiricalMeasure(samples=(np.arange(n) + 0.5) / n)

# =============================================================================
# SYSTEM MATRIX
# =============================================================================

def test_two_node_system_matrix_matches_closed_form():
    # ψ = (1 − Δ, Δ) on [0, 1], a(Δ) = −Δ: G = [[1/3, 1/6], [1/6, 1/3]], W = −[[1/12, 1/12], [1/12, 1/4]]
    basis = MaxentBasis(create_node_set([0.0, 1.0]))
    ode = create_scalar_ode(lambda delta: -delta, t_final=1.0)
    surrogate = build_surrogate(ode, basis, _midpoint_measure(2000))

    assert np.allclose(surrogate.stats.gram, [[1 / 3, 1 / 6], [1 / 6, 1 / 3]], atol=1e-6)
    assert np.allclose(surrogate.system_matrix, [[-1 / 6, 1 / 6], [-1 / 6, -5 / 6]], atol=1e-5)

def test_constant_coefficient_gives_scaled_identity(small_grid, five_nodes):
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -2.0), MaxentBasis(five_nodes), small_grid)
    assert np.allclose(surrogate.system_matrix, -2.0 * np.eye(5), atol=1e-10)

def test_vector_state_layout(small_grid):
    # vec(X) stacks basis blocks: x_c[b*n + i] = X[i, b]
    basis = build_orthonormal(small_grid, 2)
    ode = LinearStochasticODE(dimension=2, system_map=lambda delta: [[-1.0, 0.0], [0.0, -3.0]], initial_condition=[1.0, 2.0], t_final=1.0)
    surrogate = build_surrogate(ode, basis, small_grid)
    assert np.allclose(surrogate.system_matrix, np.kron(np.eye(3), np.diag([-1.0, -3.0])), atol=1e-10)
    assert np.allclose(surrogate.x_c0, [1.0, 2.0, 0.0, 0.0, 0.0, 0.0])
    trajectory = integrate(surrogate, t_final=0.1)
    assert np.allclose(trajectory.coefficient_matrix(0), [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])

class DuplicateColumns:
    """Two identical constant columns: an exactly singular Gram matrix"""
    kind = BasisKind.MAXENT
    n_basis = 2

    def evaluate_many(self, points):
        x = np.asarray(points, dtype=float).reshape(-1)
        return np.column_stack([0.5 + 0.0 * x, 0.5 + 0.0 * x])

class NearlyCollinearColumns:
    """1 and 1 + εΔ: factorizable, but far past the condition limit"""
    kind = BasisKind.APC
    n_basis = 2

    def evaluate_many(self, points):
        x = np.asarray(points, dtype=float).reshape(-1)
        return np.column_stack([np.ones_like(x), 1.0 + 3e-7 * x])

def test_singular_gram_is_jittered(small_grid):
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -1.0), DuplicateColumns(), small_grid)

    assert surrogate.jitter == pytest.approx(1e-12 * 0.25)
    assert [event["event"] for event in surrogate.events] == ["gram_jitter"]
    assert surrogate.to_dict()["events"][0]["jitter"] == surrogate.jitter
    assert np.all(np.isfinite(surrogate.system_matrix))

def test_ill_conditioned_gram_is_rejected(small_grid):
    with pytest.raises(ConditioningError) as excinfo:
        build_surrogate(create_scalar_ode(lambda delta: -1.0), NearlyCollinearColumns(), small_grid)
    assert excinfo.value.condition > 1e12

def test_non_finite_coefficient_is_reported(five_nodes):
    measure = uniform_grid(-1.0, 1.0, 11)
    ode = create_scalar_ode(lambda delta: np.log(delta + 1.0))
    with pytest.raises(EvaluationError) as excinfo:
        build_surrogate(ode, MaxentBasis(five_nodes), measure)
    assert excinfo.value.index == 0

# =============================================================================
# INITIAL CONDITION
# =============================================================================

def test_maxent_recovers_deterministic_initial_condition(example1_grid):
    basis = MaxentBasis(uniform_nodes(-1.0, 1.0, 8))
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -0.5 * (1.0 + delta)), basis, example1_grid)
    series = moments(integrate(surrogate, t_final=0.1), surrogate.stats)

    assert np.array_equal(surrogate.x_c0, np.ones(8))
    assert abs(series.scalar_mean()[0] - 1.0) <= 1e-12
    assert abs(series.scalar_variance()[0]) <= 1e-10

def test_apc_places_deterministic_start_on_constant(small_grid):
    basis = build_orthonormal(small_grid, 3)
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -1.0, x0=2.5), basis, small_grid)
    assert np.allclose(surrogate.x_c0, [2.5, 0.0, 0.0, 0.0])

def test_random_initial_condition_is_projected(small_grid):
    basis = build_orthonormal(small_grid, 2)
    ode = create_scalar_ode(lambda delta: -1.0, x0=lambda delta: delta)
    surrogate = build_surrogate(ode, basis, small_grid)
    series = moments(integrate(surrogate, t_final=0.01), surrogate.stats)
    x = small_grid.samples[:, 0]

    assert series.scalar_mean()[0] == pytest.approx(np.mean(x), abs=1e-12)
    assert series.scalar_variance()[0] == pytest.approx(np.var(x), abs=1e-10)

def test_initial_coefficients_projection_matches_builder(small_grid, five_nodes):
    basis = MaxentBasis(five_nodes)
    ode = create_scalar_ode(lambda delta: -1.0, x0=lambda delta: 1.0 + delta)
    surrogate = build_surrogate(ode, basis, small_grid)
    again = initial_coefficients(basis, ode, small_grid, surrogate.stats)
    assert np.allclose(again, surrogate.x_c0, atol=1e-12)
    # linear precision: Δ = Σ ψ_i Δ_i, so the projection is exact
    assert np.allclose(again, 1.0 + five_nodes.points[:, 0], atol=1e-8)

# =============================================================================
# TIME INTEGRATION
# =============================================================================

def test_time_grid_shortens_last_step():
    assert np.allclose(time_grid(0.0, 1.0, 0.3), [0.0, 0.3, 0.6, 0.9, 1.0])
    grid = time_grid(0.0, 30.0, 0.01)
    assert grid.size == 3001 and grid[-1] == 30.0
    with pytest.raises(InvalidInputError):
        time_grid(1.0, 0.0, 0.1)

def _decay_error(step, small_grid):
    basis = MaxentBasis(uniform_nodes(-1.0, 1.0, 3))
    ode = create_scalar_ode(lambda delta: -1.0, t_final=1.0, step=step)
    surrogate = build_surrogate(ode, basis, small_grid)
    series = moments(integrate(surrogate), surrogate.stats)
    return abs(series.scalar_mean()[-1] - np.exp(-1.0))

def test_rk4_global_error_is_fourth_order(small_grid):
    ratio = _decay_error(0.02, small_grid) / _decay_error(0.01, small_grid)
    assert 12.0 <= ratio <= 20.0

def test_constant_decay_has_no_variance(small_grid, five_nodes):
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -1.0, t_final=2.0), MaxentBasis(five_nodes), small_grid)
    series = moments(integrate(surrogate), surrogate.stats)
    assert np.allclose(series.scalar_mean(), np.exp(-series.times), atol=1e-8)
    assert np.max(np.abs(series.scalar_variance())) <= 1e-10

def test_blow_up_is_reported(small_grid, five_nodes):
    surrogate = build_surrogate(create_scalar_ode(lambda delta: 1000.0, t_final=30.0), MaxentBasis(five_nodes), small_grid)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(BlowUpError) as excinfo:
            integrate(surrogate)
    assert 0.0 < excinfo.value.t < 30.0

# =============================================================================
# MOMENTS AND RESIDUAL
# =============================================================================

def test_vector_system_matches_scalar_runs(small_grid, five_nodes):
    a = lambda delta: -0.5 * (1.0 + delta)
    basis = MaxentBasis(five_nodes)
    vector = LinearStochasticODE(dimension=2, system_map=lambda delta: np.diag([a(delta), 2.0 * a(delta)]), initial_condition=1.0, t_final=2.0)
    surrogate = build_surrogate(vector, basis, small_grid)
    series = moments(integrate(surrogate), surrogate.stats)

    for component, scale in enumerate([1.0, 2.0]):
        scalar = build_surrogate(create_scalar_ode(lambda delta, s=scale: s * a(delta), t_final=2.0), basis, small_grid)
        reference = moments(integrate(scalar), scalar.stats)
        assert np.allclose(series.mean[:, component], reference.scalar_mean(), atol=1e-10)
        assert np.allclose(series.cov[:, component, component], reference.scalar_variance(), atol=1e-10)
    assert series.cov.shape == (series.times.size, 2, 2)

def test_galerkin_residual_vanishes_along_trajectory(small_grid, five_nodes):
    basis = MaxentBasis(five_nodes)
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -0.5 * (1.0 + delta), t_final=2.0), basis, small_grid)
    trajectory = integrate(surrogate)
    for k in (0, trajectory.times.size // 2, trajectory.times.size - 1):
        x_c = trajectory.states[k]
        residual = galerkin_residual(surrogate, x_c, surrogate.derivative(x_c), small_grid, basis)
        assert np.max(np.abs(residual)) <= 1e-10

def test_galerkin_residual_detects_wrong_derivative(small_grid, five_nodes):
    basis = MaxentBasis(five_nodes)
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -1.0, t_final=1.0), basis, small_grid)
    residual = galerkin_residual(surrogate, surrogate.x_c0, np.zeros(5), small_grid, basis)
    assert np.max(np.abs(residual)) > 1e-3

def test_moments_check_basis_size(small_grid, five_nodes):
    surrogate = build_surrogate(create_scalar_ode(lambda delta: -1.0, t_final=1.0), MaxentBasis(five_nodes), small_grid)
    trajectory = integrate(surrogate)
    other = build_surrogate(create_scalar_ode(lambda delta: -1.0, t_final=1.0), MaxentBasis(uniform_nodes(-1, 1, 3)), small_grid)
    with pytest.raises(InvalidInputError):
        moments(trajectory, other.stats)
