# test_apc_basis.py - Arbitrary Polynomial Chaos Baseline Tests

import numpy as np
import pytest
from hypothesis import given, strategies as st

from models import EmpiricalMeasure, BasisKind, InvalidInputError, ConditioningError
from empirical_measure import uniform_grid, uniform_random, gaussian_random, basis_stats
from apc_basis import PolyBasis, build_orthonormal, raw_moments, eval_poly_basis

def _gram(basis, measure):
    design = basis.evaluate_many(measure.samples)
    return design.T @ design / measure.count

# =============================================================================
# ORTHONORMALITY
# =============================================================================

@given(st.integers(0, 8), st.integers(0, 1000))
def test_empirical_gram_is_identity(degree, seed):
    measure = uniform_random(-1.0, 1.0, 400, seed=seed)
    basis = build_orthonormal(measure, degree)
    assert np.max(np.abs(_gram(basis, measure) - np.eye(degree + 1))) <= 1e-8

def test_orthonormal_under_skewed_measure():
    measure = EmpiricalMeasure(samples=np.exp(gaussian_random(0.0, 0.5, 2000, seed=2).samples))
    basis = build_orthonormal(measure, 5)
    assert np.max(np.abs(_gram(basis, measure) - np.eye(6))) <= 1e-8
    assert basis.diagnostics["orthonormality_error"] <= 1e-8

def test_first_polynomial_is_constant_one():
    basis = build_orthonormal(uniform_grid(-1.0, 1.0, 50), 3)
    assert np.array_equal(basis.coeffs[0], [1.0, 0.0, 0.0, 0.0])
    assert np.allclose(basis.evaluate_many([-0.7, 0.2])[:, 0], 1.0)

def test_uniform_samples_give_normalized_legendre():
    basis = build_orthonormal(uniform_grid(-1.0, 1.0, 100_000), 2)
    assert np.allclose(basis.coeffs[1, :2], [0.0, np.sqrt(3.0)], atol=1e-2)
    assert np.allclose(basis.coeffs[2, :3], [-np.sqrt(5.0) / 2.0, 0.0, 1.5 * np.sqrt(5.0)], atol=1e-2)

def test_coefficients_are_lower_triangular():
    basis = build_orthonormal(uniform_grid(0.0, 2.0, 100), 4)
    assert np.array_equal(basis.coeffs, np.tril(basis.coeffs))
    assert basis.degree == 4 and basis.n_basis == 5
    assert basis.kind == BasisKind.APC

# =============================================================================
# EVALUATION
# =============================================================================

def test_pointwise_and_batch_evaluation_agree():
    basis = build_orthonormal(uniform_grid(-1.0, 1.0, 200), 4)
    points = np.array([-0.9, -0.1, 0.4, 0.95])
    batch = basis.evaluate_many(points)
    for row, x in zip(batch, points):
        assert np.allclose(row, basis(x), rtol=1e-13, atol=1e-13)
        assert np.allclose(row, eval_poly_basis(basis, x), rtol=1e-13, atol=1e-13)

def test_polynomials_are_defined_everywhere():
    basis = build_orthonormal(uniform_grid(-1.0, 1.0, 200), 2)
    assert basis.contains(10.0)
    assert np.all(np.isfinite(basis(10.0)))

def test_stats_of_orthonormal_basis():
    measure = uniform_grid(-1.0, 1.0, 300)
    stats = basis_stats(measure, build_orthonormal(measure, 3))
    assert np.allclose(stats.gram, np.eye(4), atol=1e-8)
    assert np.allclose(stats.mean, [1.0, 0.0, 0.0, 0.0], atol=1e-8)

def test_coefficient_table_export(tmp_path):
    basis = build_orthonormal(uniform_grid(-1.0, 1.0, 20), 2)
    frame = basis.to_frame()
    assert list(frame.columns) == ["c0", "c1", "c2"]
    basis.export_csv(tmp_path / "apc.csv")
    assert (tmp_path / "apc.csv").read_text().startswith("degree,c0,c1,c2")

# =============================================================================
# MOMENTS AND FAILURES
# =============================================================================

def test_raw_moments_of_grid():
    moments = raw_moments(uniform_grid(-1.0, 1.0, 3), 4)
    assert np.allclose(moments, [1.0, 0.0, 2.0 / 3.0, 0.0, 2.0 / 3.0])

def test_degree_limits():
    measure = uniform_grid(-1.0, 1.0, 100)
    with pytest.raises(InvalidInputError):
        build_orthonormal(measure, 13)
    with pytest.raises(InvalidInputError):
        build_orthonormal(measure, -1)
    with pytest.raises(ConditioningError):
        build_orthonormal(uniform_grid(-1.0, 1.0, 3), 3)

def test_too_few_distinct_values_is_ill_conditioned():
    measure = EmpiricalMeasure(samples=np.array([0.0, 0.0, 1.0, 1.0, 0.0]))
    with pytest.raises(ConditioningError) as excinfo:
        build_orthonormal(measure, 2)
    assert excinfo.value.pivot is not None

def test_constant_samples_only_support_degree_zero():
    measure = EmpiricalMeasure(samples=np.full(10, 0.3))
    assert build_orthonormal(measure, 0).n_basis == 1
    with pytest.raises(ConditioningError):
        build_orthonormal(measure, 1)

def test_multivariate_measure_is_rejected():
    measure = EmpiricalMeasure(samples=np.zeros((4, 2)) + np.arange(4)[:, None])
    with pytest.raises(InvalidInputError):
        build_orthonormal(measure, 1)

def test_poly_basis_requires_square_coefficients():
    with pytest.raises(InvalidInputError):
        PolyBasis(np.ones((2, 3)), "x")
