# test_function_approx.py - Least-Squares Function Approximation Tests

import numpy as np
import pytest

from models import create_node_set, create_labeled_set, LabeledSet, HullViolationError, InvalidInputError
from maxent_basis import MaxentBasis
from apc_basis import build_orthonormal
from empirical_measure import uniform_grid, uniform_interior_grid
from function_approx import fit_least_squares, eval_approximant, evaluate_on, normalized_error
from experiments import example2_coefficient

# =============================================================================
# FITTING
# =============================================================================

def test_maxent_fit_reproduces_affine_functions():
    nodes = create_node_set([0.0, 0.4, 1.0])
    data = create_labeled_set(np.linspace(0.0, 1.0, 9), lambda x: 2.0 * x + 1.0)
    approx = fit_least_squares(MaxentBasis(nodes), data)

    assert approx.residual_norm <= 1e-10
    assert eval_approximant(approx, 0.3) == pytest.approx(1.6, abs=1e-10)
    assert approx(0.75) == pytest.approx(2.5, abs=1e-10)

def test_square_fit_interpolates_labels():
    samples = uniform_interior_grid(0.0, 1.0, 500).samples[:, 0]
    points = np.linspace(samples.min(), samples.max(), 10)
    data = create_labeled_set(points, example2_coefficient)
    approx = fit_least_squares(MaxentBasis(create_node_set(points)), data)

    assert approx.metadata["rank"] == 10
    assert np.allclose(evaluate_on(approx, points), data.values, atol=1e-8)
    # hull-vertex nodes carry indicator rows, so their coefficients are the labels
    assert approx.coefficients[0] == pytest.approx(data.values[0], abs=1e-8)
    assert approx.coefficients[-1] == pytest.approx(data.values[-1], abs=1e-8)

def test_polynomial_fit_reproduces_quadratics():
    measure = uniform_grid(-1.0, 1.0, 200)
    data = create_labeled_set(np.linspace(-1.0, 1.0, 7), lambda x: 3.0 * x ** 2 - x + 0.5)
    approx = fit_least_squares(build_orthonormal(measure, 2), data)

    assert approx.residual_norm <= 1e-10
    assert approx(0.2) == pytest.approx(3.0 * 0.04 - 0.2 + 0.5, abs=1e-10)

@pytest.mark.parametrize("builder", [
    lambda: MaxentBasis(create_node_set(np.linspace(0.0, 1.0, 5))),
    lambda: build_orthonormal(uniform_grid(0.0, 1.0, 100), 3),
])
def test_fitted_coefficients_minimize_residual(builder):
    basis = builder()
    data = create_labeled_set(np.linspace(0.0, 1.0, 20), lambda x: np.sin(3.0 * x) + x ** 3)
    approx = fit_least_squares(basis, data)
    design = basis.evaluate_many(data.points)

    assert approx.residual_norm > 1e-6
    for i in range(approx.coefficients.size):
        for delta in (-1e-3, 1e-3):
            perturbed = approx.coefficients.copy()
            perturbed[i] += delta
            assert np.linalg.norm(design @ perturbed - data.values) > approx.residual_norm

def test_underdetermined_fit_falls_back_to_least_norm(caplog):
    basis = build_orthonormal(uniform_grid(-1.0, 1.0, 50), 4)
    data = LabeledSet(points=np.array([-0.5, 0.0, 0.5]), values=np.array([1.0, 0.0, 1.0]))
    approx = fit_least_squares(basis, data)

    assert approx.metadata["rank_deficient"]
    assert approx.metadata["rank"] == 3
    assert approx.residual_norm <= 1e-10
    assert "least-norm" in caplog.text

def test_maxent_approximant_is_confined_to_hull():
    nodes = create_node_set([0.0, 0.5, 1.0])
    approx = fit_least_squares(MaxentBasis(nodes), create_labeled_set([0.0, 0.5, 1.0], lambda x: x ** 2))
    with pytest.raises(HullViolationError):
        approx(1.5)

def test_coefficient_export(tmp_path):
    nodes = create_node_set([0.0, 0.5, 1.0])
    approx = fit_least_squares(MaxentBasis(nodes), create_labeled_set([0.0, 0.5, 1.0], lambda x: x))
    frame = approx.to_frame()
    assert list(frame.columns) == ["node", "coefficient"]
    approx.export_csv(tmp_path / "fit.csv")
    assert (tmp_path / "fit.csv").exists()

def test_labeled_set_validation():
    with pytest.raises(InvalidInputError):
        LabeledSet(points=np.array([0.0, 1.0]), values=np.array([1.0]))
    with pytest.raises(InvalidInputError):
        LabeledSet(points=np.array([0.0]), values=np.array([np.nan]))

# =============================================================================
# ERROR MEASURES
# =============================================================================

def test_normalized_error_of_exact_fit_is_zero():
    measure = uniform_grid(0.0, 1.0, 101)
    approx = fit_least_squares(MaxentBasis(create_node_set([0.0, 1.0])), create_labeled_set([0.0, 1.0], lambda x: 1.0 - 2.0 * x))
    result = normalized_error(approx, lambda x: 1.0 - 2.0 * x, measure)

    assert result.scale == pytest.approx(1.0)
    assert result.rms <= 1e-10
    assert list(result.to_frame().columns) == ["delta", "normalized_error"]

def test_normalized_error_scales_by_largest_truth():
    measure = uniform_grid(0.0, 1.0, 3)
    approx = fit_least_squares(MaxentBasis(create_node_set([0.0, 1.0])), create_labeled_set([0.0, 1.0], lambda x: 0.0))
    result = normalized_error(approx, lambda x: 4.0 * x, measure)
    assert np.allclose(result.errors, [0.0, 0.5, 1.0])

def test_normalized_error_needs_nonzero_truth():
    measure = uniform_grid(0.0, 1.0, 5)
    approx = fit_least_squares(MaxentBasis(create_node_set([0.0, 1.0])), create_labeled_set([0.0, 1.0], lambda x: 0.0))
    with pytest.raises(InvalidInputError):
        normalized_error(approx, lambda x: 0.0, measure)
