# apc_basis.py - Arbitrary Polynomial Chaos Baseline
"""
Polynomials orthonormal under the empirical measure, built from the raw
sample data rather than from a known density. Exposes the same evaluator
surface as MaxentBasis so surrogates and fits accept either.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Any, Union

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as npoly
from scipy.linalg import cholesky, solve_triangular

from models import (
    EmpiricalMeasure, BasisKind,
    InvalidInputError, ConditioningError, as_points
)
from empirical_measure import fingerprint
from system_config import config

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-12

# =============================================================================
# POLYNOMIAL BASIS
# =============================================================================

class PolyBasis:
    """Orthonormal polynomials φ_0..φ_P stored as monomial coefficient rows"""

    kind = BasisKind.APC

    def __init__(self, coeffs: np.ndarray, measure_id: str, diagnostics: Optional[Dict[str, Any]] = None):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[0] != coeffs.shape[1]:
            raise InvalidInputError(f"coefficient matrix must be square, got {coeffs.shape}")
        self.coeffs = np.tril(coeffs)
        self.measure_id = measure_id
        self.diagnostics = diagnostics or {}

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def n_basis(self) -> int:
        return self.coeffs.shape[0]

    def contains(self, point) -> bool:
        return True

    def __call__(self, point) -> np.ndarray:
        return eval_poly_basis(self, point)

    def evaluate_many(self, points) -> np.ndarray:
        x = as_points(points, 1)[:, 0]
        return npoly.polyval(x, self.coeffs.T).T

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "n_basis": self.n_basis, "degree": self.degree, "measure_id": self.measure_id}

    def get_solver_stats(self) -> Dict[str, Any]:
        return dict(self.diagnostics)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.coeffs, columns=[f"c{k}" for k in range(self.n_basis)])
        frame.index.name = "degree"
        return frame

    def export_csv(self, path: Union[str, Path]):
        """One row per polynomial, monomial coefficients c0..cP"""
        self.to_frame().to_csv(path, float_format="%.17g")

# =============================================================================
# MOMENTS AND CONSTRUCTION
# =============================================================================

def _scalar_samples(measure: EmpiricalMeasure) -> np.ndarray:
    if measure.dim != 1:
        raise InvalidInputError(f"polynomial chaos baseline is scalar; measure has dimension {measure.dim}")
    return measure.samples[:, 0]

def raw_moments(measure: EmpiricalMeasure, k_max: int) -> np.ndarray:
    """μ_k = (1/n_D) Σ_j Δ_j^k for k = 0..k_max"""

    if k_max < 0:
        raise InvalidInputError(f"moment order must be >= 0, got {k_max}")
    x = _scalar_samples(measure)
    return np.mean(x[:, None] ** np.arange(k_max + 1), axis=0)

def _modified_gram_schmidt(V: np.ndarray):
    """Thin QR by modified Gram-Schmidt"""

    n_cols = V.shape[1]
    Q = V.copy()
    R = np.zeros((n_cols, n_cols))
    for j in range(n_cols):
        for i in range(j):
            r = Q[:, i] @ Q[:, j]
            R[i, j] = r
            Q[:, j] -= r * Q[:, i]
        norm = np.linalg.norm(Q[:, j])
        if norm == 0:
            raise ConditioningError(f"monomial column {j} is linearly dependent", pivot=0.0)
        R[j, j] = norm
        Q[:, j] /= norm
    return Q, R

def _standardization_transform(center: float, scale: float, degree: int) -> np.ndarray:
    """Row j holds the x-monomial coefficients of ((x − center)/scale)^j"""

    T = np.zeros((degree + 1, degree + 1))
    base = np.array([-center / scale, 1.0 / scale])
    for j in range(degree + 1):
        row = npoly.polypow(base, j)
        T[j, :row.size] = row
    return T

def build_orthonormal(measure: EmpiricalMeasure, degree: int) -> PolyBasis:
    """Polynomials with empirical Gram matrix equal to the identity"""

    x = _scalar_samples(measure)
    n = x.size
    measure_id = fingerprint(measure)

    if degree < 0 or degree > config.apc_max_degree:
        raise InvalidInputError(f"degree must lie in [0, {config.apc_max_degree}], got {degree}")
    if n <= degree:
        raise ConditioningError(f"need more than {degree} samples for degree {degree}, got {n}", pivot=0.0)
    if degree == 0:
        return PolyBasis(np.array([[1.0]]), measure_id, {"degree": 0, "smallest_pivot": 1.0, "orthonormality_error": 0.0})

    center = float(x.mean())
    scale = float(x.std())
    if scale == 0:
        raise ConditioningError("all samples coincide; only degree 0 is representable", pivot=0.0)

    z = (x - center) / scale
    V = np.vander(z, degree + 1, increasing=True) / np.sqrt(n)

    # orthogonalize twice
    Q1, R1 = _modified_gram_schmidt(V)
    _, R2 = _modified_gram_schmidt(Q1)
    R = R2 @ R1

    pivots = np.abs(np.diag(R)) / np.linalg.norm(V, axis=0)
    smallest = float(pivots.min())
    if smallest < PIVOT_TOL:
        raise ConditioningError(
            f"moment matrix is numerically singular at degree {degree} (smallest pivot {smallest:.3e}); "
            f"reduce the degree or supply more distinct samples",
            pivot=smallest
        )

    coeffs_z = solve_triangular(R, np.eye(degree + 1), lower=False).T
    coeffs = coeffs_z @ _standardization_transform(center, scale, degree)
    coeffs[0] = 0.0
    coeffs[0, 0] = 1.0

    basis = PolyBasis(coeffs, measure_id)
    error = _orthonormality_error(basis, x)
    if error > ORTHONORMALITY_TOL:
        # un-standardizing loses a few digits; one Cholesky pass restores them
        gram = _empirical_gram(basis, x)
        L = cholesky(gram, lower=True)
        basis = PolyBasis(solve_triangular(L, basis.coeffs, lower=True), measure_id)
        logger.info(f"aPC degree {degree}: orthonormality error {error:.2e} corrected")
        error = _orthonormality_error(basis, x)

    if error > 1e-8:
        logger.warning(f"aPC degree {degree}: empirical Gram deviates from identity by {error:.2e}")

    basis.diagnostics = {"degree": degree, "smallest_pivot": smallest, "orthonormality_error": error, "center": center, "scale": scale}
    return basis

def _empirical_gram(basis: PolyBasis, x: np.ndarray) -> np.ndarray:
    design = basis.evaluate_many(x)
    return design.T @ design / x.size

def _orthonormality_error(basis: PolyBasis, x: np.ndarray) -> float:
    return float(np.max(np.abs(_empirical_gram(basis, x) - np.eye(basis.n_basis))))

# =============================================================================
# EVALUATION
# =============================================================================

def eval_poly_basis(basis: PolyBasis, query) -> np.ndarray:
    """(φ_0(Δ), ..., φ_P(Δ)) by Horner's rule per coefficient row"""

    value = np.asarray(query, dtype=float).ravel()
    if value.size != 1:
        raise InvalidInputError(f"polynomial basis takes a scalar query, got {value.size} coordinates")
    return npoly.polyval(value[0], basis.coeffs.T)
