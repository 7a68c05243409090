# function_approx.py - Least-Squares Function Approximation in a Chaos Basis
"""
Step one of the sparse-data pipeline: approximate an unknown coefficient
function a(Δ) from a handful of labeled samples, in either basis, and measure
how far the approximant strays from the truth on a dense grid.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Any, Callable, Union

import numpy as np
import pandas as pd
from scipy.linalg import qr, solve_triangular, lstsq

from models import (
    LabeledSet, EmpiricalMeasure, BasisKind,
    InvalidInputError, point_argument
)

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12

# =============================================================================
# APPROXIMANT
# =============================================================================

@dataclass
class Approximant:
    """â(Δ) = Σ c_i φ_i(Δ)"""
    basis: Any
    coefficients: np.ndarray
    residual_norm: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def basis_kind(self) -> BasisKind:
        return self.basis.kind

    def __call__(self, query) -> float:
        return eval_approximant(self, query)

    def to_frame(self) -> pd.DataFrame:
        """Node/coefficient pairs (maxent) or indexed coefficient rows (apc)"""
        if self.basis_kind == BasisKind.MAXENT:
            nodes = self.basis.nodes.points
            columns = {"node": nodes[:, 0]} if nodes.shape[1] == 1 else {f"node_{k}": nodes[:, k] for k in range(nodes.shape[1])}
            columns["coefficient"] = self.coefficients
            return pd.DataFrame(columns)
        return pd.DataFrame({"k": np.arange(self.coefficients.size), "coefficient": self.coefficients})

    def export_csv(self, path: Union[str, Path]):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

@dataclass
class ApproximationError:
    """Pointwise normalized error on an evaluation grid"""
    points: np.ndarray
    errors: np.ndarray
    rms: float
    scale: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"delta": self.points[:, 0], "normalized_error": self.errors})

# =============================================================================
# FITTING
# =============================================================================

def fit_least_squares(basis, data: LabeledSet) -> Approximant:
    """Coefficients minimizing Σ_j (a_j − Σ_i c_i φ_i(Δ_j))², via pivoted QR"""

    design = basis.evaluate_many(data.points)
    n_rows, n_cols = design.shape
    metadata: Dict[str, Any] = {"n_data": n_rows, "n_basis": n_cols, "rank_deficient": False}

    Q, R, perm = qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_TOL * diag[0])) if diag.size and diag[0] > 0 else 0
    metadata["rank"] = rank

    if rank == n_cols:
        coeffs = np.empty(n_cols)
        coeffs[perm] = solve_triangular(R, Q.T @ data.values, lower=False)
    else:
        coeffs = lstsq(design, data.values)[0]
        metadata["rank_deficient"] = True
        logger.warning(f"{basis.kind.value} design matrix has rank {rank} < {n_cols}; using least-norm solution")

    residual = float(np.linalg.norm(design @ coeffs - data.values))
    metadata["condition"] = float(diag[0] / diag[-1]) if diag.size and diag[-1] > 0 else float("inf")
    logger.info(f"Fitted {basis.kind.value} approximant: {n_cols} coefficients, residual {residual:.3e}")
    return Approximant(basis=basis, coefficients=coeffs, residual_norm=residual, metadata=metadata)

def eval_approximant(approx: Approximant, query) -> float:
    """Σ c_i φ_i(query); maxent queries must lie in the node hull"""

    values = approx.basis(query)
    return float(values @ approx.coefficients)

def evaluate_on(approx: Approximant, points) -> np.ndarray:
    """Vectorized evaluation at many points"""
    return approx.basis.evaluate_many(points) @ approx.coefficients

# =============================================================================
# ERROR MEASURES
# =============================================================================

def normalized_error(approx: Approximant, truth: Callable, grid: EmpiricalMeasure) -> ApproximationError:
    """|â − a| / max_grid |a| pointwise, with its RMS"""

    exact = np.array([truth(point_argument(point)) for point in grid.samples], dtype=float)
    scale = float(np.max(np.abs(exact)))
    if scale == 0:
        raise InvalidInputError("true function vanishes on the whole grid; normalized error undefined")
    errors = np.abs(evaluate_on(approx, grid.samples) - exact) / scale
    rms = float(np.sqrt(np.mean(errors ** 2)))
    return ApproximationError(points=grid.samples, errors=errors, rms=rms, scale=scale)
