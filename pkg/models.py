# models.py - Data Models for the Maxent Chaos-Expansion Toolkit
"""
Data models, enums and exceptions shared by the basis, measure, surrogate and
experiment modules. Everything here is plain data: the numerical work lives in
the modules that consume these types.
"""

from enum import Enum
from typing import Dict, Optional, Any, Callable, Union
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

# =============================================================================
# ENUMS
# =============================================================================

class BasisKind(Enum):
    """Families of chaos-expansion bases"""
    MAXENT = "maxent"
    APC = "apc"

class SamplerKind(Enum):
    """Generators for empirical sample sets"""
    UNIFORM_GRID = "uniform-grid"
    UNIFORM_INTERIOR_GRID = "uniform-interior-grid"
    UNIFORM_RANDOM = "uniform-random"
    GAUSSIAN_RANDOM = "gaussian-random"
    FILE = "file"

class ReferenceKind(Enum):
    """Where reference moments come from"""
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte-carlo"

class ExperimentId(Enum):
    """Studies the harness can run"""
    EXAMPLE1 = "example1"
    EXAMPLE2 = "example2"
    CONVERGENCE = "convergence"
    SAMPLE_STUDY = "sample-study"
    SINE = "sine"

# =============================================================================
# EXCEPTIONS
# =============================================================================

class UQError(Exception):
    """Base class for every error raised by the toolkit"""

class InvalidInputError(UQError, ValueError):
    """Malformed points, probability vectors, configs or shapes"""

class HullViolationError(UQError, ValueError):
    """Query lies outside the convex hull of the basis nodes"""

    def __init__(self, message: str, query=None, index: Optional[int] = None):
        super().__init__(message)
        self.query = query
        self.index = index

class ConvergenceError(UQError, RuntimeError):
    """Newton iteration on the dual problem did not converge"""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations

class ConditioningError(UQError, np.linalg.LinAlgError):
    """Moment or Gram matrix too close to singular"""

    def __init__(self, message: str, pivot: Optional[float] = None, condition: Optional[float] = None):
        super().__init__(message)
        self.pivot = pivot
        self.condition = condition

class EvaluationError(UQError, ValueError):
    """User-supplied function returned a non-finite value"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index

class BlowUpError(UQError, FloatingPointError):
    """Integrated state became non-finite"""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t

# =============================================================================
# POINT HELPERS
# =============================================================================

def as_points(values, dim: Optional[int] = None) -> np.ndarray:
    """Coerce scalars, 1-d lists or 2-d arrays into an (n, d) float array"""

    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(-1, dim)
    elif arr.ndim != 2:
        raise InvalidInputError(f"expected at most 2-d point array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise InvalidInputError(f"points have dimension {arr.shape[1]}, expected {dim}")
    return arr

def point_argument(point: np.ndarray):
    """What user callables receive: a float in 1-d, the coordinate vector otherwise"""
    return float(point[0]) if point.size == 1 else point

def as_point(value, dim: int) -> np.ndarray:
    """Coerce a single query into a finite length-d vector"""

    arr = np.atleast_1d(np.asarray(value, dtype=float)).ravel()
    if arr.size != dim:
        raise InvalidInputError(f"query has {arr.size} coordinates, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"query {arr.tolist()} is not finite")
    return arr

# =============================================================================
# DATA CLASSES
# =============================================================================

@dataclass(frozen=True, eq=False)
class NodeSet:
    """Basis nodes anchoring the maxent shape functions"""
    points: np.ndarray

    def __post_init__(self):
        arr = as_points(self.points).copy()
        if arr.shape[0] < 2:
            raise InvalidInputError(f"need at least 2 basis nodes, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("basis nodes must be finite")
        if np.unique(arr, axis=0).shape[0] != arr.shape[0]:
            raise InvalidInputError("basis nodes must be distinct")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @cached_property
    def diameter(self) -> float:
        """Largest pairwise node distance"""
        if self.dim == 1:
            return float(self.points.max() - self.points.min())
        return float(pdist(self.points).max())

    @cached_property
    def hull_vertices(self) -> np.ndarray:
        """Indices of nodes that are vertices of Conv(B)"""
        if self.dim == 1:
            col = self.points[:, 0]
            return np.array(sorted({int(np.argmin(col)), int(np.argmax(col))}))
        try:
            return np.sort(ConvexHull(self.points).vertices)
        except QhullError:
            # flat node sets have no full-dimensional hull
            return np.array([], dtype=int)

    @cached_property
    def hull_equations(self) -> np.ndarray:
        """Facet planes [normal, offset] of Conv(B), normal·x + offset <= 0 inside; empty for d = 1 or flat sets"""
        if self.dim == 1:
            return np.empty((0, 2))
        try:
            return ConvexHull(self.points).equations
        except QhullError:
            return np.empty((0, self.dim + 1))

    def to_dict(self) -> Dict[str, Any]:
        return {"count": self.count, "dim": self.dim, "points": self.points.tolist()}

@dataclass
class MaxentEvaluation:
    """Lagrange multipliers and basis values at one query point"""
    query: np.ndarray
    lam: np.ndarray
    psi: np.ndarray
    iterations: int
    residual_norm: float
    vertex_index: Optional[int] = None

    @property
    def at_vertex(self) -> bool:
        return self.vertex_index is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "query": self.query.tolist(),
            "lambda": self.lam.tolist(),
            "psi": self.psi.tolist(),
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "vertex_index": self.vertex_index
        }

@dataclass
class SampleGenerator:
    """How a sample set was produced, kept so runs can be reproduced"""
    kind: SamplerKind
    count: int
    lo: float = -1.0
    hi: float = 1.0
    mean: float = 0.0
    std: float = 1.0
    seed: Optional[int] = None
    source: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "count": self.count,
            "lo": self.lo,
            "hi": self.hi,
            "mean": self.mean,
            "std": self.std,
            "seed": self.seed,
            "source": self.source
        }

@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Sample set D standing in for the unknown density"""
    samples: np.ndarray
    generator: Optional[SampleGenerator] = None

    def __post_init__(self):
        arr = as_points(self.samples).copy()
        if arr.shape[0] < 1:
            raise InvalidInputError("empirical measure needs at least one sample")
        if not np.all(np.isfinite(arr)):
            bad = int(np.argwhere(~np.all(np.isfinite(arr), axis=1))[0, 0])
            raise InvalidInputError(f"sample {bad} is not finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def count(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "dim": self.dim,
            "generator": self.generator.to_dict() if self.generator else None
        }

@dataclass
class BasisStats:
    """Sample averages of basis products"""
    gram: np.ndarray
    mean: np.ndarray
    weighted_gram: Optional[np.ndarray] = None
    n_samples: int = 0

    @property
    def n_basis(self) -> int:
        return self.mean.shape[0]

    @property
    def covariance(self) -> np.ndarray:
        """E[ΨΨᵀ] − E[Ψ]E[Ψ]ᵀ"""
        return self.gram - np.outer(self.mean, self.mean)

@dataclass
class LinearStochasticODE:
    """ẋ = A(Δ)x with a deterministic or parameter-dependent initial state"""
    dimension: int
    system_map: Callable[[np.ndarray], Any]
    initial_condition: Union[np.ndarray, Callable[[np.ndarray], Any], float] = 1.0
    t0: float = 0.0
    t_final: float = 30.0
    step: float = 0.01

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError(f"state dimension must be >= 1, got {self.dimension}")
        if not self.step > 0:
            raise InvalidInputError(f"time step must be positive, got {self.step}")
        if not self.t_final > self.t0:
            raise InvalidInputError(f"t_final {self.t_final} must exceed t0 {self.t0}")

    @property
    def deterministic_start(self) -> bool:
        return not callable(self.initial_condition)

    def initial_state(self, point: Optional[np.ndarray] = None) -> np.ndarray:
        """x(0) at a parameter value (the constant when deterministic)"""
        if callable(self.initial_condition):
            value = self.initial_condition(point_argument(point))
        else:
            value = self.initial_condition
        state = np.broadcast_to(np.asarray(value, dtype=float).ravel(), (self.dimension,)).copy()
        return state

    def matrix_at(self, point: np.ndarray) -> np.ndarray:
        """A(Δ) as an (n, n) array"""
        return np.asarray(self.system_map(point_argument(point)), dtype=float).reshape(self.dimension, self.dimension)

@dataclass
class CoefficientTrajectory:
    """Chaos coefficients x_c(t_k) on the integration grid"""
    times: np.ndarray
    states: np.ndarray
    dimension: int
    n_basis: int

    def coefficient_matrix(self, k: int) -> np.ndarray:
        """X(t_k) with x_c = vec(X), shape (n, n_B)"""
        return self.states[k].reshape(self.n_basis, self.dimension).T

@dataclass
class MomentSeries:
    """Time-indexed mean and covariance estimates"""
    times: np.ndarray
    mean: np.ndarray
    cov: np.ndarray
    mean_stderr: Optional[np.ndarray] = None
    label: str = ""

    @property
    def dimension(self) -> int:
        return self.mean.shape[1]

    @property
    def variance(self) -> np.ndarray:
        """Per-component variances, shape (K, n)"""
        return np.diagonal(self.cov, axis1=1, axis2=2)

    def scalar_mean(self) -> np.ndarray:
        return self.mean[:, 0]

    def scalar_variance(self) -> np.ndarray:
        return self.cov[:, 0, 0]

    def at_indices(self, idx: np.ndarray) -> "MomentSeries":
        return MomentSeries(
            times=self.times[idx],
            mean=self.mean[idx],
            cov=self.cov[idx],
            mean_stderr=None if self.mean_stderr is None else self.mean_stderr[idx],
            label=self.label
        )

@dataclass
class ErrorSeries:
    """Relative moment errors against a reference"""
    times: np.ndarray
    err_mean: np.ndarray
    err_variance: np.ndarray
    reference: ReferenceKind

    def at_time(self, t: float) -> Dict[str, float]:
        k = int(np.argmin(np.abs(self.times - t)))
        return {"t": float(self.times[k]), "err_mean": float(self.err_mean[k]), "err_variance": float(self.err_variance[k])}

@dataclass(frozen=True, eq=False)
class LabeledSet:
    """Sparse samples Δ_j with known coefficient values a_j"""
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points)
        vals = np.asarray(self.values, dtype=float).ravel()
        if pts.shape[0] < 1:
            raise InvalidInputError("labeled set needs at least one pair")
        if vals.shape[0] != pts.shape[0]:
            raise InvalidInputError(f"{pts.shape[0]} points but {vals.shape[0]} labels")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(vals))):
            raise InvalidInputError("labeled points and values must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def count(self) -> int:
        return self.points.shape[0]

# =============================================================================
# FACTORY FUNCTIONS
# =============================================================================

def create_node_set(points) -> NodeSet:
    """Factory function to create a NodeSet from any point-like input"""
    return NodeSet(points=as_points(points))

def uniform_nodes(lo: float, hi: float, count: int) -> NodeSet:
    """Factory function for count uniformly spaced nodes on [lo, hi]"""
    if count < 2:
        raise InvalidInputError(f"need at least 2 nodes, got {count}")
    return NodeSet(points=np.linspace(lo, hi, count).reshape(-1, 1))

def create_scalar_ode(
    coefficient: Callable[[np.ndarray], float],
    x0: Union[float, Callable[[np.ndarray], float]] = 1.0,
    t0: float = 0.0,
    t_final: float = 30.0,
    step: float = 0.01
) -> LinearStochasticODE:
    """Factory function for ẋ = a(Δ)x"""

    return LinearStochasticODE(
        dimension=1,
        system_map=lambda point: [[coefficient(point)]],
        initial_condition=x0,
        t0=t0,
        t_final=t_final,
        step=step
    )

def create_labeled_set(points, function: Callable[[np.ndarray], float]) -> LabeledSet:
    """Factory function that labels points with a known function"""
    pts = as_points(points)
    return LabeledSet(points=pts, values=np.array([function(point_argument(p)) for p in pts], dtype=float))

# =============================================================================
# VALIDATION FUNCTIONS
# =============================================================================

def validate_probability_vector(p, name: str = "p", tol: float = 1e-9) -> np.ndarray:
    """Check non-negativity and normalization"""

    arr = np.asarray(p, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be a non-empty finite vector")
    if np.any(arr < 0):
        raise InvalidInputError(f"{name} has negative entries")
    if abs(arr.sum() - 1.0) > tol:
        raise InvalidInputError(f"{name} sums to {arr.sum():.12g}, not 1")
    return arr

# =============================================================================
# CONSTANTS
# =============================================================================

EXAMPLE2_ALPHA = 2.0
EXAMPLE2_GAMMA = 0.5
