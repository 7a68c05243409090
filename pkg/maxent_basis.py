# maxent_basis.py - Maximum-Entropy Basis Functions
"""
Local/global maximum-entropy shape functions (barycentric coordinates) on a
fixed node set. The primal entropy problem is solved through its dual: a
d-dimensional Newton iteration in the Lagrange multipliers of the
linear-precision constraints.
"""

import logging
from typing import Dict, Optional, Any, Tuple

import numpy as np
from scipy.special import entr, rel_entr

from models import (
    NodeSet, MaxentEvaluation, BasisKind,
    InvalidInputError, HullViolationError, ConvergenceError,
    as_point, as_points, validate_probability_vector
)
from system_config import config

logger = logging.getLogger(__name__)

# =============================================================================
# ENTROPY MEASURES
# =============================================================================

def entropy(p) -> float:
    """Shannon entropy −Σ p log p with 0·log 0 = 0"""
    arr = validate_probability_vector(p)
    return float(np.sum(entr(arr)))

def relative_entropy(p, m) -> float:
    """Kullback-Leibler divergence Σ p log(p/m)"""

    prior = np.asarray(m, dtype=float).ravel()
    if prior.size == 0 or not np.all(np.isfinite(prior)) or np.any(prior <= 0):
        raise InvalidInputError("prior weights must be strictly positive")
    arr = validate_probability_vector(p)
    if arr.size != prior.size:
        raise InvalidInputError(f"p has {arr.size} entries, m has {prior.size}")
    return float(np.sum(rel_entr(arr, prior)))

# =============================================================================
# PRIOR
# =============================================================================

def gaussian_prior(nodes: NodeSet, query, beta: float = 0.0) -> np.ndarray:
    """Normalized weights exp(−β‖Δ_i − Δ‖²)"""

    point = as_point(query, nodes.dim)
    if not beta >= 0:
        raise InvalidInputError(f"locality parameter must be >= 0, got {beta}")
    if beta == 0:
        return np.full(nodes.count, 1.0 / nodes.count)

    sq_dist = np.sum((nodes.points - point) ** 2, axis=1)
    # shift by the nearest node; cancels in the normalization
    weights = np.exp(-beta * (sq_dist - sq_dist.min()))
    return weights / weights.sum()

# =============================================================================
# DUAL SOLVER
# =============================================================================

def _boltzmann_weights(shifted: np.ndarray, prior: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """m_i e^{−λᵀΔ̃_i} / Σ_j m_j e^{−λᵀΔ̃_j}, overflow-safe"""
    exponent = -(shifted @ lam)
    exponent -= exponent.max()
    w = prior * np.exp(exponent)
    return w / w.sum()

def _solve_dual(
    nodes: NodeSet,
    point: np.ndarray,
    prior: np.ndarray,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None
) -> Tuple[np.ndarray, int, float]:
    """Damped Newton on Σ_i w_i Δ̃_i = 0; returns (λ, iterations, residual)"""

    tol = config.newton_tol * (1.0 + nodes.diameter) if tol is None else tol
    max_iter = config.newton_max_iter if max_iter is None else max_iter
    cap = config.lambda_cap

    shifted = nodes.points - point
    lam = np.zeros(nodes.dim)
    w = _boltzmann_weights(shifted, prior, lam)
    residual = w @ shifted
    res_norm = float(np.linalg.norm(residual))

    for iteration in range(max_iter):
        if res_norm <= tol:
            return lam, iteration, res_norm

        hessian = (shifted * w[:, None]).T @ shifted - np.outer(residual, residual)
        try:
            step = np.linalg.solve(hessian, residual)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, residual, rcond=None)[0]

        scale = 1.0
        accepted = False
        for _ in range(config.max_halvings):
            candidate = lam + scale * step
            if np.all(np.isfinite(candidate)) and np.linalg.norm(candidate) <= cap:
                w_new = _boltzmann_weights(shifted, prior, candidate)
                residual_new = w_new @ shifted
                norm_new = float(np.linalg.norm(residual_new))
                if norm_new < res_norm:
                    accepted = True
                    break
            scale *= 0.5

        if not accepted:
            if res_norm <= 1e3 * tol:
                # residual at rounding floor
                return lam, iteration, res_norm
            raise HullViolationError(
                f"dual residual stuck at {res_norm:.3e} for query {point.tolist()}; "
                f"query is outside or on the boundary of the node hull",
                query=point
            )

        lam, w, residual, res_norm = candidate, w_new, residual_new, norm_new

    if res_norm <= tol:
        return lam, max_iter, res_norm
    if np.linalg.norm(lam) > 0.5 * cap:
        raise HullViolationError(
            f"multipliers diverged (|λ| = {np.linalg.norm(lam):.3e}) for query {point.tolist()}",
            query=point
        )
    raise ConvergenceError(
        f"Newton did not converge in {max_iter} iterations (residual {res_norm:.3e})",
        residual=res_norm,
        iterations=max_iter
    )

def _checked_prior(nodes: NodeSet, prior) -> np.ndarray:
    weights = np.asarray(prior, dtype=float).ravel()
    if weights.size != nodes.count or np.any(~np.isfinite(weights)) or np.any(weights <= 0):
        raise InvalidInputError("prior must hold one strictly positive weight per node")
    return weights

def solve_lagrange(nodes: NodeSet, query, prior, tol: Optional[float] = None, max_iter: Optional[int] = None) -> np.ndarray:
    """Lagrange multipliers λ of the linear-precision constraints at query"""

    point = as_point(query, nodes.dim)
    lam, _, _ = _solve_dual(nodes, point, _checked_prior(nodes, prior), tol=tol, max_iter=max_iter)
    return lam

# =============================================================================
# HULL MEMBERSHIP
# =============================================================================

def _vertex_match(nodes: NodeSet, point: np.ndarray) -> Optional[int]:
    """Index of a hull-vertex node coinciding with point, if any"""

    vertices = nodes.hull_vertices
    if vertices.size == 0:
        return None
    dist = np.linalg.norm(nodes.points[vertices] - point, axis=1)
    k = int(np.argmin(dist))
    if dist[k] <= config.vertex_tol * nodes.diameter:
        return int(vertices[k])
    return None

def _facet_margin(nodes: NodeSet, point: np.ndarray) -> Optional[float]:
    """Largest signed facet distance; > 0 outside, ~0 on the boundary"""
    equations = nodes.hull_equations
    if equations.shape[0] == 0:
        return None
    return float(np.max(equations[:, :-1] @ point + equations[:, -1]))

def _strictly_inside(nodes: NodeSet, point: np.ndarray) -> bool:
    margin = _facet_margin(nodes, point)
    return margin is None or margin < -config.vertex_tol * nodes.diameter

def _interval_contains(nodes: NodeSet, point: np.ndarray) -> bool:
    col = nodes.points[:, 0]
    return bool(col.min() <= point[0] <= col.max())

def in_hull(nodes: NodeSet, query) -> bool:
    """Conv(B) membership; exact for d = 1, solver-based otherwise"""

    point = as_point(query, nodes.dim)
    if nodes.dim == 1:
        return _interval_contains(nodes, point)
    if _vertex_match(nodes, point) is not None:
        return True
    # facets admit no finite multipliers
    if not _strictly_inside(nodes, point):
        return False
    try:
        _solve_dual(nodes, point, np.full(nodes.count, 1.0 / nodes.count))
        return True
    except (HullViolationError, ConvergenceError):
        return False

# =============================================================================
# BASIS EVALUATION
# =============================================================================

def eval_basis(nodes: NodeSet, query, beta: float = 0.0, prior=None) -> MaxentEvaluation:
    """Maxent basis values ψ_i(Δ) and the multipliers behind them"""

    point = as_point(query, nodes.dim)

    k = _vertex_match(nodes, point)
    if k is not None:
        psi = np.zeros(nodes.count)
        psi[k] = 1.0
        return MaxentEvaluation(
            query=point,
            lam=np.full(nodes.dim, np.nan),
            psi=psi,
            iterations=0,
            residual_norm=float(np.linalg.norm(nodes.points[k] - point)),
            vertex_index=k
        )

    if nodes.dim == 1 and not _interval_contains(nodes, point):
        raise HullViolationError(f"query {point[0]:.12g} outside node interval", query=point)
    if nodes.dim > 1 and not _strictly_inside(nodes, point):
        raise HullViolationError(f"query {point.tolist()} is outside Conv(B) or on a facet away from the vertices", query=point)

    prior = gaussian_prior(nodes, point, beta) if prior is None else _checked_prior(nodes, prior)
    lam, iterations, res_norm = _solve_dual(nodes, point, prior)
    psi = _boltzmann_weights(nodes.points - point, prior, lam)

    logger.debug(f"maxent query {point.tolist()}: {iterations} Newton steps, residual {res_norm:.2e}")
    return MaxentEvaluation(query=point, lam=lam, psi=psi, iterations=iterations, residual_norm=res_norm)

class MaxentBasis:
    """Evaluator Ψ(·) over a fixed node set, with solver bookkeeping"""

    kind = BasisKind.MAXENT

    def __init__(self, nodes: NodeSet, beta: float = 0.0):
        if not beta >= 0:
            raise InvalidInputError(f"locality parameter must be >= 0, got {beta}")
        self.nodes = nodes
        self.beta = float(beta)
        self.logger = logging.getLogger(__name__)

        self.solver_stats = {
            "evaluations": 0,
            "newton_iterations": 0,
            "max_iterations": 0,
            "max_residual": 0.0,
            "vertex_shortcuts": 0
        }

    @property
    def n_basis(self) -> int:
        return self.nodes.count

    def contains(self, point) -> bool:
        return in_hull(self.nodes, point)

    def evaluate(self, point) -> MaxentEvaluation:
        result = eval_basis(self.nodes, point, self.beta)
        self._record(result)
        return result

    def __call__(self, point) -> np.ndarray:
        return self.evaluate(point).psi

    def evaluate_many(self, points) -> np.ndarray:
        """Rows Ψ(Δ_j)ᵀ for every point"""

        pts = as_points(points, self.nodes.dim)
        out = np.empty((pts.shape[0], self.n_basis))
        for j, point in enumerate(pts):
            try:
                out[j] = self.evaluate(point).psi
            except HullViolationError as e:
                raise HullViolationError(f"sample {j}: {e}", query=point, index=j) from e
        return out

    def _record(self, result: MaxentEvaluation):
        stats = self.solver_stats
        stats["evaluations"] += 1
        stats["newton_iterations"] += result.iterations
        stats["max_iterations"] = max(stats["max_iterations"], result.iterations)
        stats["max_residual"] = max(stats["max_residual"], result.residual_norm)
        if result.at_vertex:
            stats["vertex_shortcuts"] += 1

    def get_solver_stats(self) -> Dict[str, Any]:
        stats = dict(self.solver_stats)
        evaluations = stats["evaluations"]
        stats["average_iterations"] = stats["newton_iterations"] / evaluations if evaluations else 0.0
        return stats

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "n_basis": self.n_basis, "beta": self.beta, "nodes": self.nodes.to_dict()}

# =============================================================================
# NODE SET I/O
# =============================================================================

def load_nodes(path) -> NodeSet:
    """Read whitespace-separated coordinates, one node per line"""
    return NodeSet(points=as_points(np.loadtxt(path, ndmin=2)))

def save_nodes(nodes: NodeSet, path):
    np.savetxt(path, nodes.points, fmt="%.17g")
