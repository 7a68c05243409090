# galerkin_surrogate.py - Galerkin Surrogate for Linear Stochastic ODEs
"""
Projects ẋ = A(Δ)x onto a chaos basis to get the deterministic system
ẋ_c = M x_c for the coefficients x_c = vec(X), integrates it with classical
RK4 and turns the coefficient trajectory back into moment estimates.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Any

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from models import (
    LinearStochasticODE, EmpiricalMeasure, BasisStats, BasisKind,
    CoefficientTrajectory, MomentSeries,
    InvalidInputError, ConditioningError, EvaluationError, BlowUpError
)
from system_config import config

logger = logging.getLogger(__name__)

# =============================================================================
# SURROGATE MODEL
# =============================================================================

@dataclass
class Surrogate:
    """Deterministic coefficient dynamics ẋ_c = M x_c"""
    system_matrix: np.ndarray
    stats: BasisStats
    basis_kind: BasisKind
    x_c0: np.ndarray
    ode: LinearStochasticODE
    jitter: float = 0.0
    condition: float = 1.0
    events: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.ode.dimension

    @property
    def n_basis(self) -> int:
        return self.stats.n_basis

    def derivative(self, x_c: np.ndarray) -> np.ndarray:
        return self.system_matrix @ x_c

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basis_kind": self.basis_kind.value,
            "n_basis": self.n_basis,
            "dimension": self.dimension,
            "gram_condition": self.condition,
            "jitter": self.jitter,
            "events": self.events
        }

def _system_matrices(ode: LinearStochasticODE, measure: EmpiricalMeasure) -> np.ndarray:
    """A(Δ_j) stacked to shape (n_D, n, n)"""

    mats = np.empty((measure.count, ode.dimension, ode.dimension))
    for j, point in enumerate(measure.samples):
        A = ode.matrix_at(point)
        if not np.all(np.isfinite(A)):
            raise EvaluationError(f"system matrix is not finite at sample {j} ({point.tolist()})", index=j)
        mats[j] = A
    return mats

def _kron_expectation(design: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """(1/n_D) Σ_j (Φ_jΦ_jᵀ) ⊗ A(Δ_j)"""

    n_samples, n_basis = design.shape
    n = mats.shape[1]
    blocks = np.einsum("ja,jb,jik->aibk", design, design, mats) / n_samples
    return blocks.reshape(n_basis * n, n_basis * n)

def _factor_gram(gram: np.ndarray, events: List[Dict[str, Any]]):
    """Cholesky factor of the Gram matrix, with one jittered retry"""

    jitter = 0.0
    factored = gram
    try:
        factor = cho_factor(factored, lower=True)
    except LinAlgError:
        jitter = config.gram_jitter_scale * np.trace(gram) / gram.shape[0]
        logger.warning(f"Gram factorization failed; retrying with ridge jitter {jitter:.3e}")
        events.append({"event": "gram_jitter", "jitter": jitter})
        factored = gram + jitter * np.eye(gram.shape[0])
        try:
            factor = cho_factor(factored, lower=True)
        except LinAlgError as e:
            raise ConditioningError(f"Gram matrix not positive definite even with jitter {jitter:.3e}", condition=np.inf) from e

    eigenvalues = np.linalg.eigvalsh(factored)
    condition = float(eigenvalues[-1] / eigenvalues[0]) if eigenvalues[0] > 0 else np.inf
    if condition > config.gram_cond_limit:
        raise ConditioningError(
            f"Gram matrix condition number {condition:.3e} exceeds {config.gram_cond_limit:.3e}; "
            f"use fewer basis functions or more samples",
            condition=condition
        )
    return factor, jitter, condition

def build_surrogate(ode: LinearStochasticODE, basis, measure: EmpiricalMeasure) -> Surrogate:
    """M = (E[ΦΦᵀ] ⊗ I_n)⁻¹ E[(ΦΦᵀ) ⊗ A(Δ)] by sample averages"""

    design = basis.evaluate_many(measure.samples)
    mats = _system_matrices(ode, measure)
    n_samples, n_basis = design.shape
    n = ode.dimension

    gram = design.T @ design / n_samples
    gram = 0.5 * (gram + gram.T)
    mean = design.mean(axis=0)
    expected = _kron_expectation(design, mats)

    weighted = None
    if n == 1:
        weighted = expected.copy()

    events: List[Dict[str, Any]] = []
    factor, jitter, condition = _factor_gram(gram, events)

    # (G ⊗ I_n)⁻¹ acts on the basis index of each (basis, state) row block
    rhs = expected.reshape(n_basis, n * n_basis * n)
    system_matrix = cho_solve(factor, rhs).reshape(n_basis * n, n_basis * n)

    stats = BasisStats(gram=gram, mean=mean, weighted_gram=weighted, n_samples=n_samples)
    x_c0 = initial_coefficients(basis, ode, measure, stats, design=design, factor=factor)

    logger.info(f"Surrogate built: {basis.kind.value} n_B={n_basis} n={n} n_D={n_samples} cond(G)={condition:.3e}")
    return Surrogate(
        system_matrix=system_matrix,
        stats=stats,
        basis_kind=basis.kind,
        x_c0=x_c0,
        ode=ode,
        jitter=jitter,
        condition=condition,
        events=events
    )

# =============================================================================
# INITIAL COEFFICIENTS
# =============================================================================

def initial_coefficients(
    basis,
    ode: LinearStochasticODE,
    measure: EmpiricalMeasure,
    stats: BasisStats,
    design: Optional[np.ndarray] = None,
    factor=None
) -> np.ndarray:
    """x_c(0) = vec(X₀) with X₀ the projection of x(0, Δ)"""

    n = ode.dimension
    n_basis = stats.n_basis

    if ode.deterministic_start:
        x0 = ode.initial_state()
        if basis.kind == BasisKind.MAXENT:
            # partition of unity: a constant is Σ c ψ_i
            return np.kron(np.ones(n_basis), x0)
        if basis.kind == BasisKind.APC:
            # φ_0 ≡ 1
            X0 = np.zeros((n, n_basis))
            X0[:, 0] = x0
            return X0.T.reshape(-1)

    if design is None:
        design = basis.evaluate_many(measure.samples)
    if factor is None:
        factor, _, _ = _factor_gram(stats.gram, [])

    states = np.stack([ode.initial_state(point) for point in measure.samples])
    if not np.all(np.isfinite(states)):
        raise EvaluationError("initial condition is not finite on every sample")
    # E[x₀ Φᵀ] = X₀ G  ->  X₀ᵀ = G⁻¹ E[Φ x₀ᵀ]
    projection = design.T @ states / measure.count
    X0_T = cho_solve(factor, projection)
    return X0_T.reshape(-1)

# =============================================================================
# TIME INTEGRATION
# =============================================================================

def time_grid(t0: float, t_final: float, step: float) -> np.ndarray:
    """t0, t0 + h, ..., with a shortened last step landing on t_final"""

    if not step > 0 or not t_final > t0:
        raise InvalidInputError(f"invalid time grid [{t0}, {t_final}] with step {step}")
    n_full = int(np.floor((t_final - t0) / step + 1e-9))
    times = t0 + step * np.arange(n_full + 1)
    if t_final - times[-1] > 1e-9 * step:
        times = np.append(times, t_final)
    else:
        times[-1] = t_final
    return times

def integrate(
    surrogate: Surrogate,
    t0: Optional[float] = None,
    t_final: Optional[float] = None,
    step: Optional[float] = None,
    x_c0: Optional[np.ndarray] = None
) -> CoefficientTrajectory:
    """Classical fourth-order Runge-Kutta on ẋ_c = M x_c"""

    t0 = surrogate.ode.t0 if t0 is None else t0
    t_final = surrogate.ode.t_final if t_final is None else t_final
    step = surrogate.ode.step if step is None else step
    M = surrogate.system_matrix

    times = time_grid(t0, t_final, step)
    states = np.empty((times.size, M.shape[0]))
    x = np.array(surrogate.x_c0 if x_c0 is None else x_c0, dtype=float)
    states[0] = x

    for k in range(1, times.size):
        h = times[k] - times[k - 1]
        k1 = M @ x
        k2 = M @ (x + 0.5 * h * k1)
        k3 = M @ (x + 0.5 * h * k2)
        k4 = M @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise BlowUpError(f"coefficient state became non-finite at t = {times[k]:.6g}", t=float(times[k]))
        states[k] = x

    return CoefficientTrajectory(times=times, states=states, dimension=surrogate.dimension, n_basis=surrogate.n_basis)

# =============================================================================
# MOMENTS
# =============================================================================

def moments(trajectory: CoefficientTrajectory, stats: BasisStats, label: str = "") -> MomentSeries:
    """μ̂ = X E[Φ], Σ̂ = X (E[ΦΦᵀ] − E[Φ]E[Φ]ᵀ) Xᵀ at every grid time"""

    if trajectory.n_basis != stats.n_basis:
        raise InvalidInputError(f"trajectory has {trajectory.n_basis} basis terms, stats have {stats.n_basis}")

    n = trajectory.dimension
    X = trajectory.states.reshape(-1, trajectory.n_basis, n).transpose(0, 2, 1)
    mean = X @ stats.mean
    cov = X @ stats.covariance @ X.transpose(0, 2, 1)
    cov = 0.5 * (cov + cov.transpose(0, 2, 1))
    return MomentSeries(times=trajectory.times, mean=mean, cov=cov, label=label)

# =============================================================================
# DIAGNOSTICS
# =============================================================================

def galerkin_residual(surrogate: Surrogate, x_c: np.ndarray, xdot_c: np.ndarray, measure: EmpiricalMeasure, basis) -> np.ndarray:
    """vec(E[e Φᵀ]) with e = Ẋ Φ − A(Δ) X Φ; zero for consistent (x_c, ẋ_c)"""

    n = surrogate.dimension
    n_basis = surrogate.n_basis
    x_c = np.asarray(x_c, dtype=float).ravel()
    xdot_c = np.asarray(xdot_c, dtype=float).ravel()
    if x_c.size != n * n_basis or xdot_c.size != n * n_basis:
        raise InvalidInputError(f"coefficient vectors must have length {n * n_basis}")

    X = x_c.reshape(n_basis, n).T
    Xdot = xdot_c.reshape(n_basis, n).T
    design = basis.evaluate_many(measure.samples)
    mats = _system_matrices(surrogate.ode, measure)

    states = design @ X.T
    errors = design @ Xdot.T - np.einsum("jik,jk->ji", mats, states)
    projection = errors.T @ design / measure.count
    return projection.T.reshape(-1)
