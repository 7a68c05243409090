# empirical_measure.py - Sample Sets and Sample-Average Expectations
"""
The sample set D replaces the unknown parameter density: every expectation in
the Galerkin projection and in the moment formulas is a plain sample average
over D. Generators are seeded so any run can be reproduced bit for bit.
"""

import hashlib
import logging
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from models import (
    EmpiricalMeasure, SampleGenerator, SamplerKind, BasisStats,
    InvalidInputError, EvaluationError, HullViolationError, point_argument
)

logger = logging.getLogger(__name__)

# =============================================================================
# GENERATORS
# =============================================================================

def uniform_grid(lo: float, hi: float, count: int) -> EmpiricalMeasure:
    """Closed grid lo + (j−1)(hi−lo)/(n−1), endpoints included"""

    if count < 1:
        raise InvalidInputError(f"sample count must be positive, got {count}")
    samples = np.array([lo]) if count == 1 else np.linspace(lo, hi, count)
    generator = SampleGenerator(kind=SamplerKind.UNIFORM_GRID, count=count, lo=lo, hi=hi)
    return EmpiricalMeasure(samples=samples.reshape(-1, 1), generator=generator)

def uniform_interior_grid(lo: float, hi: float, count: int) -> EmpiricalMeasure:
    """Open grid lo + j(hi−lo)/(n+1), j = 1..n, endpoints excluded"""

    if count < 1:
        raise InvalidInputError(f"sample count must be positive, got {count}")
    j = np.arange(1, count + 1)
    samples = lo + j * (hi - lo) / (count + 1)
    generator = SampleGenerator(kind=SamplerKind.UNIFORM_INTERIOR_GRID, count=count, lo=lo, hi=hi)
    return EmpiricalMeasure(samples=samples.reshape(-1, 1), generator=generator)

def uniform_random(lo: float, hi: float, count: int, seed: int) -> EmpiricalMeasure:
    """Seeded uniform draws on [lo, hi)"""

    if count < 1:
        raise InvalidInputError(f"sample count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    samples = rng.uniform(lo, hi, size=count)
    generator = SampleGenerator(kind=SamplerKind.UNIFORM_RANDOM, count=count, lo=lo, hi=hi, seed=seed)
    return EmpiricalMeasure(samples=samples.reshape(-1, 1), generator=generator)

def gaussian_random(mean: float, std: float, count: int, seed: int) -> EmpiricalMeasure:
    """Seeded normal draws"""

    if count < 1:
        raise InvalidInputError(f"sample count must be positive, got {count}")
    if not std > 0:
        raise InvalidInputError(f"standard deviation must be positive, got {std}")
    rng = np.random.default_rng(seed)
    samples = rng.normal(mean, std, size=count)
    generator = SampleGenerator(kind=SamplerKind.GAUSSIAN_RANDOM, count=count, mean=mean, std=std, seed=seed)
    return EmpiricalMeasure(samples=samples.reshape(-1, 1), generator=generator)

def generate(generator: SampleGenerator) -> EmpiricalMeasure:
    """Materialize a measure from its descriptor"""

    if generator.kind == SamplerKind.UNIFORM_GRID:
        return uniform_grid(generator.lo, generator.hi, generator.count)
    if generator.kind == SamplerKind.UNIFORM_INTERIOR_GRID:
        return uniform_interior_grid(generator.lo, generator.hi, generator.count)
    if generator.kind == SamplerKind.UNIFORM_RANDOM:
        return uniform_random(generator.lo, generator.hi, generator.count, generator.seed)
    if generator.kind == SamplerKind.GAUSSIAN_RANDOM:
        return gaussian_random(generator.mean, generator.std, generator.count, generator.seed)
    if generator.kind == SamplerKind.FILE:
        return load_samples(generator.source)
    raise InvalidInputError(f"unsupported sampler kind {generator.kind}")

# =============================================================================
# FILE I/O
# =============================================================================

def load_samples(path: Union[str, Path]) -> EmpiricalMeasure:
    """Read one point per line (whitespace-separated coordinates)"""

    samples = np.loadtxt(path, ndmin=2)
    generator = SampleGenerator(kind=SamplerKind.FILE, count=samples.shape[0], source=str(path))
    return EmpiricalMeasure(samples=samples, generator=generator)

def save_samples(measure: EmpiricalMeasure, path: Union[str, Path]):
    np.savetxt(path, measure.samples, fmt="%.17g")

def fingerprint(measure: EmpiricalMeasure) -> str:
    """Short content hash identifying a sample set"""
    digest = hashlib.sha256(np.ascontiguousarray(measure.samples).tobytes()).hexdigest()
    return digest[:16]

# =============================================================================
# EXPECTATIONS
# =============================================================================

def _evaluate_on_samples(measure: EmpiricalMeasure, f: Callable) -> np.ndarray:
    """Stack f(Δ_j) with a finiteness check per sample"""

    values = []
    for j, point in enumerate(measure.samples):
        value = np.asarray(f(point_argument(point)), dtype=float)
        if not np.all(np.isfinite(value)):
            raise EvaluationError(f"function is not finite at sample {j} ({point.tolist()})", index=j)
        values.append(value)
    return np.stack(values)

def expectation(measure: EmpiricalMeasure, f: Callable):
    """(1/n_D) Σ_j f(Δ_j); scalar in, scalar out"""

    values = _evaluate_on_samples(measure, f)
    result = values.mean(axis=0)
    return float(result) if result.ndim == 0 else result

def basis_stats(measure: EmpiricalMeasure, basis, weight: Optional[Callable] = None) -> BasisStats:
    """Gram matrix, mean vector and optional weighted Gram of a basis"""

    try:
        design = basis.evaluate_many(measure.samples)
    except HullViolationError as e:
        raise HullViolationError(f"sample set not inside basis hull: {e}", query=e.query, index=e.index) from e

    n = measure.count
    gram = _weighted_products(design, np.ones(n))
    mean = design.mean(axis=0)

    weighted = None
    if weight is not None:
        a = _evaluate_on_samples(measure, weight).reshape(n)
        weighted = _weighted_products(design, a)

    return BasisStats(gram=gram, mean=mean, weighted_gram=weighted, n_samples=n)

def _weighted_products(design: np.ndarray, a: np.ndarray) -> np.ndarray:
    """(1/n) Σ_j a_j Ψ_j Ψ_jᵀ, symmetrized"""
    products = (design * a[:, None]).T @ design / design.shape[0]
    return 0.5 * (products + products.T)
