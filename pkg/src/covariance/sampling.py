# Square-root factors of covariance matrices and Gaussian environment draws
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg

from ..errors import DomainError, IndefiniteCovarianceError
from ..heatkernel.grid import Torus
from .kernels import CovarianceKernel

logger = logging.getLogger(__name__)

NOMINAL_JITTER = 1e-10
JITTER_CEILING = 1e-8
RANK_TOL = 1e-12
MAX_DENSE_CELLS = 10_000


@dataclass(frozen=True)
class CovarianceFactor:
    """F with F @ F.T reproducing the covariance; columns are the retained modes."""

    factor: np.ndarray
    variance: np.ndarray
    jitter: float
    torus: Optional[Torus] = None

    @property
    def rank(self) -> int:
        return self.factor.shape[1]

    @property
    def size(self) -> int:
        return self.factor.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.factor @ self.factor.T


@dataclass(frozen=True)
class NoiseIncrement:
    """One time step of the colored noise on a grid: covariance C(x_i, x_j) * dt."""

    torus: Torus
    dt: float
    values: np.ndarray


def factorize(matrix: np.ndarray, sup_bound: float) -> CovarianceFactor:
    """Symmetric square root of a PSD matrix with a bounded spectral repair.

    Eigenvalues down to -1e-10*sup_bound are clipped silently; down to -1e-8*sup_bound
    they are clipped with a warning; anything more negative is reported as indefinite.
    Numerically zero modes are dropped, so rank-deficient matrices give low-rank factors.
    """
    matrix = np.asarray(matrix, dtype=float)
    if not matrix.size:
        return CovarianceFactor(np.zeros((0, 0)), np.zeros(0), 0.0)
    w, v = scipy.linalg.eigh(matrix)
    w_min = float(w[0])
    ceiling = JITTER_CEILING * sup_bound
    if w_min < -ceiling:
        raise IndefiniteCovarianceError(w_min, ceiling)
    if w_min < -NOMINAL_JITTER * sup_bound:
        logger.warning("PSD repair beyond nominal jitter: min eigenvalue %.3e", w_min)
    jitter = max(0.0, -w_min)
    w_max = float(w[-1])
    keep = w > RANK_TOL * w_max if w_max > 0 else np.zeros(w.shape, dtype=bool)
    factor = v[:, keep] * np.sqrt(w[keep])
    return CovarianceFactor(factor, np.sum(factor ** 2, axis=1), jitter)


@lru_cache(maxsize=16)
def grid_covariance_factor(kernel: CovarianceKernel, torus: Torus) -> CovarianceFactor:
    """Cached factor of [C(x_i, x_j)] over the cell centers of `torus`."""
    if kernel.d != torus.d:
        raise DomainError(f"{kernel.d}-d kernel on a {torus.d}-d torus")
    if torus.size > MAX_DENSE_CELLS:
        raise DomainError(f"{torus.size} cells exceed the dense factorization limit {MAX_DENSE_CELLS}")
    if kernel.is_constant:
        c = kernel.sup_bound
        factor = np.full((torus.size, 1), np.sqrt(c)) if c > 0 else np.zeros((torus.size, 0))
        out = CovarianceFactor(factor, np.full(torus.size, c), 0.0, torus)
    else:
        out = factorize(kernel.matrix(torus.centers()), kernel.sup_bound)
        out = CovarianceFactor(out.factor, out.variance, out.jitter, torus)
    logger.debug("factorized %s on %s: rank %d, jitter %.2e", kernel.variant, torus.shape,
                 out.rank, out.jitter)
    return out


def sample_increment(factor: CovarianceFactor, dt: float, rng: np.random.Generator,
                     batch: Union[int, Tuple[int, ...], None] = None) -> NoiseIncrement:
    """Gaussian grid increment with covariance C * dt; independent across calls."""
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    torus = factor.torus
    lead = () if batch is None else ((batch,) if isinstance(batch, int) else tuple(batch))
    if factor.rank == 0:
        values = np.zeros(lead + torus.shape)
    else:
        z = rng.standard_normal(lead + (factor.rank,))
        values = (z @ factor.factor.T * np.sqrt(dt)).reshape(lead + torus.shape)
    return NoiseIncrement(torus, dt, values)


def sample_at_points(kernel: CovarianceKernel, points: np.ndarray,
                     rng: np.random.Generator) -> np.ndarray:
    """Exact joint draw of the centered field at arbitrary points.

    Coincident points share one value since the field is a function of space.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        return np.zeros(0)
    if kernel.is_constant:
        return np.full(points.shape[0], np.sqrt(kernel.sup_bound) * rng.standard_normal())
    unique, inverse = np.unique(points, axis=0, return_inverse=True)
    f = factorize(kernel.matrix(unique), kernel.sup_bound)
    values = f.factor @ rng.standard_normal(f.rank) if f.rank else np.zeros(unique.shape[0])
    return values[inverse.reshape(-1)]


def truncate_field(values: np.ndarray, n: float) -> np.ndarray:
    """Clips field values to [-sqrt(n), sqrt(n)]."""
    bound = np.sqrt(n)
    return np.clip(values, -bound, bound)
