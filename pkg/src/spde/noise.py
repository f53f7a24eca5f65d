# Replayable realizations of the colored noise, shared between coupled solvers
import logging
from collections import OrderedDict
from typing import Optional, Tuple, Union

import numpy as np

from ..covariance import (CovarianceFactor, CovarianceKernel, constant,
                          grid_covariance_factor, sample_increment)
from ..heatkernel.grid import Torus

logger = logging.getLogger(__name__)


class NoisePath:
    """Seeded sequence of grid increments dW_k with covariance C * dt.

    Step k draws from SeedSequence(seed, spawn_key=(k,)), so any step can be replayed
    bit-identically in any order; recent steps are kept in a bounded cache.
    """

    def __init__(self, factor: CovarianceFactor, dt: float, seed: int,
                 batch: Union[int, Tuple[int, ...], None] = None,
                 kernel: Optional[CovarianceKernel] = None, cache_bytes: int = 2 ** 28):
        self.factor = factor
        self.torus: Torus = factor.torus
        self.dt = float(dt)
        self.seed = int(seed)
        self.batch = () if batch is None else ((batch,) if isinstance(batch, int) else tuple(batch))
        self.kernel = kernel
        self._cache = OrderedDict()
        step_bytes = 8 * int(np.prod(self.batch + self.torus.shape))
        self._cache_steps = max(1, cache_bytes // max(step_bytes, 1))

    @classmethod
    def from_kernel(cls, kernel: CovarianceKernel, torus: Torus, dt: float, seed: int,
                    batch=None, **kwargs) -> "NoisePath":
        return cls(grid_covariance_factor(kernel, torus), dt, seed, batch, kernel, **kwargs)

    @classmethod
    def silent(cls, torus: Torus, dt: float, batch=None) -> "NoisePath":
        """Noise-off path: every increment is zero."""
        return cls.from_kernel(constant(0.0, torus.d), torus, dt, 0, batch)

    @property
    def variance(self) -> np.ndarray:
        """Per-cell variance rate C(x, x) as realized by the factor."""
        return self.factor.variance.reshape(self.torus.shape)

    @property
    def is_silent(self) -> bool:
        return self.factor.rank == 0

    def rng(self, step: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(int(step),)))

    def increment(self, step: int) -> np.ndarray:
        cached = self._cache.get(step)
        if cached is not None:
            self._cache.move_to_end(step)
            return cached
        values = sample_increment(self.factor, self.dt, self.rng(step), self.batch or None).values
        values.setflags(write=False)
        self._cache[step] = values
        if len(self._cache) > self._cache_steps:
            self._cache.popitem(last=False)
        return values
