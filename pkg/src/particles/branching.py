# Branching Brownian motion in a random environment at mass scale 1/n
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..covariance import CovarianceKernel, sample_at_points, truncate_field
from ..errors import DomainError, PopulationCapError
from ..streams import replica_rng

logger = logging.getLogger(__name__)


class GaussianEnvironment:
    """Centered Gaussian field with covariance C, drawn jointly at the occupied sites."""

    def __init__(self, kernel: CovarianceKernel):
        self.kernel = kernel

    def sample(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return sample_at_points(self.kernel, points, rng)


class FixedEnvironment:
    """Deterministic field value at every site."""

    def __init__(self, value: float):
        self.value = float(value)

    def sample(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return np.full(len(points), self.value)


@dataclass
class BranchingConfig:
    n: int
    kernel: CovarianceKernel
    initial: np.ndarray
    horizon: float
    max_population: int = 10 ** 6
    environment: Optional[object] = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        self.initial = np.asarray(self.initial, dtype=float).reshape(-1, self.kernel.d)
        if self.environment is None:
            self.environment = GaussianEnvironment(self.kernel)

    @classmethod
    def point_mass(cls, n: int, kernel: CovarianceKernel, point=None, mass: float = 1.0,
                   horizon: float = 1.0, **kwargs) -> "BranchingConfig":
        """round(mass * n) particles at `point` (origin by default)."""
        point = np.zeros(kernel.d) if point is None else np.asarray(point, dtype=float)
        count = int(round(mass * n))
        return cls(n, kernel, np.tile(point, (count, 1)), horizon, **kwargs)

    @property
    def d(self) -> int:
        return self.kernel.d

    @property
    def epoch_length(self) -> float:
        return 1.0 / self.n

    @property
    def truncation(self) -> float:
        return float(np.sqrt(self.n))

    @property
    def epochs(self) -> int:
        return int(np.floor(self.horizon * self.n + 1e-9))


@dataclass
class ParticlePopulation:
    """Particles after branching at epoch i; X_t(A) = #(particles in A) / n.

    `parents` and `xi` are the displaced parent positions and the truncated field
    values that produced this population (None for the initial one).
    """

    epoch: int
    positions: np.ndarray
    n: int
    parents: Optional[np.ndarray] = field(default=None, repr=False)
    xi: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def time(self) -> float:
        return self.epoch / self.n

    @property
    def count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def mass(self) -> float:
        return self.count / self.n


def initial_population(config: BranchingConfig) -> ParticlePopulation:
    return ParticlePopulation(0, config.initial.copy(), config.n)


def step_epoch(pop: ParticlePopulation, config: BranchingConfig,
               rng: np.random.Generator) -> ParticlePopulation:
    """Diffuse for 1/n, draw the truncated field at the new sites, then split or die."""
    cap = config.max_population
    if pop.count > cap:
        raise PopulationCapError(pop.epoch, pop.count, cap)
    d = config.d
    if pop.count == 0:
        return ParticlePopulation(pop.epoch + 1, np.zeros((0, d)), pop.n, np.zeros((0, d)), np.zeros(0))
    moved = pop.positions + rng.standard_normal((pop.count, d)) * np.sqrt(config.epoch_length)
    xi = truncate_field(config.environment.sample(moved, rng), config.n)
    p_split = 0.5 + xi / (2.0 * config.truncation)
    split = rng.random(pop.count) < p_split
    offspring = np.repeat(moved[split], 2, axis=0)
    if offspring.shape[0] > cap:
        raise PopulationCapError(pop.epoch + 1, offspring.shape[0], cap)
    return ParticlePopulation(pop.epoch + 1, offspring, pop.n, moved, xi)


def snap_epochs(times: Sequence[float], config: BranchingConfig) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.size and (times.min() < 0 or times.max() > config.horizon + 1e-12):
        raise DomainError(f"save times must lie in [0, {config.horizon}]")
    return np.unique(np.rint(times * config.n).astype(int))


def run(config: BranchingConfig, save_times: Optional[Sequence[float]] = None,
        rng: Optional[np.random.Generator] = None) -> List[ParticlePopulation]:
    """Snapshots at the epochs nearest to `save_times`; every epoch when omitted."""
    rng = rng if rng is not None else np.random.default_rng()
    epochs = (np.arange(config.epochs + 1) if save_times is None
              else snap_epochs(save_times, config))
    pop = initial_population(config)
    snapshots = []
    for target in epochs:
        while pop.epoch < target:
            pop = step_epoch(pop, config, rng)
        snapshots.append(pop)
    logger.debug("branching run n=%d: %d snapshots, final count %d", config.n, len(snapshots),
                 pop.count)
    return snapshots


def empirical_pairing(snapshot: ParticlePopulation, f) -> Tuple[float, float]:
    """(<f, X>, <f x f, X x X>) = ((1/n) sum f, (1/n^2) sum_i sum_j f f)."""
    if snapshot.count == 0:
        return 0.0, 0.0
    first = float(np.sum(f(snapshot.positions))) / snapshot.n
    return first, first * first


def run_replica(config: BranchingConfig, save_times, seed: int, index: int) -> List[ParticlePopulation]:
    """Replica `index` of an ensemble, on its own stream split from `seed`."""
    return run(config, save_times, replica_rng(seed, index))
