# Periodic lattice geometry and the grid-function carrier used by every solver
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ..errors import DimensionMismatchError, DomainError


@dataclass(frozen=True)
class Torus:
    """Periodic box [-L/2, L/2)^d split into `cells` cells per axis."""

    d: int
    extent: float
    cells: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"torus dimension must be 1, 2 or 3, got {self.d}")
        if self.extent <= 0 or self.cells <= 0:
            raise DomainError("torus extent and cell count must be positive")

    @property
    def h(self) -> float:
        return self.extent / self.cells

    @property
    def shape(self) -> tuple:
        return (self.cells,) * self.d

    @property
    def size(self) -> int:
        return self.cells ** self.d

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    @property
    def volume(self) -> float:
        return self.extent ** self.d

    @property
    def axes(self) -> tuple:
        return tuple(range(-self.d, 0))

    def coordinates(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -0.5 * self.extent + (np.arange(self.cells) + 0.5) * self.h

    def centers(self) -> np.ndarray:
        """Cell centers as an (N, d) array in C order of the flattened grid."""
        mesh = np.meshgrid(*([self.coordinates()] * self.d), indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def wavenumbers_squared(self) -> np.ndarray:
        """|k|^2 on the rfftn layout of this grid."""
        full = 2.0 * np.pi * np.fft.fftfreq(self.cells, d=self.h)
        half = 2.0 * np.pi * np.fft.rfftfreq(self.cells, d=self.h)
        axes = [full] * (self.d - 1) + [half]
        mesh = np.meshgrid(*axes, indexing="ij")
        return sum(m ** 2 for m in mesh)

    def locate(self, points: np.ndarray) -> np.ndarray:
        """Flat index of the cell containing each point, wrapping periodically."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != self.d:
            raise DimensionMismatchError(
                f"points of dimension {points.shape[-1]} on a {self.d}-d torus")
        idx = np.floor((points + 0.5 * self.extent) / self.h).astype(np.int64) % self.cells
        return np.ravel_multi_index(tuple(idx.T), self.shape)


@dataclass
class GridFunction:
    """Real values on a torus; an optional leading axis holds replicas."""

    torus: Torus
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape[self.values.ndim - self.torus.d:] != self.torus.shape:
            raise DimensionMismatchError(
                f"values of shape {self.values.shape} do not end with grid shape {self.torus.shape}")

    @classmethod
    def from_callable(cls, torus: Torus, func: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(torus, np.asarray(func(torus.centers()), dtype=float).reshape(torus.shape))

    @classmethod
    def constant(cls, torus: Torus, value: float) -> "GridFunction":
        return cls(torus, np.full(torus.shape, float(value)))

    @property
    def batch_shape(self) -> tuple:
        return self.values.shape[:self.values.ndim - self.torus.d]

    def integral(self) -> Union[float, np.ndarray]:
        """h^d times the sum over cells (per replica when batched)."""
        total = self.torus.cell_volume * self.values.sum(axis=self.torus.axes)
        return float(total) if np.ndim(total) == 0 else total

    def at(self, points: np.ndarray) -> np.ndarray:
        """Values at the cells containing `points` (periodic nearest-cell lookup)."""
        flat = self.values.reshape(self.batch_shape + (self.torus.size,))
        return flat[..., self.torus.locate(points)]

    def sup(self) -> Union[float, np.ndarray]:
        out = self.values.max(axis=self.torus.axes)
        return float(out) if np.ndim(out) == 0 else out

    def _operand(self, other):
        if isinstance(other, GridFunction):
            if other.torus != self.torus or other.values.shape != self.values.shape:
                raise DimensionMismatchError(
                    f"grid functions of shape {self.values.shape} and {other.values.shape} "
                    "cannot be combined")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.torus, self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.torus, self.values - self._operand(other))

    def __mul__(self, other):
        return GridFunction(self.torus, self.values * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.torus, self.values / self._operand(other))
