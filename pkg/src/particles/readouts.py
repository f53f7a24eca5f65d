# Readout functions f for pairings <f, X_t>: the config-named catalog
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import ConfigError, DomainError
from ..heatkernel.semigroup import heat_expectation


class Readout(ABC):
    """A test function on R^d with its Laplacian and heat flow."""

    d: int

    @abstractmethod
    def __call__(self, points: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def laplacian(self, points: np.ndarray) -> np.ndarray:
        ...

    def heat_flow(self, t: float, x) -> float:
        """P_t f(x) on R^d."""
        return heat_expectation(self, x, t, self.d)

    @staticmethod
    def _points(points, d) -> np.ndarray:
        return np.asarray(points, dtype=float).reshape(-1, d)


@dataclass(frozen=True)
class GaussianBump(Readout):
    center: Tuple[float, ...]
    width: float

    @property
    def d(self) -> int:
        return len(self.center)

    def _r2(self, points):
        return np.sum((self._points(points, self.d) - np.asarray(self.center)) ** 2, axis=-1)

    def __call__(self, points):
        return np.exp(-self._r2(points) / (2.0 * self.width ** 2))

    def laplacian(self, points):
        r2 = self._r2(points)
        w2 = self.width ** 2
        return np.exp(-r2 / (2.0 * w2)) * (r2 / w2 ** 2 - self.d / w2)

    def heat_flow(self, t, x):
        s2 = self.width ** 2 + t
        r2 = float(self._r2(x)[0])
        return float((self.width ** 2 / s2) ** (self.d / 2) * np.exp(-r2 / (2.0 * s2)))


@dataclass(frozen=True)
class IndicatorBall(Readout):
    center: Tuple[float, ...]
    radius: float

    @property
    def d(self) -> int:
        return len(self.center)

    def __call__(self, points):
        r = np.linalg.norm(self._points(points, self.d) - np.asarray(self.center), axis=-1)
        return (r <= self.radius).astype(float)

    def laplacian(self, points):
        raise DomainError("indicator readout has no Laplacian; use a smooth readout")


@dataclass(frozen=True)
class ConstantReadout(Readout):
    value: float
    dim: int = 1

    @property
    def d(self) -> int:
        return self.dim

    def __call__(self, points):
        return np.full(self._points(points, self.d).shape[0], float(self.value))

    def laplacian(self, points):
        return np.zeros(self._points(points, self.d).shape[0])

    def heat_flow(self, t, x):
        return float(self.value)


_CALL = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def parse_readout(expression: str, d: int) -> Readout:
    """gaussian_bump(center..., width), indicator_ball(center..., r) or constant(v).

    A single argument to the first two places the center at the origin.
    """
    match = _CALL.match(expression)
    if not match:
        raise ConfigError(f"cannot parse readout {expression!r}")
    name, raw = match.groups()
    try:
        args = [float(a) for a in raw.split(",") if a.strip()]
    except ValueError as e:
        raise ConfigError(f"readout {expression!r}: {e}") from e
    if name == "constant":
        if len(args) != 1:
            raise ConfigError("constant(v) takes one argument")
        return ConstantReadout(args[0], d)
    if name in ("gaussian_bump", "indicator_ball"):
        if len(args) == 1:
            center, scale = (0.0,) * d, args[0]
        elif len(args) == d + 1:
            center, scale = tuple(args[:d]), args[d]
        else:
            raise ConfigError(f"{name} takes 1 or {d + 1} arguments in d={d}")
        if scale <= 0:
            raise ConfigError(f"{name}: scale must be positive")
        return GaussianBump(center, scale) if name == "gaussian_bump" else IndicatorBall(center, scale)
    raise ConfigError(f"unknown readout {name!r}")
