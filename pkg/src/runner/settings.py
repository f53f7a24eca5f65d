# Experiment configuration: INI files parsed into a validated, hashable ExperimentConfig
import configparser
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional

from .. import config as env
from ..covariance import CovarianceKernel, kernel_from_mapping
from ..errors import ConfigError
from ..feynmankac import MCConfig
from ..heatkernel.grid import Torus
from ..particles import Readout, parse_readout
from ..spde import SplittingScheme

logger = logging.getLogger(__name__)

EXPERIMENT_NAMES = (
    "threshold-table",
    "pam-oracle",
    "moments-triangle",
    "comparison-suite",
    "extinction-scan",
    "persistence-scan",
    "duality-ladder",
    "lyapunov-ladder",
)

DEFAULTS = {
    "grid": {"d": "1", "extent": "16", "cells": "128"},
    "scheme": {"dt": "0.001", "ordering": "symmetric", "horizon": "1"},
    "mc": {"replicas": "200", "paths": "4000", "path_dt": "0.01", "antithetic": "false"},
    "output": {"trajectory": "false"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kernel_block: Dict[str, str]
    d: int
    extent: float
    cells: int
    dt: float
    ordering: str
    horizon: float
    replicas: int
    paths: int
    path_dt: float
    seed: int
    antithetic: bool
    chunk: int
    readouts: Dict[str, str]
    out_dir: str
    trajectory: bool
    params: Dict[str, str] = field(default_factory=dict)
    text: str = field(default="", repr=False)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()[:16]

    def kernel(self) -> CovarianceKernel:
        return kernel_from_mapping(self.kernel_block, self.d)

    def torus(self) -> Torus:
        return Torus(self.d, self.extent, self.cells)

    def scheme(self) -> SplittingScheme:
        return SplittingScheme(self.dt, self.ordering)

    def mc(self, seed: Optional[int] = None) -> MCConfig:
        return MCConfig(self.paths, self.path_dt, self.seed if seed is None else seed, self.antithetic)

    def readout_catalog(self) -> Dict[str, Readout]:
        return {name: parse_readout(expr, self.d) for name, expr in self.readouts.items()}

    def param_tuple(self, name: str, default: tuple, kind=float) -> tuple:
        value = self.param(name, default, kind)
        return value if isinstance(value, tuple) else (value,)

    def param(self, name: str, default: Any = None, kind=float):
        """A value from [params], converted with `kind`; comma lists become tuples."""
        if name not in self.params:
            if default is None:
                raise ConfigError(f"[params] is missing {name!r}")
            return default
        raw = self.params[name]
        try:
            if "," in raw:
                return tuple(kind(v.strip()) for v in raw.split(",") if v.strip())
            return kind(raw)
        except ValueError as e:
            raise ConfigError(f"[params] {name} = {raw!r}: {e}") from e


def canonical_text(parser: configparser.ConfigParser) -> str:
    """Sorted sections and keys; the basis of the config hash."""
    lines = []
    for section in sorted(parser.sections()):
        lines.append(f"[{section}]")
        for key in sorted(parser[section]):
            lines.append(f"{key} = {parser[section][key].strip()}")
    return "\n".join(lines) + "\n"


def _parser(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_dict(DEFAULTS)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from e
    return parser


def _as_bool(value) -> bool:
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _get(parser, section, key, kind):
    try:
        return kind(parser.get(section, key))
    except (configparser.Error, ValueError) as e:
        raise ConfigError(f"[{section}] {key}: {e}") from e


def parse_config(text: str, overrides: Optional[Mapping[str, Any]] = None,
                 use_env: bool = True, chunk: Optional[int] = None) -> ExperimentConfig:
    """Builds an ExperimentConfig from INI text.

    `overrides` maps "section.key" to a value and wins over the file; SBMRE_SEED wins over
    the file unless `use_env` is off. `chunk` replaces SBMRE_CHUNK when the file sets none.
    """
    parser = _parser(text)
    if not parser.has_option("mc", "seed"):
        parser.set("mc", "seed", str(env.SEED))
    if not parser.has_option("mc", "chunk"):
        parser.set("mc", "chunk", str(chunk if chunk is not None else env.CHUNK))
    seed_env = env.env_override("SBMRE_SEED") if use_env else None
    if seed_env is not None:
        parser.set("mc", "seed", seed_env)
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, key = dotted.split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, str(value))
    for required in ("experiment", "kernel"):
        if not parser.has_section(required):
            raise ConfigError(f"config has no [{required}] section")
    out_dir = parser.get("output", "dir", fallback=env.OUT_DIR)
    # the output directory is not part of what is computed, so it stays out of the hash
    if parser.has_option("output", "dir"):
        parser.remove_option("output", "dir")
    return ExperimentConfig(
        name=_get(parser, "experiment", "name", str).strip(),
        kernel_block=dict(parser["kernel"]),
        d=_get(parser, "grid", "d", int),
        extent=_get(parser, "grid", "extent", float),
        cells=_get(parser, "grid", "cells", int),
        dt=_get(parser, "scheme", "dt", float),
        ordering=_get(parser, "scheme", "ordering", str).strip(),
        horizon=_get(parser, "scheme", "horizon", float),
        replicas=_get(parser, "mc", "replicas", int),
        paths=_get(parser, "mc", "paths", int),
        path_dt=_get(parser, "mc", "path_dt", float),
        seed=_get(parser, "mc", "seed", int),
        antithetic=_as_bool(parser.get("mc", "antithetic")),
        chunk=_get(parser, "mc", "chunk", int),
        readouts=dict(parser["readouts"]) if parser.has_section("readouts") else {},
        out_dir=out_dir,
        trajectory=_as_bool(parser.get("output", "trajectory")),
        params=dict(parser["params"]) if parser.has_section("params") else {},
        text=canonical_text(parser),
    )


def load_config(path: str, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    config = parse_config(text, overrides)
    logger.debug("loaded %s from %s (hash %s)", config.name, path, config.config_hash)
    return config


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    """Raises ConfigError unless every field is usable; returns the config unchanged."""
    if config.name not in EXPERIMENT_NAMES:
        raise ConfigError(f"unknown experiment {config.name!r}; choose from {', '.join(EXPERIMENT_NAMES)}")
    for label, value in (("grid.extent", config.extent), ("grid.cells", config.cells),
                         ("scheme.dt", config.dt), ("scheme.horizon", config.horizon),
                         ("mc.replicas", config.replicas), ("mc.paths", config.paths), ("mc.chunk", config.chunk),
                         ("mc.path_dt", config.path_dt)):
        if not value > 0:
            raise ConfigError(f"{label} must be positive, got {value}")
    if config.seed < 0:
        raise ConfigError(f"mc.seed must be non-negative, got {config.seed}")
    if not config.readouts:
        raise ConfigError("the [readouts] catalog is empty")
    try:
        config.kernel()
        config.readout_catalog()
        config.torus()
        config.scheme()
        config.mc()
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return config
