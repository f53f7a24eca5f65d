# src/particles/__init__.py

from .readouts import (Readout, GaussianBump, IndicatorBall, ConstantReadout, parse_readout)
from .branching import (GaussianEnvironment, FixedEnvironment, BranchingConfig, ParticlePopulation,
                        initial_population, step_epoch, snap_epochs, run, run_replica,
                        empirical_pairing)
from .martingale import (martingale_residual, conditional_martingale_residual, residual_summary,
                         snapshot_frame)

__all__ = [
    "Readout",
    "GaussianBump",
    "IndicatorBall",
    "ConstantReadout",
    "parse_readout",
    "GaussianEnvironment",
    "FixedEnvironment",
    "BranchingConfig",
    "ParticlePopulation",
    "initial_population",
    "step_epoch",
    "snap_epochs",
    "run",
    "run_replica",
    "empirical_pairing",
    "martingale_residual",
    "conditional_martingale_residual",
    "residual_summary",
    "snapshot_frame",
]
