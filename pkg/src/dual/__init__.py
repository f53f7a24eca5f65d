# src/dual/__init__.py

from .process import PoissonClock, DualState, replay_jump, evolve_dual, jump_log_frame
from .checks import (TorusConstant, PointMass, DualityGap, ThirdMomentScan, laplace_left,
                     duality_gap, duality_ladder, ladder_non_increasing, third_moment_scan)

__all__ = [
    "PoissonClock",
    "DualState",
    "replay_jump",
    "evolve_dual",
    "jump_log_frame",
    "TorusConstant",
    "PointMass",
    "DualityGap",
    "ThirdMomentScan",
    "laplace_left",
    "duality_gap",
    "duality_ladder",
    "ladder_non_increasing",
    "third_moment_scan",
]
