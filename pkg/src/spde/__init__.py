from .noise import NoisePath
from .solvers import (DerivativePair, LogLaplaceSolution, PamSolution, SplittingScheme,
                      SplittingStepper, SpdeSolution, derivative_quotient, integrate,
                      solve_log_laplace, solve_pam, solve_stratonovich_pam,
                      stratonovich_identity_gap, total_mass_series)
from .diagnostics import (comparison_allowance, comparison_violations, ensemble_at, ensemble_mean,
                          holder_scan, moment_profile, trajectory_frame,
                          weighted_sup_moments)

__all__ = [
    "NoisePath",
    "SplittingScheme",
    "SplittingStepper",
    "SpdeSolution",
    "PamSolution",
    "LogLaplaceSolution",
    "DerivativePair",
    "integrate",
    "solve_pam",
    "solve_log_laplace",
    "solve_stratonovich_pam",
    "stratonovich_identity_gap",
    "derivative_quotient",
    "total_mass_series",
    "ensemble_mean",
    "ensemble_at",
    "comparison_allowance",
    "comparison_violations",
    "moment_profile",
    "weighted_sup_moments",
    "holder_scan",
    "trajectory_frame",
]
