# src/feynmankac/__init__.py

from .paths import (MCConfig, Estimate, PairPath, estimate, combined_se, gap_in_se, tensor,
                    pi_diagonal, kernel_pair, ones_pair, sample_pair_paths, antithetic_pairs, qtc)
from .moments import (AtomicMeasure, first_moment_rhs, second_moment_rhs,
                      pam_second_moment_oracle, second_moment_closed_form)
from .annealed import annealed_moment_w, annealed_moment_bruteforce, frozen_path_moment
from .lyapunov import (LyapunovEstimate, TailProbe, HarnackScan, log_sup_series,
                       lyapunov_estimate, lyapunov_ladder, slope_estimate, paired_fraction, ldp_tail_probe,
                       harnack_scan)

__all__ = [
    "MCConfig",
    "Estimate",
    "PairPath",
    "estimate",
    "combined_se",
    "gap_in_se",
    "tensor",
    "pi_diagonal",
    "kernel_pair",
    "ones_pair",
    "sample_pair_paths",
    "antithetic_pairs",
    "qtc",
    "AtomicMeasure",
    "first_moment_rhs",
    "second_moment_rhs",
    "pam_second_moment_oracle",
    "second_moment_closed_form",
    "annealed_moment_w",
    "annealed_moment_bruteforce",
    "frozen_path_moment",
    "LyapunovEstimate",
    "TailProbe",
    "HarnackScan",
    "log_sup_series",
    "lyapunov_estimate",
    "slope_estimate",
    "lyapunov_ladder",
    "paired_fraction",
    "ldp_tail_probe",
    "harnack_scan",
]
