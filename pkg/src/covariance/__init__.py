from .kernels import (THETA_PROFILES, CovarianceKernel, RadialProfile, constant,
                      eval_kernel, indicator_ball, kernel_from_mapping,
                      load_tabulated, scaled_theta, stationary_power, tabulated)
from .sampling import (CovarianceFactor, NoiseIncrement, factorize,
                       grid_covariance_factor, sample_at_points, sample_increment,
                       truncate_field)

__all__ = [
    "CovarianceKernel",
    "RadialProfile",
    "THETA_PROFILES",
    "constant",
    "stationary_power",
    "scaled_theta",
    "indicator_ball",
    "tabulated",
    "load_tabulated",
    "kernel_from_mapping",
    "eval_kernel",
    "CovarianceFactor",
    "NoiseIncrement",
    "factorize",
    "grid_covariance_factor",
    "sample_increment",
    "sample_at_points",
    "truncate_field",
]
