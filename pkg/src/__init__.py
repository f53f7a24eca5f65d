"""
SBMRE lab - simulation and verification of super-Brownian motion in random environments
"""

__version__ = "0.3.0"

__all__ = ["config", "errors", "covariance", "heatkernel", "spde", "particles",
           "feynmankac", "dual", "runner"]
