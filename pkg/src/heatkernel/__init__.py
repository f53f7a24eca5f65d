from .grid import GridFunction, Torus
from .semigroup import (DominationReport, WeightFamily, apply_heat_semigroup,
                        check_weight_domination, heat_expectation, heat_kernel,
                        heat_multiplier, heat_step)
from .potential import (Regime, RegimeReport, bridge_potential, classify_regime,
                        green, green_constant, khasminskii_bound,
                        khasminskii_exponent, persistence_threshold, potential_at,
                        sphere_area, sup_green_potential, theta_potential)

__all__ = [
    "Torus",
    "GridFunction",
    "heat_kernel",
    "heat_multiplier",
    "heat_step",
    "apply_heat_semigroup",
    "heat_expectation",
    "WeightFamily",
    "DominationReport",
    "check_weight_domination",
    "green",
    "green_constant",
    "sphere_area",
    "persistence_threshold",
    "potential_at",
    "theta_potential",
    "Regime",
    "RegimeReport",
    "classify_regime",
    "sup_green_potential",
    "bridge_potential",
    "khasminskii_bound",
    "khasminskii_exponent",
]
