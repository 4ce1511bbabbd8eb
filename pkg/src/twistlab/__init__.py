"""Orlicz sequence spaces under complex interpolation, with numerical checks.

The main entry points are re-exported here; see the submodules for the
full surface.
"""
from .estimate import ConstantEstimate
from .exceptions import (ConvergenceError, DomainError, TwistlabError, UnsupportedOperation,
                         UsageError)
from .interpolation import (GCoefficients, InterpolationCouple, b1_jet, g_boundary_eval, g_eval,
                            g_jet, k_constant, kalton_peck_couple, omega_n, phi_theta,
                            phi_theta_inverse, phi_theta_n, phi_theta_product, psi_map)
from .jets import (ConformalMap, Jet, cauchy_coefficient_oracle, conformal_boundary_eval,
                   conformal_jet, jet_add, jet_mul, jet_scale, two_point_power_jet)
from .orlicz import (Delta2Profile, OrliczFunction, delta2_profile, estimate_delta2,
                     estimate_quasi_additivity, estimate_scaling_constant, evaluate, inverse,
                     luxemburg_norm)
from .spaces import (BlockVector, complexification_norm, fenchel_orlicz_norm, real_imag_split,
                     rochberg_quasinorm)

__version__ = "0.1.0"

__all__ = [
    "ConstantEstimate", "ConvergenceError", "DomainError", "TwistlabError",
    "UnsupportedOperation", "UsageError", "GCoefficients", "InterpolationCouple", "b1_jet",
    "g_boundary_eval", "g_eval", "g_jet", "k_constant", "kalton_peck_couple", "omega_n",
    "phi_theta", "phi_theta_inverse", "phi_theta_n", "phi_theta_product", "psi_map",
    "ConformalMap", "Jet",
    "cauchy_coefficient_oracle", "conformal_boundary_eval", "conformal_jet", "jet_add",
    "jet_mul", "jet_scale", "two_point_power_jet", "Delta2Profile", "OrliczFunction",
    "delta2_profile", "estimate_delta2", "estimate_quasi_additivity",
    "estimate_scaling_constant", "evaluate", "inverse", "luxemburg_norm", "BlockVector",
    "complexification_norm", "fenchel_orlicz_norm", "real_imag_split", "rochberg_quasinorm",
]
