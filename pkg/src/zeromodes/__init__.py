"""Numerics for Aharonov-Casher zero modes and the critical magnetic coupling.

Radial quadrature, zero-mode construction from a radial field, the K_l
functional, planar finite-difference checks, closed-form bounds, the
uncertainty-inequality family and derivative-free optimizers.
"""

from .bounds import bound_report, kc_upper, ku, sobolev_lower, stability_envelope, zc_3d
from .functionals import (coulomb, el_residual, energy, functional_report, kl, l2_norm_sq,
                          magnetic_energy, scaled_energy)
from .modes import (NoSquareIntegrableModeError, ZeroMode, ac_construct, family_historical,
                    family_power, family_step, normalize, rescale)
from .radial import DivergenceError, RadialGrid, RadialProfile, differentiate, integrate_radial

__version__ = "0.1.0"

__all__ = [
    "DivergenceError", "NoSquareIntegrableModeError", "RadialGrid", "RadialProfile", "ZeroMode",
    "ac_construct", "bound_report", "coulomb", "differentiate", "el_residual", "energy",
    "family_historical", "family_power", "family_step", "functional_report", "integrate_radial",
    "kc_upper", "kl", "ku", "l2_norm_sq", "magnetic_energy", "normalize", "rescale",
    "scaled_energy", "sobolev_lower", "stability_envelope", "zc_3d",
]
