"""Commutative triples over R^n and the Heisenberg group.

Deciders for commutativity (``repr_core``), Bessel- and Laguerre-type
spherical functions (``spherical_rn``, ``heisenberg``), invariant
differential operators (``diffops``) and property checks (``verifiers``).
"""

from .repr_core import (
    CommutativityVerdict,
    HighestWeight,
    check_triple_heisenberg,
    check_triple_rn,
    is_singular,
    pieri_tensor,
    weyl_dim,
)
from .spherical_rn import BesselLabel, SphericalFunction, phi_closed_form, phi_quadrature, spectrum_embed
from .heisenberg import LaguerreLabel, laguerre_spherical

__version__ = "0.1.0"

__all__ = [
    "CommutativityVerdict",
    "HighestWeight",
    "check_triple_heisenberg",
    "check_triple_rn",
    "is_singular",
    "pieri_tensor",
    "weyl_dim",
    "BesselLabel",
    "SphericalFunction",
    "phi_closed_form",
    "phi_quadrature",
    "spectrum_embed",
    "LaguerreLabel",
    "laguerre_spherical",
]
