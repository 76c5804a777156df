"""Spacetime-algebra toolkit for local Lorentz rotations, gauge connections and torsion."""
from .algebra import Multivector, geometric_product, matrix_rep, reverse, sandwich
from .boosts import boost_matrix, frame_triple, rotor_from_velocity
from .connections import ConnectionField, TetradField, torsion_transform_crosscheck
from .dirac_hestenes import GaugeModel, SpinorField, dh_lagrangian, dh_residual
from .em import coulomb_field, lienard_wiechert_uniform, pullback_field
from .fields import EventGrid, Field, maxwell_residual
from .rotor_gauge import RotorField, gauge_dirac_residual, noncommutation_defect

__version__ = "0.1.0"

__all__ = [
    "ConnectionField", "EventGrid", "Field", "GaugeModel", "Multivector", "RotorField", "SpinorField",
    "TetradField", "boost_matrix", "coulomb_field", "dh_lagrangian", "dh_residual", "frame_triple",
    "gauge_dirac_residual", "geometric_product", "lienard_wiechert_uniform", "matrix_rep",
    "maxwell_residual", "noncommutation_defect", "pullback_field", "reverse", "rotor_from_velocity",
    "sandwich", "torsion_transform_crosscheck",
]
