"""Representations, quasi-states and field reconstruction for finite-dimensional C*-algebras."""

from .algebra import AlgebraDescriptor, AlgebraElement, canonical_basis, is_positive, norm, random_element, unitize
from .fields import (
    Field,
    compatibility_audit,
    essential_sandwich_check,
    field_from_element,
    induced_affine,
    polar_decompose_intertwiner,
    reconstruct_element,
)
from .functionals import Functional, classify, functional_norm, jordan_decompose, pair, qstate_distance, random_functional
from .gns import GnsTriple, gns, validate_gns
from .reps import (
    Representation,
    conjugate,
    embed_preimage,
    local_lift,
    membership_rep_xi,
    random_representation,
    rep_distance,
    rotation_unitary,
    theta,
)

__all__ = [
    "AlgebraDescriptor", "AlgebraElement", "canonical_basis", "is_positive", "norm", "random_element", "unitize",
    "Functional", "classify", "functional_norm", "jordan_decompose", "pair", "qstate_distance", "random_functional",
    "GnsTriple", "gns", "validate_gns",
    "Representation", "conjugate", "embed_preimage", "local_lift", "membership_rep_xi", "random_representation",
    "rep_distance", "rotation_unitary", "theta",
    "Field", "compatibility_audit", "essential_sandwich_check", "field_from_element", "induced_affine",
    "polar_decompose_intertwiner", "reconstruct_element",
]
