"""Secure linear network codes for computing the sum of source messages over GF(q)."""

from .bounds import closed_form, source_bound, target_bound
from .code import (LinearCode, check_computability, check_source_security,
                   check_target_security, evaluate)
from .construct import (construct_base, construct_source_generalized, construct_source_legacy,
                        construct_target, required_field_size)
from .gf import GF, field
from .network import Network, c_min, c_min_S, primary_min_cut, validate, wiretap_collection
from .oracle import enumerate_transform_sets, is_independent, joint_distribution, verify_equivalence

__version__ = "0.1.0"

__all__ = [
    "GF", "field", "Network", "LinearCode", "validate", "c_min", "c_min_S", "primary_min_cut",
    "wiretap_collection", "target_bound", "source_bound", "closed_form", "check_computability",
    "check_target_security", "check_source_security", "evaluate", "construct_base",
    "construct_target", "construct_source_generalized", "construct_source_legacy",
    "required_field_size", "joint_distribution", "is_independent", "verify_equivalence",
    "enumerate_transform_sets",
]
