"""Exact projective differential geometry on a coordinate chart.

Normal projective Cartan connections, the projective Weyl tensor, the
W-invariants built from it, and the natural projectively equivariant
symbol maps together with exact verifiers for their equivariance.
"""
from .algebra import Poly, RatFunc, parse
from .cartan import GradedElement, bracket, normal_weyl, solve_normality
from .connection import Connection, OneForm, projective_shift, pullback_affine, pullback_tensor
from .formal import verify_lemma, verify_theorem
from .invariants import Derangement, build_w, check_recursion, coefficient, map4, map5
from .report import Report
from .tensors import TensorField

__all__ = [
    "Connection", "Derangement", "GradedElement", "OneForm", "Poly", "RatFunc", "Report",
    "TensorField", "bracket", "build_w", "check_recursion", "coefficient", "map4", "map5",
    "normal_weyl", "parse", "projective_shift", "pullback_affine", "pullback_tensor",
    "solve_normality", "verify_lemma", "verify_theorem",
]
