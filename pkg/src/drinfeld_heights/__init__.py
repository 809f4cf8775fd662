"""Exact canonical local and global heights of Drinfeld modules over F_q(t)."""

from .errors import *  # noqa: F401,F403
from .fields import GF, FiniteField, FieldElement, Poly, RationalFunction
from .local import LocalElement, PlaceModel, embed_rational, newton_lift, product_formula_sum
from .twisted import DrinfeldModule, TwistedPoly, apply, conjugate, monicize, phi_a, skew_mul
from .heights import (ExceptionSets, HeightResult, Thresholds, bound_margin,
                      compute_exception_sets, compute_thresholds, find_escaping_multiplier,
                      global_height, local_height)

__version__ = "0.1.0"
