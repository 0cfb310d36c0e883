"""Exact tools for quasi-convex null sequences in locally compact abelian groups."""
from .circle import CirclePoint, canonicalize, in_T_plus, verify_first_digit_theorem
from .classify import parse as parse_descriptor
from .classify import verdict
from .finite import FiniteGroup, hull, is_quasi_convex, parse_elements, parse_group, polar
from .sequences import InsufficientPrefix, SequenceSpec

__version__ = "0.1.0"

__all__ = [
    "CirclePoint",
    "canonicalize",
    "in_T_plus",
    "verify_first_digit_theorem",
    "parse_descriptor",
    "verdict",
    "FiniteGroup",
    "hull",
    "is_quasi_convex",
    "parse_elements",
    "parse_group",
    "polar",
    "InsufficientPrefix",
    "SequenceSpec",
]
