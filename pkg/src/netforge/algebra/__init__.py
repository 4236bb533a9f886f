"""Exact arithmetic: rationals, sparse polynomials, number fields, Groebner bases."""

from fractions import Fraction

from .groebner import Ideal, SystemTooLarge, groebner, ideal_is_trivial, reduces_to_zero, s_polynomial
from .numberfield import AlgebraicElement, NotIrreducibleError, NumberField, cyclotomic3
from .poly import MultiPoly, cross, det3, divide, dot, exact_quotient, poly_gcd, poly_vars
from .resultant import resultant
from .univariate import UniPoly, squarefree_part, uni_gcd, uni_xgcd

Rational = Fraction

__all__ = [
    "AlgebraicElement",
    "Fraction",
    "Ideal",
    "MultiPoly",
    "NotIrreducibleError",
    "NumberField",
    "Rational",
    "SystemTooLarge",
    "UniPoly",
    "cross",
    "cyclotomic3",
    "det3",
    "divide",
    "dot",
    "exact_quotient",
    "poly_gcd",
    "groebner",
    "ideal_is_trivial",
    "poly_vars",
    "reduces_to_zero",
    "resultant",
    "s_polynomial",
    "squarefree_part",
    "uni_gcd",
    "uni_xgcd",
]
