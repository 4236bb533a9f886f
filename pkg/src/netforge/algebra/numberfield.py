"""Arithmetic in simple algebraic extensions Q[x]/(m(x))."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .univariate import UniPoly, uni_xgcd


class NotIrreducibleError(ValueError):
    pass


@dataclass(frozen=True)
class NumberField:
    """The field Q[x]/(modulus); ``symbol`` names the generator when printing."""

    modulus: UniPoly
    symbol: str = "w"

    def __post_init__(self):
        m = self.modulus.monic()
        object.__setattr__(self, "modulus", m)
        if m.degree < 1:
            raise NotIrreducibleError(f"modulus {m} has no roots")
        if m.degree > 3:
            raise NotIrreducibleError("irreducibility is only checked for moduli of degree <= 3")
        if not m.is_irreducible():
            raise NotIrreducibleError(f"modulus {m.to_string(self.symbol)} is reducible over Q")

    @property
    def degree(self) -> int:
        return self.modulus.degree

    def gen(self) -> "AlgebraicElement":
        return AlgebraicElement(self, UniPoly([0, 1]))

    def __call__(self, value) -> "AlgebraicElement":
        if isinstance(value, AlgebraicElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, UniPoly):
            return AlgebraicElement(self, value)
        return AlgebraicElement(self, UniPoly([value]))

    def zero(self) -> "AlgebraicElement":
        return self(0)

    def one(self) -> "AlgebraicElement":
        return self(1)

    def parse(self, text: str) -> "AlgebraicElement":
        from .poly import MultiPoly

        p = MultiPoly.parse(text)
        used = p.used_gens()
        if used and used != (self.symbol,):
            raise ValueError(f"{text!r} is not a polynomial in {self.symbol}")
        return self(p.univariate(self.symbol) if used else UniPoly([p.constant_value()]))


def cyclotomic3() -> NumberField:
    """Q(w) with w a primitive cube root of unity."""
    return NumberField(UniPoly([1, 1, 1]), "w")


class AlgebraicElement:
    """Element of a NumberField, stored as its reduced representative."""

    __slots__ = ("field", "value")

    def __init__(self, field: NumberField, value: UniPoly):
        self.field = field
        self.value = value % field.modulus

    def _lift(self, other) -> "AlgebraicElement":
        if isinstance(other, AlgebraicElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraicElement(self.field, UniPoly([other]))
        raise TypeError(f"cannot combine AlgebraicElement with {type(other).__name__}")

    def __add__(self, other):
        return AlgebraicElement(self.field, self.value + self._lift(other).value)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicElement(self.field, -self.value)

    def __sub__(self, other):
        return AlgebraicElement(self.field, self.value - self._lift(other).value)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        return AlgebraicElement(self.field, self.value * self._lift(other).value)

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicElement":
        if not self.value:
            raise ZeroDivisionError("inverse of zero in a number field")
        g, s, _ = uni_xgcd(self.value, self.field.modulus)
        assert g == UniPoly([1])
        return AlgebraicElement(self.field, s)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = AlgebraicElement(self.field, UniPoly([1]))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.value

    def __bool__(self) -> bool:
        return bool(self.value)

    def __eq__(self, other) -> bool:
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash((self.field.modulus, self.value))

    def __str__(self) -> str:
        return self.value.to_string(self.field.symbol)

    def __repr__(self) -> str:
        return f"AlgebraicElement({self}, mod {self.field.modulus.to_string(self.field.symbol)})"
