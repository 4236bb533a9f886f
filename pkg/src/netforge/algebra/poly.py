"""Sparse multivariate polynomials over the rationals.

A polynomial carries an ordered tuple of generator names.  Exponent vectors
are tuples aligned with that order, and the lexicographic monomial order
compares them left to right, so the first generator is the most significant.
Operands with different generator tuples are promoted to their union (left
operand's names first).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Monomial = tuple[int, ...]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as a rational coefficient")


def lex_key(m: Monomial) -> Monomial:
    return m


def grevlex_key(m: Monomial) -> tuple:
    return (sum(m), tuple(-e for e in reversed(m)))


ORDERS: dict[str, Callable[[Monomial], tuple]] = {"lex": lex_key, "grevlex": grevlex_key}


class MultiPoly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to nonzero Fractions."""

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, gens: Sequence[str], terms: Mapping[Monomial, object] | None = None):
        self.gens = tuple(gens)
        n = len(self.gens)
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if len(m) != n:
                    raise ValueError(f"exponent {m} does not match generators {self.gens}")
                c = _as_fraction(c)
                if c:
                    clean[tuple(m)] = clean.get(tuple(m), Fraction(0)) + c
            clean = {m: c for m, c in clean.items() if c}
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, gens: tuple[str, ...], terms: dict[Monomial, Fraction]) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj.gens = gens
        obj.terms = terms
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, gens: Sequence[str] = ()) -> "MultiPoly":
        return cls._raw(tuple(gens), {})

    @classmethod
    def constant(cls, c, gens: Sequence[str] = ()) -> "MultiPoly":
        c = _as_fraction(c)
        gens = tuple(gens)
        return cls._raw(gens, {(0,) * len(gens): c} if c else {})

    @classmethod
    def var(cls, name: str, gens: Sequence[str] | None = None) -> "MultiPoly":
        gens = tuple(gens) if gens is not None else (name,)
        idx = gens.index(name)
        m = tuple(1 if i == idx else 0 for i in range(len(gens)))
        return cls._raw(gens, {m: Fraction(1)})

    # -- generator bookkeeping ---------------------------------------------
    def with_gens(self, gens: Sequence[str]) -> "MultiPoly":
        gens = tuple(gens)
        if gens == self.gens:
            return self
        pos = {g: i for i, g in enumerate(gens)}
        used = self.used_gens()
        missing = [g for g in used if g not in pos]
        if missing:
            raise ValueError(f"generators {missing} are not in {gens}")
        idx = [pos.get(g, -1) for g in self.gens]
        terms = {}
        for m, c in self.terms.items():
            new = [0] * len(gens)
            for i, e in enumerate(m):
                if e:
                    new[idx[i]] = e
            terms[tuple(new)] = c
        return MultiPoly._raw(gens, terms)

    def used_gens(self) -> tuple[str, ...]:
        used = [False] * len(self.gens)
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(g for g, u in zip(self.gens, used) if u)

    def _coerce(self, other) -> tuple["MultiPoly", "MultiPoly"]:
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(other, self.gens)
        if other.gens == self.gens:
            return self, other
        gens = self.gens + tuple(g for g in other.gens if g not in self.gens)
        return self.with_gens(gens), other.with_gens(gens)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.constant(other, self.gens)
            except TypeError:
                return NotImplemented
        a, b = self._coerce(other)
        return a.terms == b.terms

    def __hash__(self) -> int:
        if self._hash is None:
            keep = [i for i, g in enumerate(self.gens) if g in self.used_gens()]
            items = frozenset(
                (tuple(sorted((self.gens[i], m[i]) for i in keep if m[i])), c)
                for m, c in self.terms.items()
            )
            self._hash = hash(items)
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "MultiPoly":
        a, b = self._coerce(other)
        terms = dict(a.terms)
        for m, c in b.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return MultiPoly._raw(a.gens, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.gens, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        a, b = self._coerce(other)
        return a + (-b)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = _as_fraction(other)
            if not c:
                return MultiPoly.zero(self.gens)
            return MultiPoly._raw(self.gens, {m: v * c for m, v in self.terms.items()})
        a, b = self._coerce(other)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                s = terms.get(m, 0) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return MultiPoly._raw(a.gens, terms)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "MultiPoly":
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(1, self.gens)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- structure ----------------------------------------------------------
    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(m) for m in self.terms)
        if var not in self.gens:
            return 0
        i = self.gens.index(var)
        return max(m[i] for m in self.terms)

    def coefficients_in(self, var: str) -> dict[int, "MultiPoly"]:
        """Split into ``{d: c_d}`` with ``self = sum c_d * var**d``; the c_d keep all generators."""
        if var not in self.gens:
            return {0: self} if self.terms else {}
        i = self.gens.index(var)
        parts: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            d = m[i]
            parts.setdefault(d, {})[m[:i] + (0,) + m[i + 1:]] = c
        return {d: MultiPoly._raw(self.gens, t) for d, t in parts.items()}

    def leading_term(self, order: str = "lex") -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        key = ORDERS[order]
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def sorted_terms(self, order: str = "lex") -> list[tuple[Monomial, Fraction]]:
        key = ORDERS[order]
        return sorted(self.terms.items(), key=lambda mc: key(mc[0]), reverse=True)

    def monic(self, order: str = "lex") -> "MultiPoly":
        if not self.terms:
            return self
        return self / self.leading_term(order)[1]

    def primitive(self, order: str = "lex") -> "MultiPoly":
        """Scale to integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd, lcm

        den = 1
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, (c * den).numerator)
        scale = Fraction(den, num)
        if self.leading_term(order)[1] < 0:
            scale = -scale
        return self * scale

    def monomial_content(self) -> Monomial:
        """Largest monomial dividing every term."""
        if not self.terms:
            return (0,) * len(self.gens)
        it = iter(self.terms)
        low = list(next(it))
        for m in it:
            low = [min(a, b) for a, b in zip(low, m)]
        return tuple(low)

    def divide_monomial(self, mono: Monomial) -> "MultiPoly":
        terms = {}
        for m, c in self.terms.items():
            q = tuple(a - b for a, b in zip(m, mono))
            if min(q, default=0) < 0:
                raise ValueError("monomial does not divide polynomial")
            terms[q] = c
        return MultiPoly._raw(self.gens, terms)

    # -- substitution & evaluation -----------------------------------------
    def substitute(self, var: str, value: "MultiPoly | int | Fraction") -> "MultiPoly":
        """Replace ``var`` by a polynomial that does not itself involve ``var``."""
        if var not in self.gens:
            return self
        if not isinstance(value, MultiPoly):
            value = MultiPoly.constant(value)
        if var in value.used_gens():
            raise ValueError(f"substitution value for {var} must not contain {var}")
        result, _ = self.substitute_fraction(var, value, MultiPoly.constant(1))
        return result

    def substitute_fraction(self, var: str, num: "MultiPoly", den: "MultiPoly") -> tuple["MultiPoly", int]:
        """Return ``(den**d * self(var -> num/den), d)`` with ``d`` the degree in ``var``."""
        d = self.degree(var)
        if d <= 0:
            return self, 0
        gens = tuple(g for g in self.gens if g != var)
        gens = gens + tuple(g for g in num.gens + den.gens if g not in gens and g != var)
        num = num.with_gens(gens) if num.terms else MultiPoly.zero(gens)
        den = den.with_gens(gens)
        i = self.gens.index(var)
        rest = self.gens[:i] + self.gens[i + 1:]
        num_pows = [MultiPoly.constant(1, gens)]
        den_pows = [MultiPoly.constant(1, gens)]
        for _ in range(d):
            num_pows.append(num_pows[-1] * num)
            den_pows.append(den_pows[-1] * den)
        result = MultiPoly.zero(gens)
        for e, coeff in self.coefficients_in(var).items():
            dropped = MultiPoly._raw(rest, {m[:i] + m[i + 1:]: c for m, c in coeff.terms.items()})
            result = result + dropped.with_gens(gens) * num_pows[e] * den_pows[d - e]
        return result, d

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate at values that support ``+`` and ``*`` with Fractions (e.g. field elements)."""
        used = self.used_gens()
        missing = [g for g in used if g not in assignment]
        if missing:
            raise KeyError(f"no value assigned to {missing}")
        idx = [(i, assignment[g]) for i, g in enumerate(self.gens) if g in used]
        total = 0
        for m, c in self.terms.items():
            term = c
            for i, v in idx:
                if m[i]:
                    term = term * (v ** m[i])
            total = total + term
        return total

    def partial_evaluate(self, assignment: Mapping[str, object]) -> "MultiPoly":
        out = self
        for g, v in assignment.items():
            if g in out.gens:
                out = out.substitute(g, v)
        return out

    def univariate(self, var: str | None = None):
        from .univariate import UniPoly

        used = self.used_gens()
        if var is None:
            if len(used) > 1:
                raise ValueError(f"{self} is not univariate")
            var = used[0] if used else (self.gens[0] if self.gens else "x")
        elif any(g != var for g in used):
            raise ValueError(f"{self} is not univariate in {var}")
        if var not in self.gens:
            return UniPoly([self.constant_value()] if self.terms else [])
        i = self.gens.index(var)
        coeffs = [Fraction(0)] * (self.degree(var) + 1 if self.terms else 0)
        for m, c in self.terms.items():
            coeffs[m[i]] = c
        return UniPoly(coeffs)

    # -- text ---------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            factors = []
            for g, e in zip(self.gens, m):
                if e == 1:
                    factors.append(g)
                elif e > 1:
                    factors.append(f"{g}^{e}")
            mag = abs(c)
            if factors:
                body = "*".join(factors) if mag == 1 else f"{mag}*" + "*".join(factors)
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            out.append((sign, body))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r}, gens={self.gens})"

    @classmethod
    def parse(cls, text: str, gens: Sequence[str] | None = None) -> "MultiPoly":
        """Parse the human-readable form, e.g. ``"3/2*t^2*r - 1"``."""
        src = text.replace(" ", "")
        if not src:
            raise ValueError("empty polynomial text")
        tokens = re.findall(r"[+-]?[^+-]+", src)
        if "".join(tokens) != src:
            raise ValueError(f"cannot parse polynomial {text!r}")
        parsed = []
        names: list[str] = list(gens) if gens else []
        for tok in tokens:
            sign = -1 if tok.startswith("-") else 1
            tok = tok.lstrip("+-")
            coeff = Fraction(sign)
            powers: dict[str, int] = {}
            for factor in tok.split("*"):
                if not factor:
                    raise ValueError(f"cannot parse polynomial {text!r}")
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    coeff *= Fraction(factor)
                    continue
                mt = re.fullmatch(r"([A-Za-z_]\w*)(?:\^(\d+))?", factor)
                if not mt:
                    raise ValueError(f"bad factor {factor!r} in {text!r}")
                name, exp = mt.group(1), int(mt.group(2) or 1)
                powers[name] = powers.get(name, 0) + exp
                if name not in names:
                    if gens:
                        raise ValueError(f"unknown generator {name!r}")
                    names.append(name)
            parsed.append((coeff, powers))
        terms: dict[Monomial, Fraction] = {}
        for coeff, powers in parsed:
            m = tuple(powers.get(g, 0) for g in names)
            terms[m] = terms.get(m, 0) + coeff
        return cls(names, terms)


def poly_vars(names: Iterable[str]) -> list[MultiPoly]:
    names = tuple(names)
    return [MultiPoly.var(n, names) for n in names]


def det3(m: Sequence[Sequence]):
    """Cofactor expansion of a 3x3 determinant; entries may be polynomials or field elements."""
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def cross(u: Sequence, v: Sequence) -> tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u: Sequence, v: Sequence):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def divide(f: MultiPoly, divisors: Sequence[MultiPoly], order: str = "lex") -> tuple[list[MultiPoly], MultiPoly]:
    """Multivariate division: ``f = sum q_i g_i + r`` with no term of ``r`` divisible by any LT(g_i)."""
    gens = f.gens
    for g in divisors:
        gens = gens + tuple(x for x in g.gens if x not in gens)
    f = f.with_gens(gens)
    divisors = [g.with_gens(gens) for g in divisors]
    key = ORDERS[order]
    leads = [g.leading_term(order) for g in divisors]
    quotients = [dict() for _ in divisors]
    rem: dict[Monomial, Fraction] = {}
    p = dict(f.terms)
    while p:
        m = max(p, key=key)
        c = p[m]
        for idx, (lm, lc) in enumerate(leads):
            if all(a >= b for a, b in zip(m, lm)):
                q = tuple(a - b for a, b in zip(m, lm))
                qc = c / lc
                quotients[idx][q] = quotients[idx].get(q, 0) + qc
                for gm, gc in divisors[idx].terms.items():
                    mm = tuple(a + b for a, b in zip(gm, q))
                    s = p.get(mm, 0) - qc * gc
                    if s:
                        p[mm] = s
                    else:
                        p.pop(mm, None)
                break
        else:
            rem[m] = c
            del p[m]
    return [MultiPoly(gens, q) for q in quotients], MultiPoly._raw(gens, rem)


def exact_quotient(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    (q,), r = divide(f, [g])
    if r:
        raise ValueError(f"{g} does not divide {f}")
    return q


def _main_var(polys: Sequence[MultiPoly]) -> str | None:
    used = set()
    for p in polys:
        used.update(p.used_gens())
    for g in polys[0].gens:
        if g in used:
            return g
    return None


def _pseudo_remainder(f: MultiPoly, g: MultiPoly, x: str) -> MultiPoly:
    dg = g.degree(x)
    lc_g = g.coefficients_in(x)[dg]
    xv = MultiPoly.var(x, f.gens)
    r = f
    while r and r.degree(x) >= dg:
        dr = r.degree(x)
        lc_r = r.coefficients_in(x)[dr]
        r = lc_g * r - lc_r * xv ** (dr - dg) * g
    return r


def _content_in(f: MultiPoly, x: str) -> MultiPoly:
    coeffs = list(f.coefficients_in(x).values())
    c = coeffs[0]
    for other in coeffs[1:]:
        c = poly_gcd(c, other)
        if c.is_constant():
            break
    return c


_PRIME = (1 << 61) - 1


def _mod_p(c: Fraction) -> int | None:
    if c.denominator % _PRIME == 0:
        return None
    return c.numerator * pow(c.denominator, -1, _PRIME) % _PRIME


def _image(f: MultiPoly, var: int, point: Sequence[int]) -> list[int] | None:
    """Coefficients (low degree first) of ``f`` mod p with every variable but ``var`` fixed."""
    out = [0] * (max(m[var] for m in f.terms) + 1)
    for mono, c in f.terms.items():
        v = _mod_p(c)
        if v is None:
            return None
        for i, e in enumerate(mono):
            if i != var and e:
                v = v * pow(point[i], e, _PRIME) % _PRIME
        out[mono[var]] = (out[mono[var]] + v) % _PRIME
    return out


def _gcd_degree_mod_p(a: list[int], b: list[int]) -> int:
    def trim(u):
        while u and not u[-1]:
            u.pop()
        return u

    a, b = trim(a[:]), trim(b[:])
    while b:
        inv = pow(b[-1], -1, _PRIME)
        while len(a) >= len(b):
            q = a[-1] * inv % _PRIME
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] = (a[shift + i] - q * c) % _PRIME
            trim(a)
        a, b = b, a
    return len(a) - 1


def _provably_coprime(f: MultiPoly, g: MultiPoly) -> bool:
    """True only if gcd(f, g) is constant.

    A common factor ``h`` involving ``x`` has a leading coefficient in ``x``
    dividing that of ``f``; wherever the latter survives specialization mod p,
    the image of ``h`` keeps its degree and divides both images.
    """
    shared = set(f.used_gens()) & set(g.used_gens())
    for var in shared:
        idx = f.gens.index(var)
        done = False
        for seed in (3, 7):
            point = [pow(seed, i + 5, _PRIME) for i in range(len(f.gens))]
            fa, ga = _image(f, idx, point), _image(g, idx, point)
            if fa is None or ga is None:
                return False
            if not fa[-1]:
                continue
            if _gcd_degree_mod_p(fa, ga) > 0:
                return False
            done = True
            break
        if not done:
            return False
    return True


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Greatest common divisor over Q, normalized by ``primitive`` (constant results are 1)."""
    f, g = f._coerce(g)
    gens = f.gens
    if not f:
        return g.primitive() if g else MultiPoly.zero(gens)
    if not g:
        return f.primitive()
    if f.is_constant() or g.is_constant() or _provably_coprime(f, g):
        return MultiPoly.constant(1, gens)
    x = _main_var([f, g])
    if x not in f.used_gens():
        return poly_gcd(f, _content_in(g, x))
    if x not in g.used_gens():
        return poly_gcd(_content_in(f, x), g)
    cf, cg = _content_in(f, x), _content_in(g, x)
    c = poly_gcd(cf, cg)
    a, b = exact_quotient(f, cf), exact_quotient(g, cg)
    if a.degree(x) < b.degree(x):
        a, b = b, a
    while b and b.degree(x) > 0:
        r = _pseudo_remainder(a, b, x)
        a = b
        b = exact_quotient(r, _content_in(r, x)).primitive() if r else r
    if b:  # nonzero remainder free of x: the primitive parts are coprime
        return c.primitive()
    a = exact_quotient(a, _content_in(a, x))
    return (c * a).primitive()
