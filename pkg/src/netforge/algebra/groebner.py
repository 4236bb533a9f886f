"""Buchberger's algorithm for tiny systems, plus an ideal-triviality test."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from fractions import Fraction
from math import gcd, lcm

from .poly import ORDERS, MultiPoly, divide

MAX_VARIABLES = 8
MAX_GENERATORS = 40


class SystemTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Ideal:
    """Generators over a shared generator tuple, stored primitive and deduplicated."""

    generators: tuple[MultiPoly, ...]
    gens: tuple[str, ...] = field(default=())

    def __init__(self, generators: Sequence[MultiPoly], gens: Sequence[str] | None = None):
        polys = list(generators)
        if gens is None:
            names: list[str] = []
            for p in polys:
                names.extend(g for g in p.gens if g not in names)
            gens = names
        gens = tuple(gens)
        seen = []
        for p in polys:
            q = p.with_gens(gens).primitive()
            if q and q not in seen:
                seen.append(q)
        if not seen:
            seen = [MultiPoly.zero(gens)]
        object.__setattr__(self, "generators", tuple(seen))
        object.__setattr__(self, "gens", gens)

    def to_json(self) -> dict:
        return {"variables": list(self.gens), "generators": [str(p) for p in self.generators]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Ideal":
        if isinstance(data, str):
            data = json.loads(data)
        gens = data["variables"]
        return cls([MultiPoly.parse(s, gens) for s in data["generators"]], gens)


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _integer_terms(f: MultiPoly) -> dict:
    den = 1
    for c in f.terms.values():
        den = lcm(den, c.denominator)
    return {m: int(c * den) for m, c in f.terms.items()}


def _normal_form(f: MultiPoly, divisors: Sequence[MultiPoly], order: str) -> MultiPoly:
    """Remainder of ``f`` modulo ``divisors`` up to a nonzero scalar, using integer arithmetic only."""
    key = ORDERS[order]
    divs = []
    for g in divisors:
        t = _integer_terms(g)
        lm = max(t, key=key)
        divs.append((lm, t[lm], t))
    p = _integer_terms(f)
    rem: dict = {}
    steps = 0
    while p:
        m = max(p, key=key)
        c = p[m]
        for lm, lc, t in divs:
            if all(a >= b for a, b in zip(m, lm)):
                q = tuple(a - b for a, b in zip(m, lm))
                g = gcd(c, lc)
                mul_p, mul_g = lc // g, c // g
                if mul_p != 1:
                    p = {mm: v * mul_p for mm, v in p.items()}
                    rem = {mm: v * mul_p for mm, v in rem.items()}
                for gm, gc in t.items():
                    mm = tuple(a + b for a, b in zip(gm, q))
                    v = p.get(mm, 0) - mul_g * gc
                    if v:
                        p[mm] = v
                    else:
                        p.pop(mm, None)
                steps += 1
                if steps % 8 == 0:
                    cont = 0
                    for v in p.values():
                        cont = gcd(cont, v)
                    for v in rem.values():
                        cont = gcd(cont, v)
                    if cont > 1:
                        p = {mm: v // cont for mm, v in p.items()}
                        rem = {mm: v // cont for mm, v in rem.items()}
                break
        else:
            rem[m] = c
            del p[m]
    cont = 0
    for v in rem.values():
        cont = gcd(cont, v)
    return MultiPoly(f.gens, {m: Fraction(v, cont) for m, v in rem.items()})


def s_polynomial(f: MultiPoly, g: MultiPoly, order: str = "lex") -> MultiPoly:
    (mf, cf), (mg, cg) = f.leading_term(order), g.leading_term(order)
    lcm = _lcm(mf, mg)
    tf = MultiPoly(f.gens, {tuple(a - b for a, b in zip(lcm, mf)): 1 / cf})
    tg = MultiPoly(g.gens, {tuple(a - b for a, b in zip(lcm, mg)): 1 / cg})
    return tf * f - tg * g


def _check_guard(ideal: Ideal) -> None:
    used = set()
    for p in ideal.generators:
        used.update(p.used_gens())
    if len(used) > MAX_VARIABLES or len(ideal.generators) > MAX_GENERATORS:
        raise SystemTooLarge(
            f"system too large; use propagation first ({len(used)} variables, "
            f"{len(ideal.generators)} generators; limits {MAX_VARIABLES}/{MAX_GENERATORS})"
        )


def groebner(ideal: Ideal, order: str = "lex", max_pairs: int = 200_000) -> list[MultiPoly]:
    """Reduced Groebner basis (monic, sorted by descending leading monomial).

    Pairs are handled with the Gebauer-Moeller update (coprime criterion plus
    chain criterion) and selected by the normal strategy.
    """
    _check_guard(ideal)
    key = ORDERS[order]
    gens = ideal.gens
    polys: list[MultiPoly] = []
    lead: list[tuple] = []
    alive: list[bool] = []
    pairs: list[tuple[int, int]] = []

    def coprime(a, b) -> bool:
        return all(x == 0 or y == 0 for x, y in zip(a, b))

    def update(h: MultiPoly) -> None:
        hi = len(polys)
        hm = h.leading_term(order)[0]
        cands = [i for i in range(hi) if alive[i]]
        lcms = {i: _lcm(lead[i], hm) for i in cands}
        kept = []
        for pos, i in enumerate(cands):
            if coprime(lead[i], hm):
                kept.append(i)
                continue
            others = cands[pos + 1:] + kept
            if not any(_divides(lcms[j], lcms[i]) for j in others if j != i):
                kept.append(i)
        new_pairs = [(i, hi) for i in kept if not coprime(lead[i], hm)]
        survivors = []
        for i, j in pairs:
            lij = _lcm(lead[i], lead[j])
            if _divides(hm, lij) and _lcm(lead[i], hm) != lij and _lcm(lead[j], hm) != lij:
                continue
            survivors.append((i, j))
        pairs[:] = survivors + new_pairs
        for i in cands:
            if _divides(hm, lead[i]):
                alive[i] = False
        polys.append(h)
        lead.append(hm)
        alive.append(True)

    def reduce(f: MultiPoly) -> MultiPoly:
        active = [p for p, a in zip(polys, alive) if a]
        if not active:
            return f
        return _normal_form(f, active, order)

    for p in ideal.generators:
        if not p:
            continue
        r = reduce(p.with_gens(gens))
        if r:
            if r.is_constant():
                return [MultiPoly.constant(1, gens)]
            update(r.monic(order))

    processed = 0
    while pairs:
        best = min(range(len(pairs)), key=lambda n: key(_lcm(lead[pairs[n][0]], lead[pairs[n][1]])))
        i, j = pairs.pop(best)
        processed += 1
        if processed > max_pairs:
            raise SystemTooLarge("Groebner basis computation exceeded its pair budget")
        r = reduce(s_polynomial(polys[i], polys[j], order))
        if r:
            if r.is_constant():
                return [MultiPoly.constant(1, gens)]
            update(r.monic(order))

    return reduce_basis([p for p, a in zip(polys, alive) if a], order)


def reduce_basis(G: Sequence[MultiPoly], order: str = "lex") -> list[MultiPoly]:
    key = ORDERS[order]
    G = [g for g in G if g]
    minimal = []
    for i, g in enumerate(G):
        gm = g.leading_term(order)[0]
        dominated = False
        for j, h in enumerate(G):
            if i == j:
                continue
            hm = h.leading_term(order)[0]
            if _divides(hm, gm) and (hm != gm or j < i):
                dominated = True
                break
        if not dominated:
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        _, r = divide(g, others, order) if others else ([], g)
        reduced.append(r.monic(order))
    reduced.sort(key=lambda p: key(p.leading_term(order)[0]), reverse=True)
    return reduced


def ideal_is_trivial(ideal: Ideal, order: str = "lex") -> bool:
    """True iff 1 lies in the ideal, i.e. the system has no solution over any extension of Q."""
    basis = groebner(ideal, order)
    return len(basis) == 1 and basis[0].is_constant() and not basis[0].is_zero()


def reduces_to_zero(f: MultiPoly, basis: Sequence[MultiPoly], order: str = "lex") -> bool:
    if not basis:
        return f.is_zero()
    _, r = divide(f, basis, order)
    return r.is_zero()
