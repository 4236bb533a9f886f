"""Resultants of bivariate polynomials by evaluation and interpolation.

``Res_y(f, g)`` is the determinant of the Sylvester matrix of ``f`` and ``g``
as polynomials in ``y``.  Its entries are polynomials in the other variable
``x``, so the determinant is a polynomial in ``x`` of known degree bound.  It
is evaluated at enough integer points (exact Bareiss elimination) and
interpolated.  Any common zero ``(x0, y0)`` of ``f`` and ``g`` has
``Res_y(f, g)(x0) = 0``, and the resultant lies in the ideal ``(f, g)``.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .poly import MultiPoly
from .univariate import UniPoly


def bareiss_det(matrix: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    m = [row[:] for row in matrix]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1] if n else 1


def sylvester(a: list[int], b: list[int]) -> list[list[int]]:
    """Sylvester matrix of two coefficient lists given highest degree first."""
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + a + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + b + [0] * (size - n - 1 - i))
    return rows


def _integer_rows(f: MultiPoly, y: str, x: str) -> tuple[list[dict[int, int]], int]:
    """Coefficients of ``f`` in ``y`` (highest first) as integer dicts ``{deg_x: c}``."""
    den = 1
    for c in f.terms.values():
        den = lcm(den, c.denominator)
    iy, ix = f.gens.index(y), f.gens.index(x)
    deg = f.degree(y)
    coeffs: list[dict[int, int]] = [{} for _ in range(deg + 1)]
    for mono, c in f.terms.items():
        coeffs[deg - mono[iy]][mono[ix]] = int(c * den)
    return coeffs, deg


def _at(coeffs: list[dict[int, int]], x0: int) -> list[int]:
    return [sum(c * x0 ** e for e, c in d.items()) for d in coeffs]


def _interpolate(xs: list[int], ys: list[int]) -> UniPoly:
    """Newton interpolation through the points ``(xs[i], ys[i])``."""
    n = len(xs)
    coef = [Fraction(v) for v in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    p = UniPoly([coef[-1]])
    for i in range(n - 2, -1, -1):
        p = p * UniPoly([-xs[i], 1]) + coef[i]
    return p


def resultant(f: MultiPoly, g: MultiPoly, y: str, x: str) -> UniPoly:
    """``Res_y(f, g)`` as a polynomial in ``x``; ``f`` and ``g`` may only involve ``x`` and ``y``."""
    for p in (f, g):
        extra = set(p.used_gens()) - {x, y}
        if extra:
            raise ValueError(f"resultant needs bivariate input, found {sorted(extra)}")
    a, m = _integer_rows(f, y, x)
    b, n = _integer_rows(g, y, x)
    if m == 0 and n == 0:
        raise ValueError(f"neither polynomial involves {y}")
    bound = n * f.degree(x) + m * g.degree(x)
    xs, ys = [], []
    x0 = 0
    while len(xs) <= bound:
        xs.append(x0)
        ys.append(bareiss_det(sylvester(_at(a, x0), _at(b, x0))))
        x0 = -x0 if x0 > 0 else 1 - x0
    return _interpolate(xs, ys)
