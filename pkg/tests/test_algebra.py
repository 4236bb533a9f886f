"""Exact arithmetic checked against sympy (used here only as an oracle)."""

import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from netforge.algebra import (
    Ideal,
    MultiPoly,
    NotIrreducibleError,
    NumberField,
    SystemTooLarge,
    UniPoly,
    cyclotomic3,
    det3,
    divide,
    groebner,
    ideal_is_trivial,
    poly_gcd,
    reduces_to_zero,
    s_polynomial,
    squarefree_part,
    uni_gcd,
    uni_xgcd,
)
from netforge.algebra.resultant import bareiss_det, resultant

GENS = ("x", "y", "z")
X, Y, Z = sp.symbols("x y z")

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=6)
small_ints = st.integers(min_value=-5, max_value=5)


def to_sympy(p: MultiPoly):
    syms = sp.symbols(p.gens) if p.gens else ()
    if len(p.gens) == 1:
        syms = (syms,)
    expr = sp.Integer(0)
    for m, c in p.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, m):
            term *= s ** e
        expr += term
    return sp.expand(expr)


def uni_to_sympy(p: UniPoly, x=X):
    return sum(sp.Rational(c.numerator, c.denominator) * x ** i for i, c in enumerate(p.coeffs))


@st.composite
def multipolys(draw, gens=GENS, max_terms=4, max_deg=3):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    terms = {}
    for _ in range(n):
        m = tuple(draw(st.integers(min_value=0, max_value=max_deg)) for _ in gens)
        terms[m] = draw(fractions)
    return MultiPoly(gens, terms)


@st.composite
def unipolys(draw, max_deg=5):
    coeffs = draw(st.lists(small_ints, min_size=1, max_size=max_deg + 1))
    return UniPoly(coeffs)


# -- rationals and polynomial ring -------------------------------------------


def test_rational_roundtrip_1000():
    rng = random.Random(7)
    for _ in range(1000):
        a = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
        b = Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**4))
        assert (a + b) - b == a
        assert (a * b) / b == a


@given(multipolys(), multipolys(), multipolys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f - f == MultiPoly.zero(GENS)


@given(multipolys(), multipolys())
def test_product_matches_sympy(f, g):
    assert sp.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0


def test_difference_of_squares():
    x, y = MultiPoly.var("x", ("x", "y")), MultiPoly.var("y", ("x", "y"))
    assert (x + y) * (x - y) == x * x - y * y


def test_evaluate_simple():
    t = MultiPoly.var("t", ("t",))
    assert (t * t + 3).evaluate({"t": 1}) == 4


def test_evaluate_missing_variable():
    t, r = MultiPoly.var("t", ("t", "r")), MultiPoly.var("r", ("t", "r"))
    with pytest.raises(KeyError):
        (t * r).evaluate({"t": 2})


@given(multipolys(), multipolys(gens=("y", "z")), fractions, fractions, fractions)
def test_substitution_is_homomorphism(f, g, a, b, c):
    """Substituting x -> g then evaluating equals evaluating f at x = g(y, z)."""
    point = {"y": b, "z": c}
    gv = g.evaluate(point) if g.terms else 0
    composite = f.substitute("x", g)
    assert composite.evaluate(point) == f.evaluate({"x": gv, **point})


@given(multipolys(), multipolys(), multipolys(gens=("y", "z")))
def test_substitution_respects_operations(f, g, h):
    assert (f * g).substitute("x", h) == f.substitute("x", h) * g.substitute("x", h)
    assert (f + g).substitute("x", h) == f.substitute("x", h) + g.substitute("x", h)


def test_laurent_substitution_clears_to_single_variable():
    # r -> (1 - t^-2)/4 = (t^2 - 1)/(4 t^2): the residual is a polynomial in t alone
    gens = ("r", "t")
    r, t = MultiPoly.var("r", gens), MultiPoly.var("t", gens)
    cond = 4 * r * t * t - t * t + 1
    other = r * r * t + r - 2
    num, den = t * t - 1, 4 * t * t
    for f in (cond, other):
        res, d = f.substitute_fraction("r", num, den)
        assert res.used_gens() in {("t",), ()}
    res, _ = cond.substitute_fraction("r", num, den)
    assert res.is_zero()


@given(multipolys())
def test_text_roundtrip(f):
    assert MultiPoly.parse(str(f), GENS) == f


def test_parse_example():
    p = MultiPoly.parse("3/2*t^2*r - 1", ("t", "r"))
    assert p.evaluate({"t": 2, "r": 1}) == 5


# -- det3 ----------------------------------------------------------------------


def test_det3_identity_and_b_block():
    assert det3([(1, 0, 0), (0, 1, 0), (0, 0, 1)]) == 1
    assert det3([(1, 0, 0), (0, 1, 0), (1, 1, 1)]) == 1


def test_det3_equal_rows_vanish():
    a, b, c, d, e, f = (MultiPoly.var(n, "abcdef") for n in "abcdef")
    assert det3([(a, b, c), (a, b, c), (d, e, f)]).is_zero()


@given(st.lists(small_ints, min_size=9, max_size=9))
def test_det3_matches_sympy(vals):
    m = [vals[0:3], vals[3:6], vals[6:9]]
    assert det3(m) == sp.Matrix(m).det()


# -- univariate gcd --------------------------------------------------------------


def test_gcd_examples():
    t = UniPoly.x()
    assert uni_gcd(t * t + 4 * t - 1, t * t + 3) == UniPoly([1])
    assert uni_gcd(t ** 5 - 1, t ** 3 - 1) == t - 1
    p = UniPoly([2, 0, 4])
    assert uni_gcd(p, UniPoly()) == p.monic()


def test_gcd_of_zeros_rejected():
    with pytest.raises(ValueError):
        uni_gcd(UniPoly(), UniPoly())


@given(unipolys(), unipolys())
def test_gcd_matches_sympy_and_bezout(p, q):
    if p.is_zero() and q.is_zero():
        return
    g = uni_gcd(p, q)
    want = sp.Poly(sp.gcd(uni_to_sympy(p), uni_to_sympy(q)), X)
    assert uni_to_sympy(g) - want.monic().as_expr() == 0
    assert (p % g).is_zero() and (q % g).is_zero()
    g2, s, t = uni_xgcd(p, q)
    assert s * p + t * q == g2 == g


@given(unipolys())
def test_squarefree_part_matches_sympy(p):
    if p.degree < 1:
        return
    sf = squarefree_part(p)
    want = sp.Poly(sp.quo(uni_to_sympy(p), sp.gcd(uni_to_sympy(p), sp.diff(uni_to_sympy(p), X))), X)
    assert uni_to_sympy(sf) - want.monic().as_expr() == 0


@given(unipolys(max_deg=4))
def test_rational_roots_match_sympy(p):
    if p.degree < 1:
        return
    want = {r for r in sp.roots(sp.Poly(uni_to_sympy(p), X), filter="Q")}
    got = {sp.Rational(r.numerator, r.denominator) for r in p.rational_roots()}
    assert got == want


# -- multivariate gcd --------------------------------------------------------------


@given(multipolys(max_terms=3, max_deg=2), multipolys(max_terms=3, max_deg=2), multipolys(max_terms=3, max_deg=2))
def test_poly_gcd_matches_sympy(a, b, c):
    f, g = a * c, b * c
    if f.is_zero() or g.is_zero():
        return
    mine = to_sympy(poly_gcd(f, g))
    want = sp.gcd(to_sympy(f), to_sympy(g))
    assert sp.simplify(sp.cancel(mine / want)).is_constant()


# -- Groebner bases --------------------------------------------------------------


def _ideal(*texts, gens=("x", "y")):
    return Ideal([MultiPoly.parse(t, gens) for t in texts], gens)


def test_groebner_examples():
    assert groebner(_ideal("t^2 + 4*t - 1", "t^2 + 3", gens=("t",))) == [MultiPoly.constant(1, ("t",))]
    assert groebner(_ideal("x - 1", gens=("x",))) == [MultiPoly.parse("x - 1", ("x",))]
    assert groebner(_ideal("x*y - 1", "x")) == [MultiPoly.constant(1, ("x", "y"))]


def test_ideal_triviality_examples():
    assert ideal_is_trivial(_ideal("t^2 + 4*t - 1", "t^2 + 3", gens=("t",)))
    assert not ideal_is_trivial(_ideal("x^2 + x + 1", gens=("x",)))
    assert not ideal_is_trivial(Ideal([MultiPoly.zero(("x",))], ("x",)))


def test_groebner_guard():
    names = [f"v{i}" for i in range(9)]
    polys = [MultiPoly.var(n, names) for n in names]
    with pytest.raises(SystemTooLarge, match="use propagation first"):
        groebner(Ideal(polys, names))


@st.composite
def small_ideals(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    return Ideal([draw(multipolys(gens=("x", "y"), max_terms=3, max_deg=2)) for _ in range(n)], ("x", "y"))


def _sympy_groebner(ideal):
    polys = [to_sympy(p) for p in ideal.generators if p]
    if not polys:
        return [sp.Integer(0)]
    return list(sp.groebner(polys, sp.Symbol("x"), sp.Symbol("y"), order="lex").exprs)


@given(small_ideals())
def test_groebner_matches_sympy(ideal):
    basis = groebner(ideal)
    mine = [to_sympy(b) for b in basis]
    want = _sympy_groebner(ideal)
    if want == [0] or want == []:
        assert all(b.is_zero() for b in basis)
        return
    norm = lambda ps: sorted(sp.srepr(sp.Poly(p, X, Y).monic().as_expr()) for p in ps)
    assert norm(mine) == norm(want)


@given(small_ideals())
def test_s_polynomials_reduce_to_zero(ideal):
    basis = [b for b in groebner(ideal) if b]
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            assert reduces_to_zero(s_polynomial(basis[i], basis[j]), basis)
    for g in ideal.generators:
        if g:
            assert reduces_to_zero(g, basis)


@given(unipolys(), unipolys())
def test_triviality_agrees_with_gcd(p, q):
    if p.degree < 1 or q.degree < 1:
        return
    ideal = Ideal([p.to_multipoly("x"), q.to_multipoly("x")], ("x",))
    assert ideal_is_trivial(ideal) == (uni_gcd(p, q).degree == 0)


def test_division_identity():
    gens = ("x", "y")
    f = MultiPoly.parse("x^2*y + x*y^2 + y^2", gens)
    g1, g2 = MultiPoly.parse("x*y - 1", gens), MultiPoly.parse("y^2 - 1", gens)
    (q1, q2), r = divide(f, [g1, g2])
    assert q1 * g1 + q2 * g2 + r == f


def test_ideal_json_roundtrip():
    ideal = _ideal("3/2*x^2*y - 1", "y - x")
    assert Ideal.from_json(ideal.to_json()) == ideal


# -- number fields --------------------------------------------------------------


def test_cube_roots_of_unity():
    K = cyclotomic3()
    w = K.gen()
    assert w * (w * w) == K.one()
    assert K.one() + w + w * w == K.zero()
    assert (1 - w).inverse() * (1 - w) == K.one()
    assert w ** 3 == 1 and w != 1


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        cyclotomic3().zero().inverse()


def test_reducible_modulus_rejected():
    with pytest.raises(NotIrreducibleError):
        NumberField(UniPoly([-1, 0, 1]))
    with pytest.raises(NotIrreducibleError):
        NumberField(UniPoly([1, 0, 0, 0, 1]))


@given(st.lists(fractions, min_size=2, max_size=2), st.lists(fractions, min_size=2, max_size=2),
       st.lists(fractions, min_size=2, max_size=2))
def test_field_axioms_sqrt5(a, b, c):
    K = NumberField(UniPoly([-1, 4, 1]), "s")  # s^2 + 4s - 1, roots -2 +- sqrt 5
    x, y, z = K(UniPoly(a)), K(UniPoly(b)), K(UniPoly(c))
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    if x:
        assert x * x.inverse() == K.one()


# -- resultants and gcd regressions -------------------------------------------------


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_sympy(rows):
    assert bareiss_det(rows) == sp.Matrix(rows).det()


def test_resultant_of_linear_is_evaluation():
    # Res_y(y - c(x), g) = g(c(x)) for monic linear f
    f = MultiPoly.parse("y - x^2", ["y", "x"])
    g = MultiPoly.parse("y^2 + x*y - 3", ["y", "x"])
    assert resultant(f, g, "y", "x") == UniPoly([-3, 0, 0, 1, 1])


@given(st.integers(0, 10**6))
def test_resultant_matches_sympy_up_to_sign(seed):
    rng = random.Random(seed)
    x, y = sp.symbols("x y")

    def rand_poly():
        e = sum(rng.randint(-3, 3) * y**i * x**j for i in range(rng.randint(1, 4)) for j in range(rng.randint(1, 3)))
        return sp.expand(e + y ** rng.randint(1, 3))

    f, g = rand_poly(), rand_poly()
    F = MultiPoly.parse(str(f).replace("**", "^"), ["y", "x"])
    G = MultiPoly.parse(str(g).replace("**", "^"), ["y", "x"])
    got = resultant(F, G, "y", "x")
    got_expr = sp.sympify(got.to_string("x").replace("^", "**")) if got else 0
    want = sp.expand(sp.resultant(f, g, y))
    assert sp.expand(want - got_expr) == 0 or sp.expand(want + got_expr) == 0


def test_resultant_vanishes_at_common_roots():
    # f and g share the point (x, y) = (2, 3)
    f = MultiPoly.parse("y^2 - x - 7", ["y", "x"])
    g = MultiPoly.parse("y*x - 6", ["y", "x"])
    assert resultant(f, g, "y", "x")(2) == 0


def test_resultant_rejects_trivariate():
    f = MultiPoly.parse("x + y + z", ["x", "y", "z"])
    with pytest.raises(ValueError):
        resultant(f, f, "y", "x")


def test_poly_gcd_trivariate_products():
    """Common factors of products of random trivariate polynomials, checked against sympy."""
    rng = random.Random(5)
    x, y, z = sp.symbols("x y z")

    def rand_poly():
        return sum(rng.randint(-2, 2) * x**i * y**j * z**k for i in range(3) for j in range(3) for k in range(2) if rng.random() < 0.3)

    checked = 0
    while checked < 15:
        h = rand_poly()
        f, g = sp.expand(rand_poly() * h), sp.expand(rand_poly() * h)
        if f == 0 or g == 0:
            continue
        F = MultiPoly.parse(str(f).replace("**", "^"), ["x", "y", "z"])
        G = MultiPoly.parse(str(g).replace("**", "^"), ["x", "y", "z"])
        got = sp.Poly(sp.sympify(str(poly_gcd(F, G)).replace("^", "**")), x, y, z)
        want = sp.Poly(sp.gcd(f, g), x, y, z)
        assert sp.Poly(want.as_expr() * got.LC(), x, y, z) == sp.Poly(got.as_expr() * want.LC(), x, y, z)
        checked += 1
