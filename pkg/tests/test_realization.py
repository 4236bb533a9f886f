import json
import random

import pytest
import sympy as sp

from netforge.algebra import NotIrreducibleError
from netforge.combinat import OlsPair, cyclic
from netforge.equivalence import (
    MoveRejected,
    apply_pair_move,
    classify_ols,
    random_pair_move,
    tau_squares,
)
from netforge.net import LineLabel, ols_to_incidence
from netforge.realization import (
    LineMatrix,
    build_minor_system,
    decide_realizability,
    evaluate_minors,
    hessian_certificate,
    propagate_lines,
    verify_certificate,
)


def _replace_row(cert, row, new):
    rows = list(cert.rows)
    rows[row] = tuple(new)
    return LineMatrix(cert.k, tuple(rows), cert.field)


def _leaves(trace):
    labels = {e["branch"] for e in trace if e["branch"] != "-"}
    return {b for b in labels if not any(o.startswith(b + ".") for o in labels)}


def _sym(text):
    return sp.sympify(text.replace("^", "**"))


# -- certificates ----------------------------------------------------------------


def test_hessian_certificate_verifies(hessian_pair):
    cert = hessian_certificate()
    assert cert.field.modulus.to_string("x") == "x^2 + x + 1"
    assert verify_certificate(cert, ols_to_incidence(hessian_pair))
    assert len({tuple(map(str, r)) for r in cert.rows}) == 12


def test_hessian_minors_vanish(hessian_pair):
    net = ols_to_incidence(hessian_pair)
    values = evaluate_minors(net, hessian_certificate())
    assert values and all(v.is_zero() for v in values)


def test_perturbed_certificate_fails(hessian_pair):
    cert = hessian_certificate()
    row = LineLabel(3, 2).row(3)
    bumped = _replace_row(cert, row, (cert.rows[row][0] + 1, *cert.rows[row][1:]))
    check = verify_certificate(bumped, ols_to_incidence(hessian_pair))
    assert not check and check.problem == "nonvanishing minor"
    # the witness point lies on the perturbed line (3,2)
    assert check.witness["point"][2] == 2


def test_duplicated_row_fails(hessian_pair):
    cert = hessian_certificate()
    check = verify_certificate(_replace_row(cert, 5, cert.rows[4]), ols_to_incidence(hessian_pair))
    assert not check and check.problem == "coincident lines"
    assert check.witness["lines"] == ["(2,2)", "(2,3)"]


def test_zero_row_and_order_mismatch(hessian_pair, tau_pair):
    cert = hessian_certificate()
    zero = _replace_row(cert, 7, (cert.field.zero(),) * 3)
    assert verify_certificate(zero, ols_to_incidence(hessian_pair)).problem == "zero row"
    assert verify_certificate(cert, ols_to_incidence(tau_pair)).problem == "order mismatch"


def test_certificate_needs_irreducible_modulus(hessian_pair):
    cert = hessian_certificate()
    data = cert.to_json()
    assert LineMatrix.from_json(data).rows == cert.rows
    data["modulus"] = "w^2 - 1"
    with pytest.raises(NotIrreducibleError):
        LineMatrix.from_json(data)


def test_certificate_for_other_labelings():
    pair = OlsPair(cyclic(3, 2), cyclic(3, 1))
    assert verify_certificate(hessian_certificate(pair), ols_to_incidence(pair))


# -- minor system -------------------------------------------------------------------


def test_minor_system_sizes(hessian_pair, tau_pair):
    ideal, rows, names = build_minor_system(ols_to_incidence(hessian_pair))
    assert len(rows) == 12 and len(names) == 24
    assert 0 < len(ideal.generators) <= 36
    ideal4, rows4, _ = build_minor_system(ols_to_incidence(tau_pair))
    assert len(rows4) == 16 and len(ideal4.generators) <= 4 * 16


# -- verdicts ------------------------------------------------------------------------


def test_verdict_k3(hessian_pair):
    v = decide_realizability(hessian_pair)
    assert v.outcome == "Realizable"
    assert verify_certificate(v.certificate, ols_to_incidence(hessian_pair))
    x = sp.Symbol("x")
    assert sp.Poly(_sym(v.modulus.to_string("x")), x).is_irreducible


def test_verdict_k4(tau_pair):
    v = decide_realizability(tau_pair)
    assert v.outcome == "Empty" and v.certificate is None
    gcds = [e for e in v.trace if e["step"] == "gcd"]
    assert {"polys": ["s^3 - 5*s^2 + 3*s + 1", "s^2 + 4*s - 1"], "gcd": "1"}.items() <= gcds[0].items()


@pytest.mark.slow
def test_verdict_k5(pair5a, pair5b):
    va, vb = decide_realizability(pair5a), decide_realizability(pair5b)
    assert va.outcome == vb.outcome == "Empty"
    polys = {e["poly"] for e in va.trace if e["step"] == "univariate"}
    assert "r^5 + 3*r^4 - 3*r^2 - r" in polys
    quintic = [e["polys"][0] for e in vb.trace if e["step"] == "gcd" and e["polys"][0].startswith("r^5")]
    assert "r^5 + 3*r^4 + r^3 - 4*r^2 - 2*r + 1" in quintic


class _Order6Pair:
    """Stand-in for an order-6 pair: none exists, and the verdict only reads the order."""

    order = 6


def test_verdict_k6():
    v = decide_realizability(_Order6Pair())
    assert v.outcome == "Empty" and v.trace[0]["step"] == "combinatorial"


def test_verdict_json(hessian_pair):
    v = decide_realizability(hessian_pair)
    data = json.loads(json.dumps(v.to_json()))
    assert data["outcome"] == "Realizable" and data["k"] == 3
    assert data["certificate"]["modulus"] == f"{data['certificate']['symbol']}^2 + {data['certificate']['symbol']} + 1"
    assert len(data["certificate"]["rows"]) == 12
    assert len(data["class_id"]) == 16


# -- soundness of Empty -------------------------------------------------------------


@pytest.mark.parametrize("which", ["tau", "5a"])
def test_every_branch_dies(which, tau_pair, pair5a):
    pair = tau_pair if which == "tau" else pair5a
    result = propagate_lines(ols_to_incidence(pair))
    assert all(o.outcome == "dead" for o in result.outcomes)
    dead = {e["branch"] for e in result.trace if e["step"] == "dead"}
    assert _leaves(result.trace) <= dead


def test_trace_algebra_rechecked_with_sympy(tau_pair, pair5a):
    for pair in (tau_pair, pair5a):
        trace = decide_realizability(pair).trace
        for e in trace:
            if e["step"] == "gcd":
                g = sp.gcd(_sym(e["polys"][0]), _sym(e["polys"][1]))
                assert sp.simplify(g - _sym(e["gcd"])) == 0 or sp.degree(g) == sp.degree(_sym(e["gcd"]))
            if e["step"] == "degenerate" and e["detail"].startswith("roots of "):
                factor = _sym(e["detail"].split(" rejected")[0].removeprefix("roots of "))
                owner = [x for x in trace if x["step"] == "univariate" and e["branch"].startswith(x["branch"])]
                assert any(sp.rem(_sym(x["poly"]), factor) == 0 for x in owner)


def test_univariate_5a_roots_all_rejected(pair5a):
    """r^5 + 3r^4 - 3r^2 - r = r (r - 1)(r + 1)(r^2 + 3r + 1); no factor survives."""
    r = sp.Symbol("r")
    f = r**5 + 3 * r**4 - 3 * r**2 - r
    assert sp.factor(f) == r * (r - 1) * (r + 1) * (r**2 + 3 * r + 1)
    v = decide_realizability(pair5a)
    assert v.outcome == "Empty"


def test_quintic_5b_factorization():
    r = sp.Symbol("r")
    q = r**5 + 3 * r**4 + r**3 - 4 * r**2 - 2 * r + 1
    assert sp.expand((r - 1) * (r + 1) * (r**3 + 3 * r**2 + 2 * r - 1) - q) == 0
    assert sp.discriminant(r**3 + 3 * r**2 + 2 * r - 1, r) == -23


# -- invariance under moves ------------------------------------------------------------


def _images(rep, k, n, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        p = rep
        for _ in range(20):
            try:
                p = apply_pair_move(p, random_pair_move(k, rng))
            except MoveRejected:
                pass
        out.append(p)
    return out


@pytest.mark.parametrize("k,expected", [(3, "Realizable"), (4, "Empty")])
def test_verdict_invariant_under_moves(k, expected):
    for cls in classify_ols(k).classes:
        for p in _images(cls.representative, k, 10, seed=k):
            v = decide_realizability(p)
            assert v.outcome == expected
            if expected == "Realizable":
                assert verify_certificate(v.certificate, ols_to_incidence(p))


@pytest.mark.slow
def test_verdict_invariant_under_moves_k5():
    for cls in classify_ols(5).classes:
        for p in _images(cls.representative, 5, 10, seed=5):
            assert decide_realizability(p).outcome == "Empty"


def test_unknown_when_branch_budget_is_tiny(tau_pair):
    v = decide_realizability(tau_pair, max_branches=1)
    assert v.outcome in {"Unknown", "Empty"}
    if v.outcome == "Unknown":
        assert v.reason


def test_axiom_violation_is_rejected():
    from netforge.net import NetIncidence
    from netforge.realization import propagate_lines as run

    with pytest.raises(ValueError):
        run(NetIncidence(3, ((1, 1, 1, 1),)))
