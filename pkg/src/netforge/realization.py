"""Realizability of (4,k)-net incidences by lines in the complex projective plane.

Lines are rows of a 4k x 3 matrix (class c, line a sits in row (c-1)k + a-1).
Four lines are normalized to a projective frame, then the incidence is
propagated in lexicographic point order: a point of chi is the cross product
of two known lines through it, and a line is the cross product of two known
points on it.  When nothing can be propagated, a free line is introduced with
fresh parameters.  Every further incidence gives a polynomial condition.

Conditions are handled as they appear:

* linear in some parameter: solve for it, branching on whether the
  coefficient vanishes;
* univariate: keep it as a modulus ``h(t)``, i.e. work with all roots of
  ``h`` at once, and split ``h`` by gcds when a later test separates its roots;
* anything else is deferred to a Groebner basis at the end.

A branch dies when a condition becomes a nonzero constant, when two lines or
two points coincide, or when a line meets a point of chi it should miss.
"""

from __future__ import annotations

import itertools
import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    AlgebraicElement,
    Ideal,
    MultiPoly,
    NotIrreducibleError,
    NumberField,
    SystemTooLarge,
    UniPoly,
    cross,
    cyclotomic3,
    det3,
    divide,
    dot,
    exact_quotient,
    groebner,
    poly_gcd,
    resultant,
    squarefree_part,
    uni_gcd,
    uni_xgcd,
)
from .combinat import OlsPair, cyclic
from .net import LineLabel, NetIncidence, ols_to_incidence, validate_net_axioms

log = logging.getLogger(__name__)

PARAM_POOL = ("t", "r", "q", "s", "u", "v", "a", "b", "c", "d", "e", "f", "g", "h", "m", "n")
# parameters introduced later are more significant in lex order
GENS = tuple(reversed(PARAM_POOL))
# pair budget for the cheap elimination attempted before each propagation step
EARLY_PAIRS = 60

B_ROWS = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))
FRAME_LINES = (LineLabel(1, 1), LineLabel(1, 2), LineLabel(1, 3), LineLabel(2, 1))
# class-1 lines 1..3 concurrent: x = 0, y = 0, x + y = 0, and line (2,1) moved to z = 0
CONCURRENT_ROWS = ((1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1))

Vec = tuple


def _const(c) -> MultiPoly:
    return MultiPoly.constant(c, GENS)


def _var(name: str) -> MultiPoly:
    return MultiPoly.var(name, GENS)


def _fmt_vec(v: Vec) -> str:
    return "(" + ", ".join(str(c) for c in v) + ")"


def _label(k: int, row: int) -> str:
    return f"({row // k + 1},{row % k + 1})"


# ---------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class ProjectiveLine:
    coefficients: tuple

    def __post_init__(self):
        if len(self.coefficients) != 3:
            raise ValueError("a line has three coefficients")
        if all(not c for c in self.coefficients):
            raise ValueError("the zero vector is not a line")


@dataclass(frozen=True)
class LineMatrix:
    """4k rows in four blocks of k; entries are AlgebraicElements of ``field``."""

    k: int
    rows: tuple[tuple[AlgebraicElement, ...], ...]
    field: NumberField

    def __post_init__(self):
        if len(self.rows) != 4 * self.k:
            raise ValueError(f"expected {4 * self.k} rows, got {len(self.rows)}")

    def line(self, label: LineLabel) -> tuple:
        return self.rows[label.row(self.k)]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "modulus": self.field.modulus.to_string(self.field.symbol),
            "symbol": self.field.symbol,
            "rows": [[str(c) for c in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, data) -> "LineMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        sym = data.get("symbol", "w")
        mod = MultiPoly.parse(data["modulus"], [sym]).univariate(sym)
        nf = NumberField(mod, sym)
        rows = tuple(tuple(nf.parse(c) for c in row) for row in data["rows"])
        return cls(int(data["k"]), rows, nf)


@dataclass
class RealizationVerdict:
    """``outcome`` is "Realizable", "Empty" or "Unknown"."""

    outcome: str
    k: int
    certificate: LineMatrix | None = None
    trace: list[dict] = field(default_factory=list)
    reason: str = ""
    class_id: str | None = None

    @property
    def modulus(self) -> UniPoly | None:
        return self.certificate.field.modulus if self.certificate else None

    def to_json(self) -> dict:
        cert = None
        if self.certificate is not None:
            c = self.certificate.to_json()
            cert = {"modulus": c["modulus"], "symbol": c["symbol"], "rows": c["rows"]}
        out = {"k": self.k, "class_id": self.class_id, "outcome": self.outcome, "certificate": cert, "trace": self.trace}
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class CertificateCheck:
    ok: bool
    problem: str = ""
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# certificate checking (independent of the propagation engine)


def _cross_elem(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot_elem(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def verify_certificate(matrix: LineMatrix, net: NetIncidence) -> CertificateCheck:
    """All minors vanish on chi, lines are distinct, and no line meets a chi point it should miss."""
    k = net.k
    if matrix.k != k:
        return CertificateCheck(False, "order mismatch", {"matrix": matrix.k, "incidence": k})
    if not matrix.field.modulus.is_irreducible():
        raise NotIrreducibleError("certificate modulus is not irreducible")
    rows = matrix.rows
    for idx, row in enumerate(rows):
        if all(c.is_zero() for c in row):
            return CertificateCheck(False, "zero row", {"line": _label(k, idx)})
    for i, j in itertools.combinations(range(4 * k), 2):
        if all(c.is_zero() for c in _cross_elem(rows[i], rows[j])):
            return CertificateCheck(False, "coincident lines", {"lines": [_label(k, i), _label(k, j)]})
    for p in net.points:
        idx = [lab.row(k) for lab in p.labels()]
        block = [rows[i] for i in idx]
        for drop in range(4):
            sub = [block[r] for r in range(4) if r != drop]
            minor = det3(sub)
            if not minor.is_zero():
                return CertificateCheck(
                    False, "nonvanishing minor",
                    {"point": list(p.lines), "omitted_class": drop + 1, "value": str(minor)},
                )
        point = _cross_elem(block[0], block[1])
        for other in range(4 * k):
            if other in idx:
                continue
            if _dot_elem(rows[other], point).is_zero():
                return CertificateCheck(
                    False, "extra incidence", {"point": list(p.lines), "line": _label(k, other)}
                )
    return CertificateCheck(True)


def _hessian_lines():
    nf = cyclotomic3()
    w = nf.gen()
    powers = [nf.one(), w, w * w]
    axes = [tuple(nf(c) for c in row) for row in B_ROWS[:3]]
    others = [(nf.one(), powers[i], powers[j]) for i in range(3) for j in range(3)]
    return nf, axes, others


def hessian_certificate(pair: OlsPair | None = None) -> LineMatrix:
    """The Hessian arrangement x, y, z, (1, w^i, w^j) with its lines assigned to the
    labels of ``pair``'s incidence (default (L_(123), L_(132))).

    The assignment is found by search: rows 1-4 are pinned to B and the other
    eight lines are placed by backtracking on the concurrences of chi.
    """
    pair = pair or OlsPair(cyclic(3, 1), cyclic(3, 2))
    net = ols_to_incidence(pair)
    k = 3
    nf, axes, others = _hessian_lines()
    one = (nf.one(), nf.one(), nf.one())
    placed: dict[int, tuple] = {FRAME_LINES[i].row(k): axes[i] for i in range(3)}
    placed[FRAME_LINES[3].row(k)] = one
    pool = [v for v in others if v != one]
    free_rows = [r for r in range(4 * k) if r not in placed]
    point_rows = [[lab.row(k) for lab in p.labels()] for p in net.points]

    def consistent() -> bool:
        for rows in point_rows:
            known = [placed[r] for r in rows if r in placed]
            if len(known) >= 3:
                for trio in itertools.combinations(known, 3):
                    if not det3(list(trio)).is_zero():
                        return False
        return True

    def rec(pos: int, used: set) -> bool:
        if pos == len(free_rows):
            return True
        for n, v in enumerate(pool):
            if n in used:
                continue
            placed[free_rows[pos]] = v
            if consistent() and rec(pos + 1, used | {n}):
                return True
            del placed[free_rows[pos]]
        return False

    if not rec(0, set()):
        raise AssertionError("no labelling of the Hessian lines matches this incidence")
    rows = tuple(placed[r] for r in range(4 * k))
    return LineMatrix(k, rows, nf)


# ---------------------------------------------------------------------------
# propagation engine


class _Dead(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class _Unknown(Exception):
    pass


@dataclass
class _State:
    label: str
    lines: list
    line_src: list
    points: list
    point_src: list
    used: int = 0
    modulus: tuple | None = None
    nonzero: list = field(default_factory=list)
    pending: list = field(default_factory=list)
    deferred: list = field(default_factory=list)
    eliminated: frozenset = frozenset()
    tried: frozenset = frozenset()

    def copy(self, label: str) -> "_State":
        return _State(
            label, list(self.lines), list(self.line_src), list(self.points), list(self.point_src),
            self.used, self.modulus, list(self.nonzero), list(self.pending), list(self.deferred),
            self.eliminated, self.tried,
        )


@dataclass
class BranchOutcome:
    label: str
    outcome: str
    detail: str
    certificate: LineMatrix | None = None


class _Engine:
    def __init__(self, net: NetIncidence, max_branches: int = 2000, seed: int = 0, stop_at: int | None = None):
        self.net = net
        self.k = net.k
        self.points = list(net.sorted().points)
        self.point_rows = [[lab.row(self.k) for lab in p.labels()] for p in self.points]
        self.points_on = [[] for _ in range(4 * self.k)]
        for idx, rows in enumerate(self.point_rows):
            for r in rows:
                self.points_on[r].append(idx)
        self.trace: list[dict] = []
        self.outcomes: list[BranchOutcome] = []
        self.max_branches = max_branches
        self.branches = 0
        self.rng = random.Random(seed)
        self.stop_at = stop_at

    # -- bookkeeping ---------------------------------------------------------
    def log(self, st: _State, step: str, detail: str, **extra) -> None:
        entry = {"branch": st.label, "step": step, "detail": detail}
        entry.update(extra)
        self.trace.append(entry)
        log.debug("%s %s %s", st.label, step, detail)

    def _point_name(self, idx: int) -> str:
        return "(" + ",".join(map(str, self.points[idx].lines)) + ")"

    # -- polynomial helpers --------------------------------------------------
    def reduce(self, st: _State, f: MultiPoly) -> MultiPoly:
        if st.modulus is None or not f:
            return f
        var, h = st.modulus
        if var not in f.used_gens() or f.degree(var) < h.degree:
            return f
        return divide(f, [h.to_multipoly(var).with_gens(GENS)])[1]

    def _uni_in_mod(self, st: _State, f: MultiPoly) -> UniPoly | None:
        if st.modulus is None:
            return None
        used = f.used_gens()
        var = st.modulus[0]
        if used and used != (var,):
            return None
        return f.univariate(var) if used else UniPoly([f.constant_value()])

    def normalize(self, st: _State, vec: Vec, reason: str) -> Vec:
        vec = tuple(self.reduce(st, c) for c in vec)
        nz = [c for c in vec if c]
        if not nz:
            raise _Dead(reason)
        low = None
        for c in nz:
            m = c.monomial_content()
            low = m if low is None else tuple(min(a, b) for a, b in zip(low, m))
        if low and any(low):
            for i, e in enumerate(low):
                if e:
                    self.add_nonzero(st, _var(GENS[i]), reason)
            vec = tuple(c.divide_monomial(low) if c else c for c in vec)
            nz = [c for c in vec if c]
        common = nz[0]
        for c in nz[1:]:
            if common.is_constant():
                break
            common = poly_gcd(common, c)
        if not common.is_constant():
            self.add_nonzero(st, common, reason)
            vec = tuple(exact_quotient(c, common) if c else c for c in vec)
        # rational content
        from math import gcd, lcm

        den, num = 1, 0
        for c in vec:
            for q in c.terms.values():
                den = lcm(den, q.denominator)
        for c in vec:
            for q in c.terms.values():
                num = gcd(num, (q * den).numerator)
        if num and (den != 1 or num != 1):
            s = Fraction(den, num)
            vec = tuple(c * s for c in vec)
        return vec

    def add_nonzero(self, st: _State, f: MultiPoly, reason: str) -> None:
        f = f.primitive()
        if all(f != g for g, _ in st.nonzero):
            st.nonzero.append((f, reason))

    # -- modulus handling ----------------------------------------------------
    def set_modulus(self, st: _State, var: str, h: UniPoly) -> None:
        h = squarefree_part(h)
        if h.degree < 1:
            raise _Dead(f"no admissible value of {var} remains")
        if h.degree == 1:
            root = -h.coeffs[0] / h.coeffs[1]
            self.log(st, "solve", f"{var} = {root}")
            st.modulus = None
            self.substitute(st, var, _const(root), _const(1))
            return
        st.modulus = (var, h)
        self.refresh(st)

    def exclude_roots(self, st: _State, g: UniPoly, reason: str) -> None:
        var, h = st.modulus
        rest = (h // g).monic()
        self.log(st, "degenerate", f"roots of {g.to_string(var)} rejected: {reason}", modulus=rest.to_string(var))
        if rest.degree < 1:
            raise _Dead(f"every root of {h.to_string(var)} is degenerate: {reason}")
        self.set_modulus(st, var, rest)

    def refresh(self, st: _State, requeue: bool = True) -> None:
        """Re-reduce everything after a substitution or modulus change and drop degenerate roots."""
        mod_before = st.modulus
        for i, vec in enumerate(st.lines):
            if vec is not None:
                st.lines[i] = self.normalize(st, vec, st.line_src[i])
                if self._vector_roots(st, st.lines[i], st.line_src[i]) or st.modulus != mod_before:
                    return
        for i, vec in enumerate(st.points):
            if vec is not None:
                st.points[i] = self.normalize(st, vec, st.point_src[i])
                if self._vector_roots(st, st.points[i], st.point_src[i]) or st.modulus != mod_before:
                    return
        kept = []
        for n, (f, reason) in enumerate(st.nonzero):
            f = self.reduce(st, f)
            if not f:
                raise _Dead(reason)
            if f.is_constant():
                continue
            u = self._uni_in_mod(st, f)
            if u is not None:
                g = uni_gcd(u, st.modulus[1])
                if g.degree >= 1:
                    st.nonzero = kept + st.nonzero[n + 1:]
                    self.exclude_roots(st, g, reason)
                    return
                continue
            kept.append((f, reason))
        st.nonzero = kept
        if requeue and st.deferred:
            st.pending.extend(st.deferred)
            st.deferred = []

    def _vector_roots(self, st: _State, vec: Vec, reason: str) -> bool:
        """If the vector vanishes at some roots of the modulus, drop those roots."""
        if st.modulus is None:
            return False
        polys = []
        for c in vec:
            u = self._uni_in_mod(st, c)
            if u is None:
                return False
            polys.append(u)
        g = st.modulus[1]
        for u in polys:
            g = uni_gcd(g, u) if u else g
        if g.degree >= 1:
            self.exclude_roots(st, g, reason)
            return True
        return False

    def substitute(self, st: _State, var: str, num: MultiPoly, den: MultiPoly) -> None:
        def sub_vec(vec):
            parts = [c.substitute_fraction(var, num, den) for c in vec]
            top = max(d for _, d in parts)
            return tuple((p.with_gens(GENS) * den ** (top - d)).with_gens(GENS) for p, d in parts)

        st.lines = [None if v is None else sub_vec(v) for v in st.lines]
        st.points = [None if v is None else sub_vec(v) for v in st.points]
        st.nonzero = [(f.substitute_fraction(var, num, den)[0].with_gens(GENS), why) for f, why in st.nonzero]
        moved = [(f.substitute_fraction(var, num, den)[0].with_gens(GENS), why) for f, why in st.pending + st.deferred]
        st.pending, st.deferred = moved, []
        if st.modulus is not None and st.modulus[0] == var:
            st.modulus = None
        self.refresh(st)

    # -- conditions ----------------------------------------------------------
    def handle_condition(self, st: _State, f: MultiPoly, why: str) -> list | None:
        f = self.reduce(st, f)
        if not f:
            return None
        if f.is_constant():
            raise _Dead(f"inconsistent condition from {why}")
        f = f.primitive()
        u = self._uni_in_mod(st, f)
        if u is not None:
            var, h = st.modulus
            g = uni_gcd(h, u)
            self.log(st, "gcd", f"gcd({h.to_string(var)}, {u.to_string(var)}) = {g.to_string(var)}",
                     polys=[h.to_string(var), u.to_string(var)], gcd=g.to_string(var))
            if g.degree < 1:
                raise _Dead(f"{h.to_string(var)} and {u.to_string(var)} have no common root")
            if g != h:
                self.set_modulus(st, var, g)
            return None
        modvar = st.modulus[0] if st.modulus else None
        choices = []
        for v in f.used_gens():
            if v == modvar or f.degree(v) != 1:
                continue
            parts = f.coefficients_in(v)
            c, e = parts[1].with_gens(GENS), parts.get(0, MultiPoly.zero(GENS)).with_gens(GENS)
            rank = (0 if c.is_constant() else 1 if self._uni_in_mod(st, c) is not None else 2, len(c.terms), c.degree(), PARAM_POOL.index(v))
            choices.append((rank, v, c, e))
        if choices:
            choices.sort(key=lambda x: x[0])
            _, v, c, e = choices[0]
            if c.is_constant():
                self.log(st, "solve", f"{v} = {self._fmt_frac(-e, c)}", condition=str(f))
                self.substitute(st, v, -e, c)
                return None
            cu = self._uni_in_mod(st, c)
            if cu is not None:
                var, h = st.modulus
                g = uni_gcd(h, cu)
                if g.degree < 1:
                    _, s, _ = uni_xgcd(cu, h)
                    inv = s.to_multipoly(var).with_gens(GENS)
                    value = self.reduce(st, -e * inv)
                    self.log(st, "solve", f"{v} = {value}", condition=str(f))
                    self.substitute(st, v, value, _const(1))
                    return None
                a, b = st.copy(st.label + ".0"), st.copy(st.label + ".1")
                self.log(st, "split", f"{c} vanishes on the roots of {g.to_string(var)}")
                for child, mod in ((a, g), (b, (h // g).monic())):
                    child.pending.insert(0, (f, why))
                    child.modulus = (var, h)
                    self._enter(child, lambda ch=child, m=mod: self.set_modulus(ch, var, m))
                return [x for x in (a, b) if x is not None and not getattr(x, "_dead", False)]
            a, b = st.copy(st.label + ".0"), st.copy(st.label + ".1")
            self.log(st, "split", f"on whether {c} vanishes", condition=str(f))
            reason = f"coefficient {c} of {v} in {f}"
            a.nonzero.append((c, reason + " is zero"))
            self._enter(a, lambda: (self.log(a, "solve", f"{v} = {self._fmt_frac(-e, c)}", condition=str(f)),
                                    self.substitute(a, v, -e, c)))
            b.pending[:0] = [(c, "vanishing coefficient"), (e, "vanishing coefficient")]
            return [x for x in (a, b) if not getattr(x, "_dead", False)]
        used = f.used_gens()
        if len(used) == 1 and st.modulus is None:
            var = used[0]
            h = squarefree_part(f.univariate(var))
            self.log(st, "univariate", f"{h.to_string(var)} = 0", poly=h.to_string(var), var=var)
            self.set_modulus(st, var, h)
            return None
        st.deferred.append((f, why))
        return None

    def _fmt_frac(self, num: MultiPoly, den: MultiPoly) -> str:
        if not num:
            return "0"
        if den.is_constant():
            return str(num / den.constant_value())
        return f"({num})/({den})"

    def _enter(self, st: _State, action) -> None:
        """Run ``action`` on a fresh child, marking it dead if it degenerates."""
        try:
            action()
        except _Dead as exc:
            self.log(st, "dead", exc.reason)
            self.outcomes.append(BranchOutcome(st.label, "dead", exc.reason))
            st._dead = True

    # -- propagation ---------------------------------------------------------
    def step(self, st: _State) -> bool:
        k = self.k
        for idx, rows in enumerate(self.point_rows):
            if st.points[idx] is not None:
                continue
            known = [r for r in rows if st.lines[r] is not None]
            if len(known) < 2:
                continue
            a, b = known[0], known[1]
            src = f"lines {_label(k, a)} and {_label(k, b)} coincide"
            st.point_src[idx] = src
            vec = self.normalize(st, cross(st.lines[a], st.lines[b]), src)
            st.points[idx] = vec
            for r in known[2:]:
                st.pending.append((dot(st.lines[r], vec), f"line {_label(k, r)} through point {self._point_name(idx)}"))
            self._vector_roots(st, vec, src)
            return True
        for r in range(4 * k):
            if st.lines[r] is not None:
                continue
            known = [i for i in self.points_on[r] if st.points[i] is not None]
            if len(known) < 2:
                continue
            a, b = known[0], known[1]
            src = f"points {self._point_name(a)} and {self._point_name(b)} coincide"
            st.line_src[r] = f"line {_label(k, r)} degenerates ({src})"
            vec = self.normalize(st, cross(st.points[a], st.points[b]), src)
            st.lines[r] = vec
            self.log(st, "line", f"{_label(k, r)} = {_fmt_vec(vec)}", line=_label(k, r), value=[str(c) for c in vec])
            for i in known[2:]:
                st.pending.append((dot(vec, st.points[i]), f"line {_label(k, r)} through point {self._point_name(i)}"))
            self._vector_roots(st, vec, src)
            return True
        return False

    def free_line(self, st: _State) -> list[_State]:
        """Parametrize the first unknown line of the lexicographically first point that has one."""
        k = self.k
        r = next(r for rows in self.point_rows for r in rows if st.lines[r] is None)
        if st.used + 2 > len(PARAM_POOL):
            raise _Unknown("ran out of parameter names")
        p1, p2 = PARAM_POOL[st.used], PARAM_POOL[st.used + 1]
        one, zero = _const(1), _const(0)
        patterns = [
            ("a", (one, _var(p1), _var(p2)), 2),
            ("b", (zero, one, _var(p1)), 1),
            ("c", (zero, zero, one), 0),
        ]
        children = []
        for tag, vec, n in patterns:
            child = st.copy(f"{st.label}.{tag}")
            child.used = st.used + n
            child.lines[r] = vec
            child.line_src[r] = f"line {_label(k, r)} degenerates"
            self.log(child, "parameter", f"{_label(k, r)} = {_fmt_vec(vec)}", line=_label(k, r))
            for i in self.points_on[r]:
                if child.points[i] is not None:
                    child.pending.append((dot(vec, child.points[i]), f"line {_label(k, r)} through point {self._point_name(i)}"))
            children.append(child)
        return children

    # -- driver --------------------------------------------------------------
    def explore(self, st: _State) -> None:
        if self.stop_at is not None and any(o.outcome == "realizable" for o in self.outcomes):
            return
        self.branches += 1
        if self.branches > self.max_branches:
            raise _Unknown(f"more than {self.max_branches} branches")
        try:
            while True:
                if st.pending:
                    f, why = st.pending.pop(0)
                    children = self.handle_condition(st, f, why)
                    if children is not None:
                        for ch in children:
                            self.explore(ch)
                        return
                    continue
                if self.eliminate(st, early=True):
                    continue
                if self.step(st):
                    continue
                if self.eliminate(st):
                    continue
                if all(v is not None for v in st.lines):
                    self.finalize(st)
                    return
                for ch in self.free_line(st):
                    self.explore(ch)
                return
        except _Dead as exc:
            self.log(st, "dead", exc.reason)
            self.outcomes.append(BranchOutcome(st.label, "dead", exc.reason))

    def finalize(self, st: _State) -> None:
        k = self.k
        for i, j in itertools.combinations(range(4 * k), 2):
            why = f"lines {_label(k, i)} and {_label(k, j)} coincide"
            vec = tuple(self.reduce(st, c) for c in cross(st.lines[i], st.lines[j]))
            if all(not c for c in vec):
                raise _Dead(why)
            self._vector_roots(st, vec, why)
        for idx, rows in enumerate(self.point_rows):
            for r in range(4 * k):
                if r in rows:
                    continue
                f = self.reduce(st, dot(st.lines[r], st.points[idx]))
                why = f"line {_label(k, r)} passes through point {self._point_name(idx)}"
                if not f:
                    raise _Dead(why)
                if not f.is_constant():
                    st.nonzero.append((f, why))
        self.refresh(st, requeue=False)
        if st.pending:
            # a modulus change re-queued deferred conditions
            self.explore_continue(st)
            return
        if st.deferred:
            self.close_deferred(st)
            return
        free = set()
        for vec in st.lines:
            for c in vec:
                free.update(c.used_gens())
        if st.modulus is not None:
            free.discard(st.modulus[0])
        if free:
            self.sample(st, sorted(free))
            return
        self.certify(st)

    def eliminate(self, st: _State, early: bool = False) -> bool:
        """Replace the deferred conditions by a lex Groebner basis once there are at least two.

        With ``early`` set this is a cheap attempt made before every propagation
        step: the basis computation is budgeted and no primitive element is
        introduced.  The full version runs once propagation has stalled.
        """
        if not st.deferred:
            return False
        current = frozenset(f for f, _ in st.deferred)
        if current <= st.eliminated or (early and current <= st.tried):
            return False
        polys = [f for f, _ in st.deferred]
        if st.modulus is not None:
            var, h = st.modulus
            polys.append(h.to_multipoly(var).with_gens(GENS))
        if len(polys) < 2:
            st.eliminated = current
            return False
        if self.resultant_step(st, [f for f, _ in st.deferred]):
            return True
        try:
            basis = groebner(Ideal(polys, GENS), max_pairs=EARLY_PAIRS if early else 200_000)
        except SystemTooLarge:
            if early:
                st.tried = current
            else:
                st.eliminated = current
            return False
        if len(basis) == 1 and basis[0].is_constant():
            self.log(st, "groebner", "basis [1]", basis=["1"])
            raise _Dead("the incidence conditions have no common solution")
        basis = [b.primitive() for b in basis]
        if not any(self._usable(st, b) for b in basis):
            if early:
                st.tried = current
                return False
            if self.primitive_element(st, polys):
                return True
        text = [str(b) for b in basis]
        self.log(st, "groebner", f"basis {text}", basis=text)
        st.eliminated = st.tried = frozenset(basis)
        st.deferred = []
        basis.sort(key=lambda b: (len(b.used_gens()), b.degree(), str(b)))
        st.pending[:0] = [(b, "groebner basis") for b in basis]
        return True

    def resultant_step(self, st: _State, polys: list[MultiPoly]) -> bool:
        """For conditions in two variables, derive a univariate one from pairwise resultants.

        Lex Groebner bases of such systems suffer coefficient growth; the gcd of a
        few resultants is an element of the same elimination ideal and is cheap.
        """
        used = {v for f in polys for v in f.used_gens()}
        if len(used) != 2:
            return False
        modvar = st.modulus[0] if st.modulus else None
        if modvar is not None and modvar not in used:
            return False
        keep = modvar or max(used, key=GENS.index)
        drop = next(v for v in used if v != keep)
        distinct = {f.primitive() for f in polys if drop in f.used_gens()}
        both = sorted(distinct, key=lambda f: (f.degree(drop), f.degree(), len(f.terms), str(f)))[:5]
        g = None
        for f1, f2 in itertools.combinations(both, 2):
            res = resultant(f1, f2, drop, keep)
            if res:
                g = res if g is None else uni_gcd(g, res)
            if g is not None and g.degree < 1:
                break
        if g is None:
            return False
        if g.degree >= 1:
            g = squarefree_part(g)
        if st.modulus is not None and g.degree >= 1 and uni_gcd(g, st.modulus[1]) == st.modulus[1]:
            return False
        text = g.monic().to_string(keep) if g.degree >= 1 else "1"
        self.log(st, "resultant", f"eliminating {drop}: {text} = 0", poly=text, var=keep)
        if g.degree < 1:
            raise _Dead(f"the resultants in {drop} have no common root")
        # handled like any other condition, so a modulus is split by a logged gcd
        st.pending.insert(0, (g.to_multipoly(keep).with_gens(GENS), f"resultant in {drop}"))
        return True

    def _usable(self, st: _State, f: MultiPoly) -> bool:
        """Would handle_condition make progress with ``f`` (rather than defer it)?"""
        modvar = st.modulus[0] if st.modulus else None
        used = f.used_gens()
        if len(used) <= 1:
            return st.modulus is None or used == (modvar,) or not used
        return any(f.degree(v) == 1 for v in used if v != modvar)

    def primitive_element(self, st: _State, polys: list[MultiPoly]) -> bool:
        """Put a zero-dimensional residual system in shape form v = phi(w), m(w) = 0.

        ``w`` is a fresh parameter equal to an integer combination of the
        variables; the basis is computed with ``w`` least significant.
        """
        names = sorted({g for p in polys for g in p.used_gens()}, key=GENS.index)
        if st.used >= len(PARAM_POOL):
            return False
        w = PARAM_POOL[st.used]
        for shift in range(1, 6):
            gens = tuple(names) + (w,)
            combo = MultiPoly.var(w, gens)
            for i, v in enumerate(names):
                combo = combo - MultiPoly.var(v, gens) * (shift ** i)
            try:
                basis = groebner(Ideal([p.with_gens(gens) for p in polys] + [combo], gens))
            except SystemTooLarge:
                return False
            if len(basis) == 1 and basis[0].is_constant():
                raise _Dead("the incidence conditions have no common solution")
            uni = [b for b in basis if b.used_gens() == (w,)]
            phi = {}
            for b in basis:
                used = b.used_gens()
                lead = b.leading_term()[0]
                for i, v in enumerate(names):
                    if lead[i] == 1 and sum(lead) == 1 and set(used) <= {v, w} and b.degree(v) == 1:
                        phi[v] = b
            if len(uni) != 1 or len(phi) != len(names) or len(basis) != len(names) + 1:
                continue
            m = uni[0].univariate(w)
            detail = ", ".join(f"{v} = {-(phi[v] - MultiPoly.var(v, gens))}" for v in names)
            self.log(st, "primitive element", f"{w} with {m.to_string(w)} = 0; {detail}",
                     poly=m.to_string(w), var=w)
            st.used += 1
            st.modulus = None
            for v in names:
                value = (MultiPoly.var(v, gens) - phi[v]).with_gens(GENS)
                self.substitute(st, v, value, _const(1))
            st.eliminated = frozenset()
            self.set_modulus(st, w, m)
            return True
        return False

    def explore_continue(self, st: _State) -> None:
        self.branches -= 1
        self.explore(st)

    def close_deferred(self, st: _State) -> None:
        polys = [f for f, _ in st.deferred]
        if st.modulus is not None:
            var, h = st.modulus
            polys.append(h.to_multipoly(var).with_gens(GENS))
        try:
            basis = groebner(Ideal(polys, GENS))
        except SystemTooLarge as exc:
            raise _Unknown(str(exc))
        text = [str(b) for b in basis]
        self.log(st, "groebner", f"basis {text}", basis=text)
        if len(basis) == 1 and basis[0].is_constant():
            raise _Dead("residual system has no solution")
        raise _Unknown(f"positive-dimensional or unsolved residual system {text}")

    def sample(self, st: _State, free: list[str]) -> None:
        for attempt in range(40):
            child = st.copy(f"{st.label}.sample{attempt}")
            values = {v: Fraction(self.rng.randint(-9, 9), self.rng.randint(1, 4)) for v in free}
            try:
                for v in free:
                    self.substitute(child, v, _const(values[v]), _const(1))
                self.log(child, "sample", ", ".join(f"{v} = {values[v]}" for v in free))
                self.finalize(child)
                return
            except _Dead:
                continue
        raise _Unknown("no nondegenerate sample point found for the free parameters")

    def certify(self, st: _State) -> None:
        if st.modulus is None:
            nf = NumberField(UniPoly([0, 1]), "w")
            var, h = None, None
        else:
            var, h = st.modulus
            roots = h.rational_roots()
            for root in roots:
                child = st.copy(f"{st.label}.{var}={root}")
                try:
                    self.log(child, "solve", f"{var} = {root}")
                    child.modulus = None
                    self.substitute(child, var, _const(root), _const(1))
                    self.finalize(child)
                    return
                except _Dead as exc:
                    self.log(child, "dead", exc.reason)
            rest = h
            for root in roots:
                rest = rest // UniPoly([-root, 1])
            if rest.degree < 1:
                raise _Dead("no admissible root")
            try:
                nf = NumberField(rest, "w")
            except NotIrreducibleError as exc:
                raise _Unknown(f"cannot certify over {rest.to_string(var)}: {exc}")
        rows = []
        for vec in st.lines:
            row = []
            for c in vec:
                if var is None:
                    row.append(nf(c.constant_value()))
                else:
                    row.append(nf(c.univariate(var)))
            rows.append(tuple(row))
        matrix = LineMatrix(self.k, tuple(rows), nf)
        check = verify_certificate(matrix, self.net)
        if not check:
            raise _Unknown(f"certificate failed verification: {check.problem} {check.witness}")
        modtxt = nf.modulus.to_string(nf.symbol)
        self.log(st, "realizable", f"certificate over Q[w]/({modtxt})", modulus=modtxt)
        self.outcomes.append(BranchOutcome(st.label, "realizable", modtxt, matrix))


def _initial_states(k: int) -> list[_State]:
    states = []
    for tag, frame in (("A", B_ROWS), ("B", CONCURRENT_ROWS)):
        lines = [None] * (4 * k)
        src = [""] * (4 * k)
        for lab, row in zip(FRAME_LINES, frame):
            lines[lab.row(k)] = tuple(_const(c) for c in row)
            src[lab.row(k)] = "frame"
        states.append(_State(tag, lines, src, [None] * (k * k), [""] * (k * k)))
    return states


@dataclass
class PropagationResult:
    k: int
    trace: list[dict]
    outcomes: list[BranchOutcome]
    conditions: list[str]


def _run(net: NetIncidence, max_branches: int, seed: int, stop_early: bool) -> tuple[_Engine, str]:
    report = validate_net_axioms(net)
    if not report.ok:
        raise ValueError(f"incidence violates the net axioms: {report.failures[0]['message']}")
    engine = _Engine(net, max_branches, seed, stop_at=1 if stop_early else None)
    k = net.k
    if k < 3:
        raise ValueError("realization needs k >= 3")
    status = "done"
    for st in _initial_states(k):
        frame = B_ROWS if st.label == "A" else CONCURRENT_ROWS
        why = "frame B" if st.label == "A" else "class-1 lines 1-3 concurrent"
        engine.log(st, "frame", f"{why}: " + ", ".join(f"{lab.class_index, lab.line_index} = {row}" for lab, row in zip(FRAME_LINES, frame)))
        try:
            engine.explore(st)
        except _Unknown as exc:
            engine.log(st, "unknown", str(exc))
            engine.outcomes.append(BranchOutcome(st.label, "unknown", str(exc)))
            status = "unknown"
    return engine, status


def propagate_lines(net: NetIncidence, max_branches: int = 2000) -> PropagationResult:
    """Run the propagation over all branches and return the trace and derived univariate conditions."""
    engine, _ = _run(net, max_branches, 0, stop_early=False)
    conds = [e["poly"] for e in engine.trace if e["step"] == "univariate"]
    return PropagationResult(net.k, engine.trace, engine.outcomes, conds)


def decide_realizability(pair: OlsPair, max_branches: int = 2000, seed: int = 0) -> RealizationVerdict:
    k = pair.order
    from .equivalence import class_id

    if k == 6:
        trace = [{"branch": "-", "step": "combinatorial", "detail": "OLS_6 is empty (no order-6 square has a mate)"}]
        return RealizationVerdict("Empty", 6, trace=trace)
    net = ols_to_incidence(pair)
    engine, status = _run(net, max_branches, seed, stop_early=True)
    cid = class_id(pair)
    winners = [o for o in engine.outcomes if o.outcome == "realizable"]
    if winners:
        return RealizationVerdict("Realizable", k, winners[0].certificate, engine.trace, class_id=cid)
    unknown = [o for o in engine.outcomes if o.outcome == "unknown"]
    if unknown or status == "unknown":
        return RealizationVerdict("Unknown", k, None, engine.trace, reason=unknown[0].detail if unknown else "", class_id=cid)
    return RealizationVerdict("Empty", k, None, engine.trace, class_id=cid)


def build_minor_system(net: NetIncidence) -> tuple[Ideal, list[tuple[MultiPoly, ...]], list[str]]:
    """Every 3x3 minor for every chi point, with unknown rows as fresh variables.

    Rows of the frame are fixed to B; row ``n`` otherwise is ``(a_n, b_n, c_n)``.
    Returns the ideal, the symbolic rows and the variable names.
    """
    k = net.k
    names: list[str] = []
    rows: list[tuple[MultiPoly, ...]] = [None] * (4 * k)
    fixed = {lab.row(k): row for lab, row in zip(FRAME_LINES, B_ROWS)}
    for r in range(4 * k):
        if r not in fixed:
            names.extend(f"{x}{r + 1}" for x in "abc")
    gens = tuple(names)
    for r in range(4 * k):
        if r in fixed:
            rows[r] = tuple(MultiPoly.constant(c, gens) for c in fixed[r])
        else:
            rows[r] = tuple(MultiPoly.var(f"{x}{r + 1}", gens) for x in "abc")
    minors: list[MultiPoly] = []
    seen = set()
    for p in sorted(net.points):
        idx = [lab.row(k) for lab in p.labels()]
        for drop in range(4):
            m = det3([rows[idx[i]] for i in range(4) if i != drop])
            if m and m.primitive() not in seen:
                seen.add(m.primitive())
                minors.append(m)
    return Ideal(minors, gens), rows, names


def evaluate_minors(net: NetIncidence, matrix: LineMatrix) -> list:
    """Values of every minor of ``build_minor_system`` at the rows of ``matrix``."""
    ideal, _, names = build_minor_system(net)
    k = net.k
    fixed = {lab.row(k) for lab in FRAME_LINES}
    assignment = {}
    for r in range(4 * k):
        if r in fixed:
            continue
        for x, v in zip("abc", matrix.rows[r]):
            assignment[f"{x}{r + 1}"] = v
    return [g.evaluate(assignment) for g in ideal.generators]
