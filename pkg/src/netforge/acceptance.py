"""The acceptance checks, shared by ``netforge selftest`` and the test suite.

Each check returns a :class:`CriterionResult`; nothing here asserts, so a
failing criterion is reported rather than hidden.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from .combinat import (
    OlsPair,
    are_orthogonal,
    cyclic,
    disjoint_decomposition,
    enumerate_latin,
    find_mate_direct,
    orthogonal_mates,
)
from .equivalence import (
    MoveRejected,
    apply_pair_move,
    classify_ols,
    pair_canonical_form,
    pair_orbit,
    random_group_image,
    random_pair_move,
    tau_squares,
)
from .net import ols_to_incidence
from .realization import decide_realizability, verify_certificate


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    detail: str
    seconds: float
    limit: float
    data: dict = field(default_factory=dict)

    @property
    def within_time(self) -> bool:
        return self.seconds < self.limit

    @property
    def passed(self) -> bool:
        return self.ok and self.within_time

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:>2}. {self.title}: {self.detail} ({self.seconds:.1f}s, limit {self.limit:.0f}s)"

    def to_json(self) -> dict:
        return {
            "criterion": self.number, "title": self.title, "passed": self.passed, "ok": self.ok,
            "detail": self.detail, "seconds": round(self.seconds, 3), "limit": self.limit,
        }


def _timed(number: int, title: str, limit: float, fn: Callable[[], tuple[bool, str, dict]]) -> CriterionResult:
    t0 = time.perf_counter()
    ok, detail, data = fn()
    return CriterionResult(number, title, ok, detail, time.perf_counter() - t0, limit, data)


# ---------------------------------------------------------------------------
# classification


def _class_containing(classification, pair: OlsPair):
    canon = pair_canonical_form(pair)
    return [c for c in classification.classes if c.representative == canon]


def check_classify_3() -> CriterionResult:
    def run():
        cl = classify_ols(3)
        pair = OlsPair(cyclic(3, 1), cyclic(3, 2))
        hit = _class_containing(cl, pair)
        in_orbit = pair in pair_orbit(cl.classes[0].representative)
        ok = len(cl.classes) == 1 and len(hit) == 1 and in_orbit
        return ok, f"{len(cl.classes)} class, orbit size {cl.classes[0].orbit_size}, contains (L_(123), L_(132)): {in_orbit}", cl.to_json()

    return _timed(1, "classification k=3", 5, run)


def check_classify_4() -> CriterionResult:
    def run():
        cl = classify_ols(4)
        L1, L2, _ = tau_squares()
        hit = _class_containing(cl, OlsPair(L1, L2))
        ok = len(cl.classes) == 1 and len(hit) == 1
        return ok, f"{len(cl.classes)} class of {cl.total_pairs} pairs, contains (L_1, L_2): {bool(hit)}", cl.to_json()

    return _timed(2, "classification k=4", 120, run)


def check_classify_5(workers: int = 1) -> CriterionResult:
    def run():
        cl = classify_ols(5, workers=workers)
        note = cl.notes.get("resolved_open_bound", {})
        c = len(cl.classes)
        ok = 1 <= c <= 2 and "same_class" in note
        merge = "merge" if note.get("same_class") else "do not merge"
        sizes = ", ".join(str(x.orbit_size) for x in cl.classes)
        return ok, f"{c} classes (sizes {sizes}); the two candidate pairs {merge}", cl.to_json()

    return _timed(3, "classification k=5", 1800, run)


# ---------------------------------------------------------------------------
# combinatorics


def check_parity_law() -> CriterionResult:
    def run():
        found = {k: bool(orthogonal_mates(cyclic(k))) for k in (3, 4, 5, 6, 7)}
        ok = all(has == (k % 2 == 1) for k, has in found.items())
        text = ", ".join(f"k={k}: {'mate' if v else 'none'}" for k, v in found.items())
        return ok, text, {"has_mate": found}

    return _timed(4, "mate parity law", 60, run)


def check_reduced_mates_5() -> CriterionResult:
    def run():
        got = set(orthogonal_mates(cyclic(5), reduced_only=True))
        want = {cyclic(5, 4), cyclic(5, 3), cyclic(5, 2)}
        ok = got == want
        return ok, f"{len(got)} reduced mates, equal to {{L_(15432), L_(14253), L_(13524)}}: {ok}", {}

    return _timed(5, "reduced mates of L_(12345)", 60, run)


def check_transversal_equivalence() -> CriterionResult:
    def run():
        direct, cover, total = set(), set(), 0
        for square in enumerate_latin(4):
            total += 1
            if find_mate_direct(square) is not None:
                direct.add(square)
            if disjoint_decomposition(square) is not None:
                cover.add(square)
        ok = total == 576 and direct == cover
        return ok, f"{total} squares, {len(direct)} with a mate by direct search, {len(cover)} with 4 disjoint transversals", {}

    return _timed(6, "transversal/mate equivalence k=4", 60, run)


# ---------------------------------------------------------------------------
# realizability


def check_realize_3() -> CriterionResult:
    def run():
        pair = OlsPair(cyclic(3, 1), cyclic(3, 2))
        v = decide_realizability(pair)
        if v.outcome != "Realizable":
            return False, f"verdict {v.outcome}", {}
        check = verify_certificate(v.certificate, ols_to_incidence(pair))
        mod = v.modulus.to_string("x")
        ok = bool(check) and mod == "x^2 + x + 1"
        return ok, f"Realizable over Q[x]/({mod}), certificate verified: {bool(check)}", v.to_json()

    return _timed(7, "realizability k=3", 10, run)


def _trivial_gcd_pairs(trace: list[dict]) -> list[tuple[str, str]]:
    return [tuple(e["polys"]) for e in trace if e["step"] == "gcd" and e["gcd"] == "1"]


def check_realize_4() -> CriterionResult:
    def run():
        L1, L2, _ = tau_squares()
        v = decide_realizability(OlsPair(L1, L2))
        pairs = _trivial_gcd_pairs(v.trace)
        ok = v.outcome == "Empty" and bool(pairs)
        shown = f"gcd({pairs[0][0]}, {pairs[0][1]}) = 1" if pairs else "no trivial gcd in trace"
        return ok, f"{v.outcome}; {shown}", {"trivial_gcd_pairs": pairs}

    return _timed(8, "realizability k=4", 120, run)


def _linear_factor(var: str, value: str) -> str:
    if value == "0":
        return var
    return f"{var} + {value[1:]}" if value.startswith("-") else f"{var} - {value}"


def _roots_rejected(trace: list[dict], var: str, values: set[str]) -> set[str]:
    """Which of ``values`` appear as a rejected root, or as a solved value whose branch then dies."""
    hits = set()
    for n, e in enumerate(trace):
        if e["step"] == "degenerate":
            factor = e["detail"].split(" rejected")[0].removeprefix("roots of ")
            hits.update(v for v in values if factor == _linear_factor(var, v))
        if e["step"] == "solve" and e["detail"] in {f"{var} = {v}" for v in values}:
            later = [x for x in trace[n + 1:] if x["branch"].startswith(e["branch"])]
            if any(x["step"] == "dead" for x in later) and all(x["step"] != "realizable" for x in later):
                hits.add(e["detail"].split(" = ")[1])
    return hits


def check_realize_5() -> CriterionResult:
    def run():
        a = OlsPair(cyclic(5, 1), cyclic(5, 4))
        b = OlsPair(cyclic(5, 1), cyclic(5, 3))
        va, vb = decide_realizability(a), decide_realizability(b)
        notes = []
        # pair a: a univariate condition whose roots 0 and 1 make a line repeat
        uni_a = [e for e in va.trace if e["step"] == "univariate"]
        a_ok = False
        for e in uni_a:
            hits = _roots_rejected([x for x in va.trace if x["branch"].startswith(e["branch"])], e["var"], {"0", "1"})
            coincide = [x for x in va.trace if x["step"] == "degenerate" and x["branch"] == e["branch"] and "coincide" in x["detail"]]
            if hits == {"0", "1"} and coincide:
                a_ok = True
                notes.append(f"pair a: {e['poly']} = 0 with {e['var']} in {{0, 1}} rejected, a line repeats")
                break
        # pair b: a quintic condition, a gcd with a later condition containing var - 1, degenerate at 1
        b_ok = False
        for e in vb.trace:
            if e["step"] != "gcd":
                continue
            h, u = e["polys"]
            g = e["gcd"]
            var = h.split("^")[0].lstrip("-")[0]
            if h.startswith(f"{var}^5") and g != "1":
                hits = _roots_rejected([x for x in vb.trace if x["branch"].startswith(e["branch"])], var, {"1"})
                if "1" in hits:
                    b_ok = True
                    notes.append(f"pair b: gcd({h}, {u}) = {g}, degenerate at {var} = 1")
                    break
        ok = va.outcome == "Empty" and vb.outcome == "Empty" and a_ok and b_ok
        head = f"pair a {va.outcome}, pair b {vb.outcome}"
        return ok, "; ".join([head] + notes), {"pair_a": va.outcome, "pair_b": vb.outcome, "notes": notes}

    return _timed(9, "realizability k=5", 600, run)


# ---------------------------------------------------------------------------
# properties


def check_move_properties(seed: int = 2024, trials: int = 200, length: int = 20) -> CriterionResult:
    def run():
        rng = random.Random(seed)
        reps = {k: [c.representative for c in classify_ols(k).classes] for k in (3, 4, 5)}
        applied: Counter = Counter()
        rejected: Counter = Counter()
        bad = []
        for trial in range(trials):
            k = (3, 4, 5)[trial % 3]
            start = random_group_image(rng.choice(reps[k]), rng)
            # the group-reduced canonical form; its agreement with the BFS minimum is tested separately
            canon = pair_canonical_form(start, method="reduced")
            pair = start
            for _ in range(length):
                move = random_pair_move(k, rng)
                try:
                    pair = apply_pair_move(pair, move)
                except MoveRejected:
                    rejected[move.kind] += 1
                    continue
                applied[move.kind] += 1
                if not are_orthogonal(pair.first, pair.second):
                    bad.append((trial, move.label, "orthogonality"))
            if pair_canonical_form(pair, method="reduced") != canon:
                bad.append((trial, "-", "canonical form"))
        ok = not bad
        stats = ", ".join(f"{kind} {rejected[kind]}/{rejected[kind] + applied[kind]}" for kind in sorted(set(applied) | set(rejected)) if rejected[kind])
        detail = f"{trials} trials of {length} moves, {sum(applied.values())} accepted, rejections: {stats or 'none'}"
        if bad:
            detail += f"; {len(bad)} violations, first {bad[0]}"
        return ok, detail, {"applied": dict(applied), "rejected": dict(rejected), "seed": seed}

    return _timed(10, "move property suite", 120, run)


def check_order6_sweep() -> CriterionResult:
    def run():
        total = with_cover = 0
        for square in enumerate_latin(6, reduced=True):
            total += 1
            if disjoint_decomposition(square) is not None:
                with_cover += 1
        ok = total == 9408 and with_cover == 0
        return ok, f"{total} reduced order-6 squares, {with_cover} with 6 disjoint transversals", {}

    return _timed(11, "order-6 sweep", 1800, run)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: check_classify_3,
    2: check_classify_4,
    3: check_classify_5,
    4: check_parity_law,
    5: check_reduced_mates_5,
    6: check_transversal_equivalence,
    7: check_realize_3,
    8: check_realize_4,
    9: check_realize_5,
    10: check_move_properties,
    11: check_order6_sweep,
}


def run_all(selected=None) -> list[CriterionResult]:
    return [CRITERIA[n]() for n in sorted(selected or CRITERIA)]
