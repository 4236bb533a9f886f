import itertools
import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from netforge.combinat import (
    LatinSquare,
    OlsPair,
    Permutation,
    are_orthogonal,
    cycle_type,
    cyclic,
    cyclic_square,
    enumerate_latin,
    row_permutation,
)
from netforge.equivalence import (
    BudgetExceeded,
    MoveRejected,
    PairMove,
    SquareMove,
    apply_pair_move,
    apply_square_move,
    class_id,
    classify_ols,
    conjugate_normalize,
    count_ols,
    explore_orbit,
    generator_moves,
    group_canonical,
    group_order,
    pair_canonical_form,
    pair_orbit,
    parity_profile,
    random_group_image,
    random_pair_move,
    square_canonical_form,
    square_orbit,
    tau_squares,
)


def brute_ols(k):
    squares = list(enumerate_latin(k))
    return {OlsPair(a, b) for a in squares for b in squares if are_orthogonal(a, b)}


# -- moves ------------------------------------------------------------------------

square_moves = st.builds(
    SquareMove, st.sampled_from(["rows", "columns", "symbols"]), st.integers(1, 4), st.integers(1, 4)
).filter(lambda m: True)


@given(st.sampled_from(["rows", "columns", "symbols"]), st.permutations([1, 2, 3, 4]), st.integers(0, 575))
def test_square_moves_are_latin_involutions(kind, idx, n):
    L = _all4()[n]
    m = SquareMove(kind, idx[0], idx[1])
    once = apply_square_move(L, m)
    assert once.order == 4 and LatinSquare(once.grid) == once
    assert apply_square_move(once, m) == L


_CACHE = {}


def _all4():
    if "4" not in _CACHE:
        _CACHE["4"] = list(enumerate_latin(4))
    return _CACHE["4"]


def test_move_validation():
    with pytest.raises(ValueError):
        SquareMove("rows", 2, 2)
    with pytest.raises(ValueError):
        PairMove("R7")
    with pytest.raises(IndexError):
        apply_square_move(cyclic(3), SquareMove("rows", 1, 5))


def test_square_move_stays_in_class_of_cyclic():
    L = apply_square_move(apply_square_move(cyclic(3), SquareMove("symbols", 2, 3)), SquareMove("rows", 2, 3))
    assert square_canonical_form(L) == square_canonical_form(cyclic(3))


def test_r6_swaps():
    p = OlsPair(cyclic(3, 1), cyclic(3, 2))
    q = apply_pair_move(p, PairMove("R6"))
    assert q == OlsPair(cyclic(3, 2), cyclic(3, 1))


def test_column_cycle_on_tau_pair():
    L1, L2, L3 = tau_squares()
    p = OlsPair(L1, L2)
    # column 2 -> 3 -> 4 -> 2 as two transpositions
    q = apply_pair_move(apply_pair_move(p, PairMove("R2", 3, 4)), PairMove("R2", 2, 3))
    assert pair_canonical_form(q) == pair_canonical_form(OlsPair(L2, L3))


def test_transpose_of_symmetric_cyclic_pair():
    p = OlsPair(cyclic(5, 1), cyclic(5, 4))
    assert cyclic(5, 1).transpose() == cyclic(5, 1)
    assert apply_pair_move(p, PairMove("R5", which="first")) == p


def test_rejected_transpose_has_witness():
    # somewhere in OLS_4 a single transpose must break orthogonality
    L1, L2, _ = tau_squares()
    rng = random.Random(3)
    for _ in range(500):
        p = random_group_image(OlsPair(L1, L2), rng)
        try:
            apply_pair_move(p, PairMove("R5", which="second"))
        except MoveRejected as exc:
            (i1, j1), (i2, j2) = exc.witness
            t = p.second.transpose()
            assert (p.first.grid[i1 - 1][j1 - 1], t.grid[i1 - 1][j1 - 1]) == (p.first.grid[i2 - 1][j2 - 1], t.grid[i2 - 1][j2 - 1])
            return
    pytest.fail("no rejected transpose found")


@given(st.integers(0, 2**32), st.sampled_from([3, 4, 5]))
def test_r1_to_r4_and_r6_preserve_orthogonality(seed, k):
    rng = random.Random(seed)
    p = random_group_image(OlsPair(cyclic(k, 1), cyclic(k, k - 1)) if k != 4 else OlsPair(*tau_squares()[:2]), rng)
    for _ in range(20):
        m = random_pair_move(k, rng)
        if m.kind == "R5":
            continue
        p = apply_pair_move(p, m)
        assert are_orthogonal(p.first, p.second)


# -- orbits -------------------------------------------------------------------------


def test_ols3_orbit_is_everything():
    every = brute_ols(3)
    assert len(every) == 72 == count_ols(3)
    assert pair_orbit(OlsPair(cyclic(3, 1), cyclic(3, 2))) == every


@pytest.mark.slow
def test_ols4_count_matches_brute_force():
    assert len(brute_ols(4)) == 6912 == count_ols(4)


def test_count_ols5():
    assert count_ols(5) == 6220800


def test_tau_orbit_contains_relatives():
    L1, L2, L3 = tau_squares()
    orbit = pair_orbit(OlsPair(L1, L2))
    assert OlsPair(L2, L3) in orbit and OlsPair(L3, L1) in orbit
    assert OlsPair(L1, L3) in orbit
    assert len(orbit) == 6912


def test_orbit_closure_k3():
    orbit = pair_orbit(OlsPair(cyclic(3, 1), cyclic(3, 2)))
    for p in orbit:
        for m in generator_moves(3):
            try:
                assert apply_pair_move(p, m) in orbit
            except MoveRejected:
                pass


def test_budget_exceeded():
    L1, L2, _ = tau_squares()
    with pytest.raises(BudgetExceeded) as info:
        explore_orbit(OlsPair(L1, L2), budget=50)
    assert info.value.states_visited >= 50


def test_budget_from_environment(monkeypatch):
    from netforge.equivalence import default_budget

    monkeypatch.setenv("NETFORGE_BUDGET", "1234")
    assert default_budget() == 1234


# -- canonical forms ------------------------------------------------------------


def test_all_order3_squares_share_canonical_form():
    forms = {square_canonical_form(s) for s in enumerate_latin(3)}
    assert len(forms) == 1


def test_square_canonical_form_against_orbit_oracle():
    """Partition of the 576 order-4 squares by canonical form equals the orbit partition."""
    squares = _all4()
    by_form = {}
    for s in squares:
        by_form.setdefault(square_canonical_form(s), set()).add(s.flat())
    orbits = []
    left = {s.flat() for s in squares}
    while left:
        seed = LatinSquare.from_flat(min(left), 4)
        orb = square_orbit(seed)
        orbits.append(orb)
        left -= orb
    assert sorted(map(sorted, by_form.values())) == sorted(map(sorted, orbits))
    for form, members in by_form.items():
        assert form.flat() == min(members)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_cyclic_class_has_one_element(k):
    forms = set()
    for rest in itertools.permutations(range(2, k + 1)):
        sigma = Permutation.from_cycles([[1, *rest]], k)
        forms.add(square_canonical_form(cyclic_square(sigma)))
    assert len(forms) == 1


@given(st.integers(0, 2**32), st.sampled_from([3, 4]))
def test_bfs_and_reduced_canonical_forms_agree(seed, k):
    rng = random.Random(seed)
    base = OlsPair(cyclic(3, 1), cyclic(3, 2)) if k == 3 else OlsPair(*tau_squares()[:2])
    p = random_group_image(base, rng)
    assert pair_canonical_form(p, method="bfs") == pair_canonical_form(p, method="reduced")


def test_canonical_form_is_orbit_minimum_k3():
    orbit = pair_orbit(OlsPair(cyclic(3, 1), cyclic(3, 2)))
    low = min(orbit, key=lambda p: p.key())
    for p in list(orbit)[:10]:
        assert pair_canonical_form(p) == low


def test_group_canonical_hits_give_orbit_sizes():
    # group orbits of OLS_3 partition 72 pairs
    seen, total = set(), 0
    for p in brute_ols(3):
        canon, hits = group_canonical(p.key(), 3)
        if canon not in seen:
            seen.add(canon)
            total += group_order(3) // hits
    assert total == 72


# -- conjugate normalization -------------------------------------------------------


def test_conjugate_normalize_examples():
    square = next(s for s in enumerate_latin(5) if cycle_type(row_permutation(s, 3, 4)).parts == (2, 3))
    W = conjugate_normalize(square, 3, 4)
    assert W.grid[0] == (1, 2, 3, 4, 5)
    assert cycle_type(row_permutation(W, 1, 2)).parts == (2, 3)
    assert square_canonical_form(W) == square_canonical_form(square)


@given(st.integers(0, 575), st.permutations([1, 2, 3, 4]))
def test_conjugate_normalize_properties(n, rows):
    L = _all4()[n]
    i, j = rows[:2]
    W = conjugate_normalize(L, i, j)
    assert W.grid[0] == (1, 2, 3, 4)
    assert cycle_type(row_permutation(W, 1, 2)) == cycle_type(row_permutation(L, i, j))
    again = conjugate_normalize(W, 1, 2)
    assert cycle_type(row_permutation(again, 1, 2)) == cycle_type(row_permutation(W, 1, 2))


def test_cyclic_rows_normalize_to_full_cycle():
    L = cyclic(5)
    for i in range(1, 5):
        W = conjugate_normalize(L, i, i + 1)
        assert row_permutation(W, 1, 2).is_full_cycle()


# -- classification --------------------------------------------------------------


def test_classify_small_orders():
    c3 = classify_ols(3)
    assert len(c3.classes) == 1 and c3.classes[0].orbit_size == 72
    c4 = classify_ols(4)
    assert len(c4.classes) == 1 and c4.classes[0].orbit_size == 6912
    L1, L2, L3 = tau_squares()
    assert pair_canonical_form(OlsPair(L1, L2)) == pair_canonical_form(OlsPair(L1, L3)) == c4.classes[0].representative


def test_classify_methods_agree_k4():
    a = classify_ols(4, method="bfs")
    b = classify_ols(4, method="reduced")
    assert [c.representative for c in a.classes] == [c.representative for c in b.classes]
    assert [c.orbit_size for c in a.classes] == [c.orbit_size for c in b.classes]


def test_classify_order5():
    c5 = classify_ols(5)
    assert sorted(c.orbit_size for c in c5.classes) == [2073600, 4147200]
    note = c5.notes["resolved_open_bound"]
    assert note["same_class"] is False
    a = pair_canonical_form(OlsPair(cyclic(5, 1), cyclic(5, 4)))
    b = pair_canonical_form(OlsPair(cyclic(5, 1), cyclic(5, 3)))
    sizes = {c.representative: c.orbit_size for c in c5.classes}
    assert sizes[a] == 2073600 and sizes[b] == 4147200
    assert c5.notes["r5"]["any_rejected"]
    # the third mate L_(13524) gives a pair in one of the two classes
    c = pair_canonical_form(OlsPair(cyclic(5, 1), cyclic(5, 2)))
    assert c in sizes


def test_classify_independent_of_workers():
    a = classify_ols(5, workers=1).to_json()
    b = classify_ols(5, workers=2).to_json()
    assert a == b


def test_classify_order6_is_empty():
    c6 = classify_ols(6)
    assert c6.classes == [] and c6.total_pairs == 0


def test_classify_rejects_unsupported():
    with pytest.raises(ValueError):
        classify_ols(7)


def test_class_id_stable():
    p = OlsPair(cyclic(3, 1), cyclic(3, 2))
    assert class_id(p) == class_id(OlsPair(cyclic(3, 1), cyclic(3, 2)))
    assert len(class_id(p)) == 16


def test_parity_profile_counts():
    prof = parity_profile(cyclic(5))
    assert prof["even"] + prof["odd"] == 20
    # every row permutation of L_(12345) is a 5-cycle, hence even
    assert prof == {"even": 20, "odd": 0}
