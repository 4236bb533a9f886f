"""Moves on squares and pairs, orbits, canonical forms and the classification of OLS_k.

Two routes compute a pair's canonical form (the lexicographic minimum of its
class, flattened first square then flattened second):

* ``bfs``: breadth-first search over every pair reachable by accepted moves.
* ``reduced``: the moves that always preserve orthogonality (row and column
  swaps, symbol swaps in either square, exchanging the squares) form a group
  whose orbit minimum can be read off directly: the minimum has a reduced first
  square, so it is enough to try every choice of top row and every column
  order.  Single-square transposes are then followed as edges between those
  orbits.  The transpose edges leaving an orbit are parametrized by one
  permutation ``pi``: transposing the first square of any orbit member lands,
  up to the group, on ``(A, B)`` with ``A[i][j] = L[pi(j)][pi^-1(i)]``.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
import os
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Iterator, Sequence

from .combinat import (
    LatinSquare,
    OlsPair,
    Permutation,
    are_orthogonal,
    cyclic,
    enumerate_latin,
    from_permutations,
    orthogonal_mates,
    orthogonality_witness,
    row_permutation,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 20_000_000
Key = tuple[int, ...]


def default_budget() -> int:
    env = os.environ.get("NETFORGE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class BudgetExceeded(RuntimeError):
    def __init__(self, states_visited: int):
        super().__init__(f"orbit search exceeded its budget after {states_visited} states")
        self.states_visited = states_visited


# ---------------------------------------------------------------------------
# moves


SQUARE_KINDS = ("rows", "columns", "symbols")
PAIR_KINDS = ("R1", "R2", "R3", "R4", "R5", "R6")


@dataclass(frozen=True)
class SquareMove:
    """S1 (``rows``), S2 (``columns``) or S3 (``symbols``) exchanging ``a`` and ``b``."""

    kind: str
    a: int
    b: int

    def __post_init__(self):
        if self.kind not in SQUARE_KINDS:
            raise ValueError(f"unknown square move {self.kind!r}")
        if self.a == self.b:
            raise ValueError("a move must exchange two distinct indices")


@dataclass(frozen=True)
class PairMove:
    """One of R1..R6.  ``a``/``b`` are rows, columns or symbols; ``which`` is used by R5."""

    kind: str
    a: int = 0
    b: int = 0
    which: str = "first"

    def __post_init__(self):
        if self.kind not in PAIR_KINDS:
            raise ValueError(f"unknown pair move {self.kind!r}")
        if self.kind in ("R1", "R2", "R3", "R4") and self.a == self.b:
            raise ValueError("a move must exchange two distinct indices")
        if self.kind == "R5" and self.which not in ("first", "second"):
            raise ValueError("R5 transposes either the first or the second square")

    @property
    def label(self) -> str:
        return f"R5-{self.which}" if self.kind == "R5" else self.kind

    def __str__(self) -> str:
        if self.kind in ("R1", "R2", "R3", "R4"):
            return f"{self.kind}({self.a},{self.b})"
        if self.kind == "R5":
            return f"R5({self.which})"
        return "R6"


class MoveRejected(ValueError):
    """A move whose result is not an orthogonal pair; ``witness`` holds two colliding cells."""

    def __init__(self, move: PairMove, witness):
        super().__init__(f"{move} breaks orthogonality at cells {witness}")
        self.move = move
        self.witness = witness


def _check_range(k: int, *idx: int) -> None:
    for v in idx:
        if not 1 <= v <= k:
            raise IndexError(f"index {v} outside 1..{k}")


def apply_square_move(square: LatinSquare, move: SquareMove) -> LatinSquare:
    k = square.order
    a, b = move.a, move.b
    _check_range(k, a, b)
    g = [list(r) for r in square.grid]
    if move.kind == "rows":
        g[a - 1], g[b - 1] = g[b - 1], g[a - 1]
    elif move.kind == "columns":
        for row in g:
            row[a - 1], row[b - 1] = row[b - 1], row[a - 1]
    else:
        swap = {a: b, b: a}
        g = [[swap.get(v, v) for v in row] for row in g]
    return LatinSquare._trusted(tuple(map(tuple, g)))


def _swap_symbols(square: LatinSquare, a: int, b: int) -> LatinSquare:
    return apply_square_move(square, SquareMove("symbols", a, b))


def apply_pair_move(pair: OlsPair, move: PairMove) -> OlsPair:
    """Apply a move; raises MoveRejected if the result is not orthogonal."""
    k = pair.order
    first, second = pair.first, pair.second
    if move.kind == "R1":
        m = SquareMove("rows", move.a, move.b)
        _check_range(k, move.a, move.b)
        first, second = apply_square_move(first, m), apply_square_move(second, m)
    elif move.kind == "R2":
        m = SquareMove("columns", move.a, move.b)
        _check_range(k, move.a, move.b)
        first, second = apply_square_move(first, m), apply_square_move(second, m)
    elif move.kind == "R3":
        _check_range(k, move.a, move.b)
        first = _swap_symbols(first, move.a, move.b)
    elif move.kind == "R4":
        _check_range(k, move.a, move.b)
        second = _swap_symbols(second, move.a, move.b)
    elif move.kind == "R5":
        if move.which == "first":
            first = first.transpose()
        else:
            second = second.transpose()
    else:
        first, second = second, first
    witness = orthogonality_witness(first, second)
    if witness is not None:
        raise MoveRejected(move, witness)
    return OlsPair._trusted(first, second)


def generator_moves(k: int) -> list[PairMove]:
    """Adjacent transpositions for R1-R4, both R5 variants and R6."""
    moves = []
    for kind in ("R1", "R2", "R3", "R4"):
        moves.extend(PairMove(kind, i, i + 1) for i in range(1, k))
    moves.append(PairMove("R5", which="first"))
    moves.append(PairMove("R5", which="second"))
    moves.append(PairMove("R6"))
    return moves


def random_pair_move(k: int, rng: random.Random) -> PairMove:
    kind = rng.choice(PAIR_KINDS)
    if kind in ("R1", "R2", "R3", "R4"):
        a, b = rng.sample(range(1, k + 1), 2)
        return PairMove(kind, a, b)
    if kind == "R5":
        return PairMove("R5", which=rng.choice(("first", "second")))
    return PairMove("R6")


# ---------------------------------------------------------------------------
# flat-tuple kernels used by the searches


def _pair_key(pair: OlsPair) -> Key:
    return pair.first.flat() + pair.second.flat()


def _key_to_pair(key: Key, k: int) -> OlsPair:
    n = k * k
    return OlsPair._trusted(LatinSquare.from_flat(key[:n], k), LatinSquare.from_flat(key[n:], k))


def _orthogonal_flat(a: Sequence[int], b: Sequence[int], k: int) -> bool:
    return len({x * (k + 1) + y for x, y in zip(a, b)}) == k * k


def _generator_kernels(k: int):
    n = k * k
    rows_perms, cols_perms = [], []
    for i in range(k - 1):
        perm = list(range(n))
        for c in range(k):
            perm[i * k + c], perm[(i + 1) * k + c] = (i + 1) * k + c, i * k + c
        rows_perms.append(tuple(perm))
        perm = list(range(n))
        for r in range(k):
            perm[r * k + i], perm[r * k + i + 1] = r * k + i + 1, r * k + i
        cols_perms.append(tuple(perm))
    transpose = tuple((p % k) * k + p // k for p in range(n))
    return rows_perms, cols_perms, transpose


def _bfs(start: Key, k: int, budget: int) -> tuple[set[Key], Counter, Counter]:
    n = k * k
    rows_perms, cols_perms, transpose = _generator_kernels(k)
    labels = (
        [("R1", p) for p in rows_perms]
        + [("R2", p) for p in cols_perms]
    )
    seen = {start}
    queue = deque([start])
    rejected: Counter = Counter()
    applied: Counter = Counter()
    while queue:
        state = queue.popleft()
        a, b = state[:n], state[n:]
        successors = []
        for label, perm in labels:
            successors.append((label, tuple(a[p] for p in perm) + tuple(b[p] for p in perm)))
        for s in range(1, k):
            swap = {s: s + 1, s + 1: s}
            successors.append(("R3", tuple(swap.get(v, v) for v in a) + b))
            successors.append(("R4", a + tuple(swap.get(v, v) for v in b)))
        ta = tuple(a[p] for p in transpose)
        tb = tuple(b[p] for p in transpose)
        for label, x, y in (("R5-first", ta, b), ("R5-second", a, tb)):
            applied[label] += 1
            if _orthogonal_flat(x, y, k):
                successors.append((label, x + y))
            else:
                rejected[label] += 1
        successors.append(("R6", b + a))
        for label, nxt in successors:
            if label in ("R1", "R2", "R3", "R4", "R6"):
                applied[label] += 1
            if nxt not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(len(seen))
                seen.add(nxt)
                queue.append(nxt)
    return seen, rejected, applied


@dataclass
class OrbitSearch:
    k: int
    keys: set
    rejected: Counter
    applied: Counter

    def pairs(self) -> frozenset[OlsPair]:
        return frozenset(_key_to_pair(key, self.k) for key in self.keys)

    def minimum(self) -> OlsPair:
        return _key_to_pair(min(self.keys), self.k)

    def __len__(self) -> int:
        return len(self.keys)


def explore_orbit(pair: OlsPair, budget: int | None = None) -> OrbitSearch:
    budget = default_budget() if budget is None else budget
    keys, rejected, applied = _bfs(_pair_key(pair), pair.order, budget)
    return OrbitSearch(pair.order, keys, rejected, applied)


def pair_orbit(pair: OlsPair, budget: int | None = None) -> frozenset[OlsPair]:
    """Every pair reachable from ``pair`` by accepted R-moves."""
    return explore_orbit(pair, budget).pairs()


# ---------------------------------------------------------------------------
# group-orbit canonical forms


def _reduce_under_isotopy(x: Sequence[int], k: int, r0: int, cols: Sequence[int]) -> tuple[tuple[int, ...], list[int]]:
    """Relabel so row ``r0`` (columns in order ``cols``) reads 1..k, then sort rows by column 0."""
    alpha = [0] * (k + 1)
    base = r0 * k
    for c in range(k):
        alpha[x[base + cols[c]]] = c + 1
    c0 = cols[0]
    order = [0] * k
    for r in range(k):
        order[alpha[x[r * k + c0]] - 1] = r
    flat = tuple(alpha[x[r * k + c]] for r in order for c in cols)
    return flat, order


def _normalize_symbols(y: Sequence[int], k: int, order: Sequence[int], cols: Sequence[int]) -> tuple[int, ...]:
    beta = [0] * (k + 1)
    base = order[0] * k
    for c in range(k):
        beta[y[base + cols[c]]] = c + 1
    return tuple(beta[y[r * k + c]] for r in order for c in cols)


def square_canonical_form(square: LatinSquare) -> LatinSquare:
    """Lexicographic minimum of the square's class under row, column and symbol exchanges."""
    k = square.order
    x = square.flat()
    best = None
    for cols in itertools.permutations(range(k)):
        for r0 in range(k):
            flat, _ = _reduce_under_isotopy(x, k, r0, cols)
            if best is None or flat < best:
                best = flat
    return LatinSquare.from_flat(best, k)


def group_canonical(key: Key, k: int) -> tuple[Key, int]:
    """Minimum of the orbit under R1-R4 and R6, with the number of group elements reaching it."""
    n = k * k
    a, b = key[:n], key[n:]
    best_x = None
    best_y = None
    hits = 0
    col_orders = list(itertools.permutations(range(k)))
    for x, y in ((a, b), (b, a)):
        for cols in col_orders:
            for r0 in range(k):
                fx, order = _reduce_under_isotopy(x, k, r0, cols)
                if best_x is not None and fx > best_x:
                    continue
                fy = _normalize_symbols(y, k, order, cols)
                if best_x is None or fx < best_x or fy < best_y:
                    best_x, best_y, hits = fx, fy, 1
                elif fx == best_x and fy == best_y:
                    hits += 1
    return best_x + best_y, hits


def group_order(k: int) -> int:
    return 2 * factorial(k) ** 4


def transpose_edges(key: Key, k: int) -> Iterator[tuple[str, bool, Key]]:
    """Every single-square transpose leaving the group orbit of ``key``, up to the group."""
    n = k * k
    a, b = key[:n], key[n:]
    for pi in itertools.permutations(range(k)):
        inv = [0] * k
        for i, v in enumerate(pi):
            inv[v] = i
        idx = tuple(pi[j] * k + inv[i] for i in range(k) for j in range(k))
        ta = tuple(a[p] for p in idx)
        yield "R5-first", _orthogonal_flat(ta, b, k), ta + b
        tb = tuple(b[p] for p in idx)
        yield "R5-second", _orthogonal_flat(a, tb, k), a + tb


class OrbitGraph:
    """Group orbits of OLS_k (identified by their minima) linked by accepted transposes."""

    def __init__(self, k: int, budget: int | None = None):
        self.k = k
        self.budget = default_budget() if budget is None else budget
        self.size: dict[Key, int] = {}
        self.edges: dict[Key, set[Key]] = {}
        self.rejected: dict[Key, Counter] = {}
        self._component: dict[Key, Key] = {}
        self._canon_cache: dict[Key, Key] = {}

    def canonical(self, key: Key) -> Key:
        hit = self._canon_cache.get(key)
        if hit is not None:
            return hit
        canon, hits = group_canonical(key, self.k)
        self.size.setdefault(canon, group_order(self.k) // hits)
        self._canon_cache[key] = canon
        return canon

    def expand(self, canon: Key) -> set[Key]:
        if canon in self.edges:
            return self.edges[canon]
        targets = set()
        rejected: Counter = Counter()
        for label, ok, cand in transpose_edges(canon, self.k):
            if ok:
                targets.add(self.canonical(cand))
            else:
                rejected[label] += 1
        targets.discard(canon)
        self.edges[canon] = targets
        self.rejected[canon] = rejected
        return targets

    def component(self, canon: Key) -> list[Key]:
        seen = {canon}
        queue = deque([canon])
        states = 0
        while queue:
            cur = queue.popleft()
            states += self.size.get(cur, 0)
            if states > self.budget:
                raise BudgetExceeded(states)
            for nxt in self.expand(cur):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return sorted(seen)

    def class_minimum(self, key: Key) -> Key:
        canon = self.canonical(key)
        hit = self._component.get(canon)
        if hit is not None:
            return hit
        members = self.component(canon)
        low = members[0]
        for m in members:
            self._component[m] = low
        return low


_GRAPHS: dict[int, OrbitGraph] = {}


def _graph(k: int, budget: int | None) -> OrbitGraph:
    g = _GRAPHS.get(k)
    if g is None or (budget is not None and g.budget != budget):
        g = OrbitGraph(k, budget)
        _GRAPHS[k] = g
    return g


def pair_canonical_form(pair: OlsPair, budget: int | None = None, method: str = "auto") -> OlsPair:
    """Lexicographic minimum (first square, then second) over the pair's class."""
    k = pair.order
    if method == "auto":
        method = "bfs" if k <= 4 else "reduced"
    if method == "bfs":
        return explore_orbit(pair, budget).minimum()
    if method == "reduced":
        return _key_to_pair(_graph(k, budget).class_minimum(_pair_key(pair)), k)
    raise ValueError(f"unknown canonicalization method {method!r}")


def conjugate_normalize(square: LatinSquare, i: int, j: int) -> LatinSquare:
    """An equivalent square with first row 1..k whose row-1-to-row-2 permutation has
    the cycle type of rows i to j of the input."""
    k = square.order
    if i == j:
        raise ValueError("conjugate_normalize needs two distinct rows")
    _check_range(k, i, j)
    rows = list(square.grid)
    order = [i - 1, j - 1] + [r for r in range(k) if r not in (i - 1, j - 1)]
    moved = [rows[r] for r in order]
    relabel = {v: c + 1 for c, v in enumerate(moved[0])}
    return LatinSquare(tuple(tuple(relabel[v] for v in row) for row in moved))


# ---------------------------------------------------------------------------
# classification


@dataclass
class EquivalenceClass:
    representative: OlsPair
    orbit_size: int
    class_id: str
    rejected_moves: dict[str, int] = field(default_factory=dict)
    group_orbits: int = 1

    def to_json(self) -> dict:
        return {
            "class_id": self.class_id,
            "representative": self.representative.to_json(),
            "orbit_size": self.orbit_size,
            "group_orbits": self.group_orbits,
            "rejected_moves": dict(sorted(self.rejected_moves.items())),
        }


@dataclass
class Classification:
    k: int
    method: str
    classes: list[EquivalenceClass]
    total_pairs: int
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "method": self.method,
            "class_count": len(self.classes),
            "total_pairs": self.total_pairs,
            "classes": [c.to_json() for c in self.classes],
        }
        if "resolved_open_bound" in self.notes:
            out["resolved_open_bound"] = self.notes["resolved_open_bound"]
        if "r5" in self.notes:
            out["r5_rejections"] = self.notes["r5"]
        return out


def class_id(pair: OlsPair) -> str:
    text = ",".join(map(str, _pair_key(pair)))
    return hashlib.sha256(f"{pair.order}:{text}".encode()).hexdigest()[:16]


def reduced_mate_pairs(k: int) -> Iterator[OlsPair]:
    """Pairs with a reduced first square and a mate whose first row reads 1..k.

    Every pair of OLS_k can be moved onto one of these with R1-R4.
    """
    for square in enumerate_latin(k, reduced=True):
        for mate in orthogonal_mates(square, reduced_only=True):
            yield OlsPair._trusted(square, mate)


def count_ols(k: int) -> int:
    """|OLS_k| from the reduced squares: mate counts are invariant under row, column and symbol changes."""
    reduced_mates = sum(1 for _ in reduced_mate_pairs(k))
    return factorial(k) * factorial(k - 1) * reduced_mates * factorial(k)


def _canon_chunk(args) -> list[tuple[Key, int]]:
    keys, k = args
    return [group_canonical(key, k) for key in keys]


def _group_orbits(k: int, seeds: list[Key], workers: int) -> dict[Key, int]:
    if workers > 1 and len(seeds) > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [(seeds[i::workers], k) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for chunk in pool.map(_canon_chunk, chunks) for r in chunk]
    else:
        results = _canon_chunk((seeds, k))
    return {canon: group_order(k) // hits for canon, hits in results}


def classify_ols(k: int, budget: int | None = None, workers: int = 1, method: str = "auto") -> Classification:
    """All classes of OLS_k under R1-R6 with representatives (class minima) and sizes."""
    if k < 2:
        raise ValueError("order must be at least 2")
    if k == 6:
        from .combinat import disjoint_decomposition

        for square in enumerate_latin(6, reduced=True):
            if disjoint_decomposition(square) is not None:
                raise AssertionError("found an order-6 square with a mate")
        return Classification(6, "mate-sweep", [], 0, {"reduced_squares_checked": 9408})
    if k > 5:
        raise ValueError(f"classification is supported for k in 3..6, not {k}")
    if method == "auto":
        method = "bfs" if k <= 4 else "reduced"
    budget = default_budget() if budget is None else budget
    seeds = [_pair_key(p) for p in reduced_mate_pairs(k)]
    total = count_ols(k)
    classes: list[EquivalenceClass] = []
    notes: dict = {}

    if method == "bfs":
        assigned: set[Key] = set()
        for seed in seeds:
            if seed in assigned:
                continue
            keys, rejected, applied = _bfs(seed, k, budget)
            assigned |= keys
            rep = _key_to_pair(min(keys), k)
            classes.append(EquivalenceClass(rep, len(keys), class_id(rep), dict(rejected)))
    elif method == "reduced":
        graph = OrbitGraph(k, budget)
        orbits = _group_orbits(k, seeds, workers)
        graph.size.update(orbits)
        for canon in sorted(orbits):
            graph.expand(canon)
        unseen = set(graph.edges) - set(orbits)
        if unseen:
            raise AssertionError("transpose edges left the enumerated orbits")
        done: set[Key] = set()
        for canon in sorted(orbits):
            if canon in done:
                continue
            members = graph.component(canon)
            done.update(members)
            rejected: Counter = Counter()
            for m in members:
                rejected.update(graph.rejected[m])
            rep = _key_to_pair(members[0], k)
            classes.append(
                EquivalenceClass(rep, sum(graph.size[m] for m in members), class_id(rep), dict(rejected), len(members))
            )
        for canon in orbits:
            graph._component.setdefault(canon, min(c for c in graph.component(canon)))
        _GRAPHS[k] = graph
    else:
        raise ValueError(f"unknown classification method {method!r}")

    classes.sort(key=lambda c: _pair_key(c.representative))
    if sum(c.orbit_size for c in classes) != total:
        raise AssertionError("class sizes do not add up to |OLS_k|")
    rejections = Counter()
    for c in classes:
        rejections.update(c.rejected_moves)
    notes["r5"] = {"rejections": dict(sorted(rejections.items())), "any_rejected": bool(rejections)}
    log.info("k=%d: %d classes, R5 rejections %s", k, len(classes), dict(rejections))

    if k == 5:
        a = OlsPair(cyclic(5, 1), cyclic(5, 4))
        b = OlsPair(cyclic(5, 1), cyclic(5, 3))
        ca = pair_canonical_form(a, budget, method)
        cb = pair_canonical_form(b, budget, method)
        notes["resolved_open_bound"] = {
            "pair_a": "(L_(12345), L_(15432))",
            "pair_b": "(L_(12345), L_(14253))",
            "class_a": class_id(ca),
            "class_b": class_id(cb),
            "same_class": ca == cb,
            "class_count": len(classes),
        }
    return Classification(k, method, classes, total, notes)


def classify_ols_bfs(k: int, budget: int | None = None) -> Classification:
    return classify_ols(k, budget, method="bfs")


# ---------------------------------------------------------------------------
# fixtures from the literature


def tau_squares() -> tuple[LatinSquare, LatinSquare, LatinSquare]:
    """L_1 = L(t1,t2,t1), L_2 = L(t2,t3,t2), L_3 = L(t3,t1,t3) with t1=(12)(34), t2=(14)(23), t3=(13)(24)."""
    t1 = Permutation.from_cycles("(1 2)(3 4)", 4)
    t2 = Permutation.from_cycles("(1 4)(2 3)", 4)
    t3 = Permutation.from_cycles("(1 3)(2 4)", 4)
    return (
        from_permutations([t1, t2, t1]),
        from_permutations([t2, t3, t2]),
        from_permutations([t3, t1, t3]),
    )


def random_group_image(pair: OlsPair, rng: random.Random) -> OlsPair:
    """Apply random row, column and symbol permutations (and maybe a swap)."""
    k = pair.order
    rows = rng.sample(range(k), k)
    cols = rng.sample(range(k), k)
    alpha = [0] + rng.sample(range(1, k + 1), k)
    beta = [0] + rng.sample(range(1, k + 1), k)
    a = tuple(tuple(alpha[pair.first.grid[r][c]] for c in cols) for r in rows)
    b = tuple(tuple(beta[pair.second.grid[r][c]] for c in cols) for r in rows)
    if rng.random() < 0.5:
        a, b = b, a
    return OlsPair(LatinSquare(a), LatinSquare(b))


def square_orbit(square: LatinSquare) -> set[tuple[int, ...]]:
    """BFS over S1-S3 adjacent exchanges; used to check ``square_canonical_form``."""
    k = square.order
    moves = [SquareMove(kind, i, i + 1) for kind in SQUARE_KINDS for i in range(1, k)]
    seen = {square.flat()}
    queue = deque([square])
    while queue:
        cur = queue.popleft()
        for m in moves:
            nxt = apply_square_move(cur, m)
            f = nxt.flat()
            if f not in seen:
                seen.add(f)
                queue.append(nxt)
    return seen


def parity_profile(square: LatinSquare) -> dict[str, int]:
    """How many of the row permutations sigma_ij (i != j) are even or odd."""
    k = square.order
    even = odd = 0
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            if i != j:
                if row_permutation(square, i, j).is_even():
                    even += 1
                else:
                    odd += 1
    return {"even": even, "odd": odd}


def iter_classes(classification: Classification) -> Iterable[EquivalenceClass]:
    return iter(classification.classes)
