"""Latin squares, row permutations, transversals and orthogonal mates.

Everything visible from outside is 1-based: symbols run over 1..k and row or
column indices start at 1.  Grids are stored as tuples of tuples.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Grid = tuple[tuple[int, ...], ...]


class LatinError(ValueError):
    """Raised when a grid or a permutation sequence does not give a Latin square."""


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class CycleType:
    parts: tuple[int, ...]

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..k}; ``mapping[i-1]`` is the image of ``i``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.mapping)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"{m} is not a permutation of 1..{len(m)}")
        object.__setattr__(self, "mapping", m)

    @property
    def order(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    @classmethod
    def from_cycles(cls, text: str | Sequence[Sequence[int]], k: int) -> "Permutation":
        """Build from cycle notation such as ``"(1 2 3)(4 5)"`` or ``"(15)(236)"``.

        Compact cycles without separators are read digit by digit, which is
        only unambiguous for k <= 9.
        """
        if isinstance(text, str):
            cycles = []
            for body in re.findall(r"\(([^)]*)\)", text):
                body = body.strip()
                if not body:
                    continue
                if re.search(r"[\s,]", body):
                    cycles.append([int(x) for x in re.split(r"[\s,]+", body) if x])
                else:
                    if k > 9:
                        raise ValueError("compact cycle notation needs k <= 9")
                    cycles.append([int(ch) for ch in body])
            if re.sub(r"\([^)]*\)", "", text).strip() not in ("",):
                raise ValueError(f"cannot parse cycle notation {text!r}")
        else:
            cycles = [list(c) for c in text]
        image = list(range(1, k + 1))
        seen: set[int] = set()
        for cyc in cycles:
            for a in cyc:
                if not 1 <= a <= k or a in seen:
                    raise ValueError(f"bad cycle {cyc} for k={k}")
                seen.add(a)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                image[a - 1] = b
        return cls(tuple(image))

    def __call__(self, x: int) -> int:
        return self.mapping[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition: ``(self * other)(x) == self(other(x))``."""
        if other.order != self.order:
            raise ValueError("cannot compose permutations of different degree")
        return Permutation(tuple(self.mapping[other.mapping[i] - 1] for i in range(self.order)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.order
        for i, v in enumerate(self.mapping):
            inv[v - 1] = i + 1
        return Permutation(tuple(inv))

    def __pow__(self, n: int) -> "Permutation":
        if n < 0:
            return self.inverse() ** (-n)
        result = Permutation.identity(self.order)
        for _ in range(n):
            result = self * result
        return result

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles of length >= 2, each starting at its least element."""
        seen = set()
        out = []
        for start in range(1, self.order + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def fixed_points(self) -> list[int]:
        return [i + 1 for i, v in enumerate(self.mapping) if v == i + 1]

    def is_fixed_point_free(self) -> bool:
        return not self.fixed_points()

    def is_full_cycle(self) -> bool:
        cyc = self.cycles()
        return len(cyc) == 1 and len(cyc[0]) == self.order

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def to_cycle_string(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __str__(self) -> str:
        return self.to_cycle_string()


def cycle_type(p: Permutation) -> CycleType:
    """Multiset of cycle lengths >= 2, stored ascending; (15)(236)(49) gives (2,2,3)."""
    return CycleType(tuple(sorted(len(c) for c in p.cycles())))


# ---------------------------------------------------------------------------
# squares


def is_latin(grid: Sequence[Sequence[int]]) -> bool:
    k = len(grid)
    symbols = set(range(1, k + 1))
    if k == 0 or any(len(row) != k for row in grid):
        return False
    if any(set(row) != symbols for row in grid):
        return False
    return all({grid[i][j] for i in range(k)} == symbols for j in range(k))


@dataclass(frozen=True)
class LatinSquare:
    grid: Grid

    def __post_init__(self):
        g = tuple(tuple(int(v) for v in row) for row in self.grid)
        if not is_latin(g):
            raise LatinError(f"grid is not a Latin square: {g}")
        object.__setattr__(self, "grid", g)

    @property
    def order(self) -> int:
        return len(self.grid)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.grid[i - 1][j - 1]

    def flat(self) -> tuple[int, ...]:
        return tuple(v for row in self.grid for v in row)

    @classmethod
    def from_flat(cls, values: Sequence[int], k: int | None = None) -> "LatinSquare":
        if k is None:
            k = int(round(len(values) ** 0.5))
        return cls(tuple(tuple(values[r * k:(r + 1) * k]) for r in range(k)))

    @classmethod
    def _trusted(cls, grid: Grid) -> "LatinSquare":
        obj = object.__new__(cls)
        object.__setattr__(obj, "grid", grid)
        return obj

    def transpose(self) -> "LatinSquare":
        return LatinSquare._trusted(tuple(zip(*self.grid)))

    def is_reduced(self) -> bool:
        k = self.order
        ident = tuple(range(1, k + 1))
        return self.grid[0] == ident and tuple(r[0] for r in self.grid) == ident

    # text / json ----------------------------------------------------------
    def to_text(self) -> str:
        return "\n".join(" ".join(map(str, row)) for row in self.grid) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LatinSquare":
        rows = [tuple(int(v) for v in line.split()) for line in text.strip().splitlines() if line.strip()]
        return cls(tuple(rows))

    def to_json(self) -> dict:
        return {"order": self.order, "grid": [list(r) for r in self.grid]}

    @classmethod
    def from_json(cls, data: dict | str) -> "LatinSquare":
        if isinstance(data, str):
            data = json.loads(data)
        sq = cls(tuple(tuple(r) for r in data["grid"]))
        if sq.order != data.get("order", sq.order):
            raise LatinError("declared order does not match grid")
        return sq

    def __str__(self) -> str:
        return self.to_text().rstrip()


@dataclass(frozen=True)
class Transversal:
    """k cells, one per row, listed by row; ``cells[r-1] == (r, column)``."""

    cells: tuple[tuple[int, int], ...]

    def columns(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.cells)

    def is_valid_for(self, square: LatinSquare) -> bool:
        k = square.order
        rows = {r for r, _ in self.cells}
        cols = {c for _, c in self.cells}
        vals = {square[r, c] for r, c in self.cells}
        return len(self.cells) == k and len(rows) == len(cols) == len(vals) == k


@dataclass(frozen=True)
class OlsPair:
    first: LatinSquare
    second: LatinSquare

    def __post_init__(self):
        if not are_orthogonal(self.first, self.second):
            raise LatinError("squares are not orthogonal")

    @property
    def order(self) -> int:
        return self.first.order

    @classmethod
    def _trusted(cls, first: LatinSquare, second: LatinSquare) -> "OlsPair":
        obj = object.__new__(cls)
        object.__setattr__(obj, "first", first)
        object.__setattr__(obj, "second", second)
        return obj

    def key(self) -> tuple[int, ...]:
        return self.first.flat() + self.second.flat()

    def to_json(self) -> dict:
        return {"order": self.order, "first": self.first.to_json()["grid"], "second": self.second.to_json()["grid"]}

    @classmethod
    def from_json(cls, data: dict | str) -> "OlsPair":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(LatinSquare(tuple(map(tuple, data["first"]))), LatinSquare(tuple(map(tuple, data["second"]))))


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    if a.order != b.order:
        raise ValueError(f"orders differ: {a.order} vs {b.order}")
    k = a.order
    pairs = {(x, y) for ra, rb in zip(a.grid, b.grid) for x, y in zip(ra, rb)}
    return len(pairs) == k * k


def orthogonality_witness(a: LatinSquare, b: LatinSquare) -> tuple[tuple[int, int], tuple[int, int]] | None:
    """Two cells carrying the same symbol pair, or None if the squares are orthogonal."""
    seen: dict[tuple[int, int], tuple[int, int]] = {}
    for i, (ra, rb) in enumerate(zip(a.grid, b.grid), start=1):
        for j, (x, y) in enumerate(zip(ra, rb), start=1):
            if (x, y) in seen:
                return seen[(x, y)], (i, j)
            seen[(x, y)] = (i, j)
    return None


def row_permutation(square: LatinSquare, i: int, j: int) -> Permutation:
    """The permutation sending ``L[i][p]`` to ``L[j][p]`` for every column p."""
    k = square.order
    if not (1 <= i <= k and 1 <= j <= k):
        raise IndexError(f"rows must lie in 1..{k}")
    if i == j:
        raise ValueError("row_permutation needs two distinct rows")
    image = [0] * k
    for a, b in zip(square.grid[i - 1], square.grid[j - 1]):
        image[a - 1] = b
    return Permutation(tuple(image))


def cyclic_square(sigma: Permutation, k: int | None = None) -> LatinSquare:
    """Square with first row 1..k whose next row is always ``sigma`` applied to the previous one."""
    k = sigma.order if k is None else k
    if sigma.order != k or not sigma.is_full_cycle():
        raise ValueError(f"{sigma} is not a {k}-cycle")
    return from_permutations([sigma] * (k - 1))


def from_permutations(sigmas: Sequence[Permutation]) -> LatinSquare:
    """Rows generated downward from the first row 1..k; ``sigmas[m]`` maps row m+1 to row m+2."""
    if not sigmas:
        raise ValueError("need at least one permutation")
    k = sigmas[0].order
    if len(sigmas) != k - 1:
        raise ValueError(f"need {k - 1} permutations for order {k}, got {len(sigmas)}")
    rows = [tuple(range(1, k + 1))]
    for s in sigmas:
        if s.order != k:
            raise ValueError("permutations must all have the same degree")
        rows.append(tuple(s(v) for v in rows[-1]))
    grid = tuple(rows)
    if not is_latin(grid):
        raise LatinError("inconsistent permutation sequence")
    return LatinSquare._trusted(grid)


def cyclic(k: int, step: int = 1) -> LatinSquare:
    """L_sigma for sigma: x -> x + step (mod k), e.g. ``cyclic(5, 4)`` is L_(15432)."""
    images = tuple((i - 1 + step) % k + 1 for i in range(1, k + 1))
    return cyclic_square(Permutation(images), k)


def adjacent_permutations(square: LatinSquare) -> list[Permutation]:
    return [row_permutation(square, i, i + 1) for i in range(1, square.order)]


# ---------------------------------------------------------------------------
# transversals


def _iter_transversal_columns(grid: Grid) -> Iterator[tuple[int, ...]]:
    k = len(grid)
    cols: list[int] = []
    used_cols = [False] * k
    used_vals = [False] * (k + 1)

    def rec(r: int):
        if r == k:
            yield tuple(cols)
            return
        row = grid[r]
        for c in range(k):
            v = row[c]
            if not used_cols[c] and not used_vals[v]:
                used_cols[c] = used_vals[v] = True
                cols.append(c)
                yield from rec(r + 1)
                cols.pop()
                used_cols[c] = used_vals[v] = False

    yield from rec(0)


def find_transversals(square: LatinSquare) -> list[Transversal]:
    """All transversals, ordered lexicographically by the column chosen in each row."""
    return [
        Transversal(tuple((r + 1, c + 1) for r, c in enumerate(cols)))
        for cols in _iter_transversal_columns(square.grid)
    ]


def _exact_covers(k: int, transversals: Sequence[tuple[int, ...]]) -> Iterator[list[int]]:
    """Algorithm X over the k*k cells; yields sorted index lists of k disjoint transversals.

    Columns are chosen by minimum remaining count (ties to the lowest cell),
    rows are tried in transversal order, so the output order is deterministic.
    """
    n = k * k
    cells_of = [tuple(r * k + c for r, c in enumerate(cols)) for cols in transversals]
    by_cell: list[set[int]] = [set() for _ in range(n)]
    for t, cells in enumerate(cells_of):
        for cell in cells:
            by_cell[cell].add(t)
    active_cells = set(range(n))
    chosen: list[int] = []

    def select(t: int) -> list[tuple[int, set[int]]]:
        removed = []
        for cell in cells_of[t]:
            for other in list(by_cell[cell]):
                for c2 in cells_of[other]:
                    if c2 != cell:
                        by_cell[c2].discard(other)
            active_cells.discard(cell)
            removed.append((cell, by_cell[cell]))
        return removed

    def deselect(t: int, removed: list[tuple[int, set[int]]]) -> None:
        for cell, rows in reversed(removed):
            active_cells.add(cell)
            for other in rows:
                for c2 in cells_of[other]:
                    if c2 != cell:
                        by_cell[c2].add(other)

    def rec():
        if not active_cells:
            yield sorted(chosen)
            return
        cell = min(active_cells, key=lambda c: (len(by_cell[c]), c))
        if not by_cell[cell]:
            return
        for t in sorted(by_cell[cell]):
            chosen.append(t)
            removed = select(t)
            yield from rec()
            deselect(t, removed)
            chosen.pop()

    yield from rec()


def iter_decompositions(square: LatinSquare) -> Iterator[tuple[Transversal, ...]]:
    """Every set of k pairwise disjoint transversals, each in transversal order."""
    cols = list(_iter_transversal_columns(square.grid))
    for idx in _exact_covers(square.order, cols):
        yield tuple(Transversal(tuple((r + 1, c + 1) for r, c in enumerate(cols[t]))) for t in idx)


def disjoint_decomposition(square: LatinSquare) -> tuple[Transversal, ...] | None:
    return next(iter_decompositions(square), None)


def mate_from_decomposition(decomposition: Sequence[Transversal], labels: Sequence[int] | None = None) -> LatinSquare:
    """Give the m-th transversal symbol ``labels[m]`` (default m+1)."""
    k = len(decomposition)
    labels = list(range(1, k + 1)) if labels is None else list(labels)
    grid = [[0] * k for _ in range(k)]
    for m, t in enumerate(decomposition):
        for r, c in t.cells:
            grid[r - 1][c - 1] = labels[m]
    return LatinSquare(tuple(map(tuple, grid)))


def orthogonal_mates(square: LatinSquare, reduced_only: bool = True) -> list[LatinSquare]:
    """All orthogonal mates, sorted by flattened grid.

    With ``reduced_only`` one mate per symbol-relabeling class is returned;
    its first row reads 1..k.
    """
    k = square.order
    mates = set()
    for dec in iter_decompositions(square):
        if reduced_only:
            mates.add(mate_from_decomposition(dec))
        else:
            for labels in itertools.permutations(range(1, k + 1)):
                mates.add(mate_from_decomposition(dec, labels))
    return sorted(mates, key=lambda s: s.flat())


def find_mate_direct(square: LatinSquare) -> LatinSquare | None:
    """Search for a mate cell by cell, without transversals.

    Used as an independent check of the transversal route.  The mate's first
    row is fixed to 1..k, which loses nothing since symbols can be relabeled.
    """
    k = square.order
    g = square.grid
    grid = [[0] * k for _ in range(k)]
    row_used = [[False] * (k + 1) for _ in range(k)]
    col_used = [[False] * (k + 1) for _ in range(k)]
    pair_used = [[False] * (k + 1) for _ in range(k + 1)]
    for c in range(k):
        v = c + 1
        grid[0][c] = v
        row_used[0][v] = col_used[c][v] = pair_used[g[0][c]][v] = True

    def rec(pos: int) -> bool:
        if pos == k * k:
            return True
        r, c = divmod(pos, k)
        a = g[r][c]
        for v in range(1, k + 1):
            if row_used[r][v] or col_used[c][v] or pair_used[a][v]:
                continue
            grid[r][c] = v
            row_used[r][v] = col_used[c][v] = pair_used[a][v] = True
            if rec(pos + 1):
                return True
            row_used[r][v] = col_used[c][v] = pair_used[a][v] = False
        grid[r][c] = 0
        return False

    if rec(k):
        return LatinSquare(tuple(map(tuple, grid)))
    return None


# ---------------------------------------------------------------------------
# enumeration

MAX_FULL_ORDER = 6


def enumerate_latin(k: int, reduced: bool = False) -> Iterator[LatinSquare]:
    """Every Latin square of order k once, lexicographic by flattened grid.

    ``reduced`` restricts to squares whose first row and column read 1..k.
    """
    if k < 1:
        raise ValueError("order must be positive")
    if not reduced and k > MAX_FULL_ORDER:
        raise ValueError(f"full enumeration of order {k} is out of reach; use reduced mode or sampling")
    full = (1 << k) - 1
    rows = [0] * k
    cols = [0] * k
    cells = [0] * (k * k)
    fixed = [0] * (k * k)
    if reduced:
        for j in range(k):
            fixed[j] = j + 1
        for i in range(k):
            fixed[i * k] = i + 1

    def rec(pos: int):
        if pos == k * k:
            yield LatinSquare._trusted(tuple(tuple(cells[r * k:(r + 1) * k]) for r in range(k)))
            return
        r, c = divmod(pos, k)
        free = full & ~(rows[r] | cols[c])
        if fixed[pos]:
            v = fixed[pos]
            free &= 1 << (v - 1)
        while free:
            low = free & -free
            free ^= low
            v = low.bit_length()
            rows[r] |= low
            cols[c] |= low
            cells[pos] = v
            yield from rec(pos + 1)
            rows[r] ^= low
            cols[c] ^= low

    yield from rec(0)


def count_latin(k: int, reduced: bool = False) -> int:
    return sum(1 for _ in enumerate_latin(k, reduced))


def parse_square_spec(spec: str) -> LatinSquare:
    """``cyclic:k``, ``cyclic:k:step``, an inline grid ``"123/231/312"`` or ``"1 2 3/2 3 1/..."``, or a file path."""
    from pathlib import Path

    spec = spec.strip()
    if spec.startswith("cyclic:"):
        parts = spec.split(":")
        k = int(parts[1])
        step = int(parts[2]) if len(parts) > 2 else 1
        return cyclic(k, step)
    path = Path(spec)
    if path.exists():
        text = path.read_text()
        if text.lstrip().startswith("{"):
            return LatinSquare.from_json(text)
        return LatinSquare.from_text(text)
    if "/" in spec:
        rows = []
        for chunk in spec.split("/"):
            chunk = chunk.strip()
            rows.append(tuple(int(x) for x in (chunk.split() if " " in chunk else chunk)))
        return LatinSquare(tuple(rows))
    raise ValueError(f"cannot interpret square spec {spec!r}")


def iter_grids(squares: Iterable[LatinSquare]) -> Iterator[Grid]:
    for s in squares:
        yield s.grid
