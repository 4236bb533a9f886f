"""Point sets of (4,k)-nets and their correspondence with orthogonal pairs.

Class roles are fixed: class 1 holds the rows, class 2 the columns, class 3
the symbols of the first square and class 4 the symbols of the second.  A
point ``(a1, a2, a3, a4)`` is the common point of line ``a_i`` of each class.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

from .combinat import LatinSquare, OlsPair

CLASS_ROLES = ("rows", "columns", "first symbols", "second symbols")


@dataclass(frozen=True, order=True)
class LineLabel:
    class_index: int
    line_index: int

    def __post_init__(self):
        if not 1 <= self.class_index <= 4:
            raise ValueError(f"class index {self.class_index} outside 1..4")
        if self.line_index < 1:
            raise ValueError(f"line index {self.line_index} must be positive")

    def row(self, k: int) -> int:
        """0-based row of this line in a 4k-row line matrix (blocks of k)."""
        if self.line_index > k:
            raise ValueError(f"line index {self.line_index} outside 1..{k}")
        return (self.class_index - 1) * k + self.line_index - 1


@dataclass(frozen=True, order=True)
class ChiPoint:
    lines: tuple[int, int, int, int]

    def __post_init__(self):
        lines = tuple(self.lines)
        if len(lines) != 4 or any(not isinstance(a, int) or a < 1 for a in lines):
            raise ValueError(f"a point needs four positive line indices, got {self.lines!r}")
        object.__setattr__(self, "lines", lines)

    def labels(self) -> tuple[LineLabel, ...]:
        return tuple(LineLabel(c + 1, a) for c, a in enumerate(self.lines))

    def __iter__(self):
        return iter(self.lines)


class AxiomViolation(ValueError):
    def __init__(self, message: str, classes=None, lines=None):
        super().__init__(message)
        self.classes = classes
        self.lines = lines


@dataclass
class AxiomReport:
    k: int
    checks: dict[str, bool] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def fail(self, axiom: str, message: str, **witness) -> None:
        self.checks[axiom] = False
        self.failures.append({"axiom": axiom, "message": message, **witness})

    def to_json(self) -> dict:
        return {"k": self.k, "ok": self.ok, "checks": self.checks, "failures": self.failures}


@dataclass(frozen=True)
class NetIncidence:
    """A labeled point set.  Construction does not validate; see validate_net_axioms."""

    k: int
    points: tuple[ChiPoint, ...]

    def __post_init__(self):
        pts = tuple(p if isinstance(p, ChiPoint) else ChiPoint(tuple(p)) for p in self.points)
        object.__setattr__(self, "points", pts)

    def sorted(self) -> "NetIncidence":
        return NetIncidence(self.k, tuple(sorted(self.points)))

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {"k": self.k, "points": [list(p.lines) for p in self.points]}

    @classmethod
    def from_json(cls, data) -> "NetIncidence":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["k"]), tuple(ChiPoint(tuple(p)) for p in data["points"]))

    def to_text(self) -> str:
        return "".join(" ".join(map(str, p.lines)) + "\n" for p in self.points)

    @classmethod
    def from_text(cls, text: str, k: int | None = None) -> "NetIncidence":
        pts = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 4:
                raise ValueError(f"expected four columns, got {raw!r}")
            pts.append(ChiPoint(tuple(int(v) for v in parts)))
        if k is None:
            k = max((max(p.lines) for p in pts), default=0)
        return cls(k, tuple(pts))

    @classmethod
    def load(cls, path: str | Path) -> "NetIncidence":
        text = Path(path).read_text()
        if text.lstrip().startswith("{"):
            return cls.from_json(text)
        return cls.from_text(text)


def ols_to_incidence(pair: OlsPair) -> NetIncidence:
    k = pair.order
    a, b = pair.first.grid, pair.second.grid
    pts = sorted(ChiPoint((i + 1, j + 1, a[i][j], b[i][j])) for i in range(k) for j in range(k))
    return NetIncidence(k, tuple(pts))


def validate_net_axioms(net: NetIncidence) -> AxiomReport:
    """Check point count, index ranges and that each pair of classes meets exactly once."""
    k = net.k
    report = AxiomReport(k)
    report.checks = {"point_count": True, "line_range": True, "exactly_one_line": True}
    if len(net.points) != k * k:
        report.fail("point_count", f"expected {k * k} points, found {len(net.points)}", found=len(net.points))
    for p in net.points:
        bad = [c + 1 for c, a in enumerate(p.lines) if not 1 <= a <= k]
        if bad:
            report.fail("line_range", f"point {p.lines} has line indices outside 1..{k}", point=list(p.lines), classes=bad)
    for ci, cj in itertools.combinations(range(4), 2):
        seen: dict[tuple[int, int], int] = {}
        for p in net.points:
            key = (p.lines[ci], p.lines[cj])
            seen[key] = seen.get(key, 0) + 1
        for key, count in sorted(seen.items()):
            if count > 1:
                report.fail(
                    "exactly_one_line",
                    f"lines {key} of classes {ci + 1},{cj + 1} meet in {count} points",
                    classes=[ci + 1, cj + 1], lines=list(key), count=count,
                )
        if len(net.points) == k * k:
            for key in itertools.product(range(1, k + 1), repeat=2):
                if key not in seen:
                    report.fail(
                        "exactly_one_line",
                        f"lines {key} of classes {ci + 1},{cj + 1} share no point",
                        classes=[ci + 1, cj + 1], lines=list(key), count=0,
                    )
    return report


def incidence_to_ols(net: NetIncidence) -> OlsPair:
    report = validate_net_axioms(net)
    if not report.ok:
        first = report.failures[0]
        raise AxiomViolation(first["message"], first.get("classes"), first.get("lines"))
    k = net.k
    a = [[0] * k for _ in range(k)]
    b = [[0] * k for _ in range(k)]
    for p in net.points:
        i, j, x, y = p.lines
        a[i - 1][j - 1] = x
        b[i - 1][j - 1] = y
    return OlsPair(LatinSquare(tuple(map(tuple, a))), LatinSquare(tuple(map(tuple, b))))


def relabel_class(net: NetIncidence, class_index: int, perm: dict[int, int]) -> NetIncidence:
    """Rename the lines of one class by ``perm`` (a bijection on 1..k)."""
    if not 1 <= class_index <= 4:
        raise ValueError("class index must be in 1..4")
    c = class_index - 1
    pts = []
    for p in net.points:
        lines = list(p.lines)
        lines[c] = perm[lines[c]]
        pts.append(ChiPoint(tuple(lines)))
    return NetIncidence(net.k, tuple(sorted(pts)))
