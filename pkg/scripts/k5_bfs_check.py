"""Brute-force check of the order-5 classification.

Runs a plain breadth-first search over every pair reachable by R1-R6 from the
smaller order-5 class, storing states as bytes, and checks the class size and
that the other candidate pair is never reached.  Needs about 1 GB and a few
minutes.
"""

import argparse
import time
from collections import deque

from netforge.combinat import OlsPair, cyclic
from netforge.equivalence import classify_ols


def successors(state: bytes, k: int, rows, cols, transpose):
    n = k * k
    a, b = state[:n], state[n:]
    for perm in rows + cols:
        yield bytes(a[p] for p in perm) + bytes(b[p] for p in perm)
    for s in range(1, k):
        table = bytes(s + 1 if v == s else s if v == s + 1 else v for v in range(256))
        yield a.translate(table) + b
        yield a + b.translate(table)
    ta = bytes(a[p] for p in transpose)
    tb = bytes(b[p] for p in transpose)
    for x, y in ((ta, b), (a, tb)):
        if len({u * 16 + v for u, v in zip(x, y)}) == n:
            yield x + y
    yield b + a


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit", type=int, default=5_000_000)
    args = ap.parse_args()
    k = 5
    n = k * k
    rows, cols = [], []
    for i in range(k - 1):
        swap = {i: i + 1, i + 1: i}
        rows.append(tuple(swap.get(p // k, p // k) * k + p % k for p in range(n)))
        cols.append(tuple(p // k * k + swap.get(p % k, p % k) for p in range(n)))
    transpose = tuple((p % k) * k + p // k for p in range(n))

    report = classify_ols(5)
    sizes = {c.class_id: c.orbit_size for c in report.classes}
    small = min(report.classes, key=lambda c: c.orbit_size)
    start = bytes(small.representative.first.flat() + small.representative.second.flat())

    pa = OlsPair(cyclic(5, 1), cyclic(5, 4))
    pb = OlsPair(cyclic(5, 1), cyclic(5, 3))
    targets = {name: bytes(p.first.flat() + p.second.flat()) for name, p in (("a", pa), ("b", pb))}

    t0 = time.time()
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt in successors(cur, k, rows, cols, transpose):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
        if len(seen) > args.limit:
            raise SystemExit("limit exceeded")
    hit = {name: key in seen for name, key in targets.items()}
    print(f"bfs class size {len(seen)} (reported {small.orbit_size}) in {time.time() - t0:.1f}s")
    print(f"contains pair a: {hit['a']}, contains pair b: {hit['b']}")
    ok = len(seen) == small.orbit_size and hit["a"] != hit["b"] and len(sizes) == 2
    print("consistent" if ok else "MISMATCH")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
