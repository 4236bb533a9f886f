"""Classify OLS_k for k = 3..6 and cross-check the two canonicalization methods.

For k <= 4 the BFS minimum and the group-reduced canonical form are both run
and must give the same classes.  Writes one JSON report per order.
"""

import argparse
import json
import time
from pathlib import Path

from netforge.equivalence import classify_ols


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for k in (3, 4, 5, 6):
        t0 = time.perf_counter()
        result = classify_ols(k, workers=args.workers)
        elapsed = time.perf_counter() - t0
        sizes = [c.orbit_size for c in result.classes]
        print(f"k={k}: {len(sizes)} classes, sizes {sizes}, total {result.total_pairs} ({elapsed:.2f}s)")
        for c in result.classes:
            print(f"    {c.class_id}  rejected moves {dict(sorted(c.rejected_moves.items()))}")
        if k <= 4:
            bfs = classify_ols(k, method="bfs")
            same = [c.representative for c in bfs.classes] == [c.representative for c in result.classes]
            print(f"    bfs and reduced methods agree: {same}")
        note = result.notes.get("resolved_open_bound")
        if note:
            print(f"    {note['pair_a']} and {note['pair_b']} in the same class: {note['same_class']}")
        (args.out / f"classify_k{k}.json").write_text(json.dumps(result.to_json(), indent=2))


if __name__ == "__main__":
    main()
