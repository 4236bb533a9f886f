"""Verdict invariance under R1-R6: random images of every class representative.

Each image is the representative after a random walk of R-moves (rejected
transposes are skipped).  All images of a class must get the same verdict.
"""

import argparse
import random
import time
from collections import Counter

from netforge.equivalence import MoveRejected, apply_pair_move, classify_ols, random_pair_move
from netforge.realization import decide_realizability


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orders", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--images", type=int, default=10)
    ap.add_argument("--walk", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    consistent = True
    for k in args.orders:
        for cls in classify_ols(k).classes:
            outcomes = Counter()
            slowest = 0.0
            for _ in range(args.images):
                pair = cls.representative
                for _ in range(args.walk):
                    try:
                        pair = apply_pair_move(pair, random_pair_move(k, rng))
                    except MoveRejected:
                        pass
                t0 = time.perf_counter()
                outcomes[decide_realizability(pair).outcome] += 1
                slowest = max(slowest, time.perf_counter() - t0)
            consistent &= len(outcomes) == 1
            print(f"k={k} {cls.class_id}: {dict(outcomes)} (slowest {slowest:.2f}s)")
    print("consistent" if consistent else "INCONSISTENT")
    raise SystemExit(0 if consistent else 1)


if __name__ == "__main__":
    main()
