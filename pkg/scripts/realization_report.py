"""Realizability verdicts and the decisive trace steps for the named pairs.

Pairs: (L_(123), L_(132)), (L_1, L_2) of order 4, and the two order-5 pairs
a = (L_(12345), L_(15432)) and b = (L_(12345), L_(14253)).  Prints the
univariate conditions, gcds, resultants and rejected roots; ``--full`` prints
every trace step.  Verdicts are written as JSON.
"""

import argparse
import json
import time
from pathlib import Path

from netforge.combinat import OlsPair, cyclic
from netforge.equivalence import tau_squares
from netforge.net import ols_to_incidence
from netforge.realization import decide_realizability, verify_certificate

KEY_STEPS = {"univariate", "gcd", "resultant", "degenerate", "groebner", "primitive element", "dead", "realizable"}


def named_pairs():
    L1, L2, _ = tau_squares()
    return {
        "k3": OlsPair(cyclic(3, 1), cyclic(3, 2)),
        "k4": OlsPair(L1, L2),
        "k5a": OlsPair(cyclic(5, 1), cyclic(5, 4)),
        "k5b": OlsPair(cyclic(5, 1), cyclic(5, 3)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, pair in named_pairs().items():
        t0 = time.perf_counter()
        v = decide_realizability(pair)
        elapsed = time.perf_counter() - t0
        head = f"{name}: {v.outcome} ({elapsed:.2f}s, {len(v.trace)} trace steps)"
        if v.certificate is not None:
            ok = bool(verify_certificate(v.certificate, ols_to_incidence(pair)))
            head += f", modulus {v.modulus.to_string('x')}, certificate verified {ok}"
        print(head)
        for e in v.trace:
            if args.full or e["step"] in KEY_STEPS:
                print(f"    {e['branch']:<10} {e['step']:<12} {e['detail'][:160]}")
        (args.out / f"realize_{name}.json").write_text(json.dumps(v.to_json(), indent=2))


if __name__ == "__main__":
    main()
