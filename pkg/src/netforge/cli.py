"""Command-line entry point: ``netforge <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 budget or solver guard exceeded,
4 internal invariant violated (or an acceptance criterion failed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .algebra import SystemTooLarge
from .combinat import (
    LatinError,
    OlsPair,
    enumerate_latin,
    find_transversals,
    iter_decompositions,
    orthogonal_mates,
    parse_square_spec,
)
from .equivalence import BudgetExceeded, classify_ols, default_budget, parity_profile
from .net import AxiomViolation, NetIncidence, ols_to_incidence, validate_net_axioms
from .realization import LineMatrix, decide_realizability, hessian_certificate, verify_certificate

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("netforge")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    order: int | None = None
    reduced: bool = False
    budget: int = field(default_factory=default_budget)
    workers: int = 1
    seed: int = 0
    out: Path | None = None
    fmt: str = "json"
    deterministic: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.order is not None and self.order < 1:
            raise InputError("--order must be positive")
        if self.budget < 1:
            raise InputError("--budget must be positive")
        if self.workers < 1:
            raise InputError("--workers must be at least 1")
        if self.fmt not in ("json", "csv", "text"):
            raise InputError(f"unknown format {self.fmt!r}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = {"command", "order", "reduced", "budget", "workers", "seed", "out", "format", "deterministic", "verbose"}
        cfg = cls(
            command=args.command,
            order=getattr(args, "order", None),
            reduced=getattr(args, "reduced", False),
            budget=args.budget if args.budget is not None else default_budget(),
            workers=args.workers,
            seed=args.seed,
            out=Path(args.out) if args.out else None,
            fmt=args.format,
            deterministic=args.deterministic,
            extra={k: v for k, v in vars(args).items() if k not in known},
        )
        cfg.validate()
        return cfg


# ---------------------------------------------------------------------------
# output


def _rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    fields = list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in row.items()})
    return buf.getvalue()


def emit(cfg: RunConfig, report: dict, rows: list[dict], text: str) -> None:
    """Write the report in the chosen format to --out or stdout."""
    if not cfg.deterministic:
        report = {**report, "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    if cfg.fmt == "json":
        body = json.dumps(report, indent=2, sort_keys=False) + "\n"
    elif cfg.fmt == "csv":
        body = _rows_to_csv(rows)
    else:
        body = text.rstrip("\n") + "\n"
    if cfg.out:
        cfg.out.write_text(body)
        log.info("wrote %s", cfg.out)
    else:
        sys.stdout.write(body)


# ---------------------------------------------------------------------------
# commands


def cmd_enumerate(cfg: RunConfig) -> int:
    k = cfg.order
    if k is None:
        raise InputError("--order is required")
    if k > 6 and not cfg.reduced:
        raise InputError(f"full enumeration of order {k} is out of reach; use reduced mode or sampling")
    if k > 6:
        raise InputError("enumeration is supported up to order 6")
    listing = cfg.extra.get("list")
    squares = []
    count = 0
    for sq in enumerate_latin(k, reduced=cfg.reduced):
        count += 1
        if listing:
            squares.append(sq)
    report = {"k": k, "reduced": cfg.reduced, "count": count}
    if listing:
        report["squares"] = [list(map(list, s.grid)) for s in squares]
    rows = [{"k": k, "reduced": cfg.reduced, "count": count}]
    text = str(count)
    if listing:
        text += "\n" + "\n".join(s.to_text() for s in squares)
    emit(cfg, report, rows, text)
    return EXIT_OK


def cmd_mates(cfg: RunConfig) -> int:
    try:
        square = parse_square_spec(cfg.extra["square"])
    except (ValueError, LatinError) as exc:
        raise InputError(f"cannot parse square: {exc}") from exc
    k = square.order
    transversals = find_transversals(square)
    decompositions = sum(1 for _ in iter_decompositions(square))
    mates = orthogonal_mates(square, reduced_only=cfg.reduced)
    report = {
        "k": k,
        "square": [list(r) for r in square.grid],
        "reduced": cfg.reduced,
        "transversals": len(transversals),
        "decompositions": decompositions,
        "mate_count": len(mates),
        "mates": [[list(r) for r in m.grid] for m in mates],
        "parity": parity_profile(square),
    }
    rows = [{"index": n + 1, "mate": "/".join("".join(map(str, r)) for r in m.grid)} for n, m in enumerate(mates)]
    lines = [f"{len(mates)} mates, {len(transversals)} transversals, {decompositions} decompositions"]
    lines += ["/".join("".join(map(str, r)) for r in m.grid) for m in mates]
    emit(cfg, report, rows, "\n".join(lines))
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    k = cfg.order
    if k is None:
        raise InputError("--order is required")
    if k not in (3, 4, 5, 6):
        raise InputError("classification is supported for orders 3 to 6")
    result = classify_ols(k, budget=cfg.budget, workers=cfg.workers, method=cfg.extra.get("method") or "auto")
    report = result.to_json()
    rows = [
        {"class_id": c.class_id, "orbit_size": c.orbit_size, "group_orbits": c.group_orbits,
         "rejected_moves": c.rejected_moves}
        for c in result.classes
    ]
    lines = [f"k={k}: {len(result.classes)} classes, {result.total_pairs} pairs"]
    for c in result.classes:
        lines.append(f"  {c.class_id}  size {c.orbit_size}  rejected {dict(sorted(c.rejected_moves.items()))}")
    note = result.notes.get("resolved_open_bound")
    if note:
        merged = "the same class" if note["same_class"] else "different classes"
        lines.append(f"  {note['pair_a']} and {note['pair_b']} lie in {merged}")
    emit(cfg, report, rows, "\n".join(lines))
    return EXIT_OK


def _load_pair(path: str) -> OlsPair:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not JSON ({exc})") from exc
    try:
        if "points" in data:
            from .net import incidence_to_ols

            return incidence_to_ols(NetIncidence.from_json(data))
        return OlsPair.from_json(data)
    except (KeyError, ValueError, LatinError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_realize(cfg: RunConfig) -> int:
    if cfg.extra.get("pair"):
        pairs = [_load_pair(cfg.extra["pair"])]
        k = pairs[0].order
    elif cfg.order is not None:
        k = cfg.order
        if k not in (3, 4, 5, 6):
            raise InputError("realize --order supports orders 3 to 6")
        pairs = [c.representative for c in classify_ols(k, budget=cfg.budget, workers=cfg.workers).classes]
    else:
        raise InputError("give --order or --pair")
    if k == 6:
        verdicts = [_order6_verdict()]
    else:
        verdicts = [decide_realizability(p, max_branches=cfg.extra["max_branches"], seed=cfg.seed) for p in pairs]
    report = {"k": k, "verdicts": [v.to_json() for v in verdicts]}
    rows = [{"class_id": v.class_id, "outcome": v.outcome,
             "modulus": v.modulus.to_string("x") if v.modulus else "", "reason": v.reason} for v in verdicts]
    lines = []
    for v in verdicts:
        extra = f" over Q[x]/({v.modulus.to_string('x')})" if v.modulus else ""
        lines.append(f"{v.class_id or '-'}: {v.outcome}{extra}{' (' + v.reason + ')' if v.reason else ''}")
        if cfg.extra.get("trace"):
            lines += [f"    {e['branch']} {e['step']} {e['detail']}" for e in v.trace]
    emit(cfg, report, rows, "\n".join(lines))
    if any(v.outcome == "Unknown" for v in verdicts):
        return EXIT_BUDGET
    return EXIT_OK


def _order6_verdict():
    from .realization import RealizationVerdict

    trace = [{"branch": "-", "step": "combinatorial", "detail": "OLS_6 is empty (no order-6 square has a mate)"}]
    return RealizationVerdict("Empty", 6, trace=trace)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not JSON ({exc})") from exc


def cmd_verify(cfg: RunConfig) -> int:
    cert = _load_json(cfg.extra["cert"])
    if "verdicts" in cert:
        cert = cert["verdicts"][0]
    if "certificate" in cert:
        k = cert.get("k")
        cert = {**cert["certificate"], "k": k}
    inc = _load_json(cfg.extra["incidence"])
    try:
        matrix = LineMatrix.from_json(cert)
        net = NetIncidence.from_json(inc) if "points" in inc else ols_to_incidence(OlsPair.from_json(inc))
    except (KeyError, ValueError, LatinError) as exc:
        raise InputError(f"malformed input: {exc}") from exc
    axioms = validate_net_axioms(net)
    if not axioms.ok:
        raise InputError(f"incidence violates the net axioms: {axioms.failures[0]['message']}")
    check = verify_certificate(matrix, net)
    report = {"k": net.k, "pass": check.ok, "problem": check.problem, "witness": check.witness}
    rows = [{"k": net.k, "pass": check.ok, "problem": check.problem}]
    text = "pass" if check.ok else f"fail: {check.problem} {json.dumps(check.witness)}"
    emit(cfg, report, rows, text)
    return EXIT_OK if check.ok else 1


def cmd_export(cfg: RunConfig) -> int:
    what = cfg.extra["what"]
    if what == "hessian":
        report = hessian_certificate().to_json()
    else:
        if cfg.extra.get("square") is None:
            raise InputError("export incidence needs --first and --second square specs")
        try:
            pair = OlsPair(parse_square_spec(cfg.extra["square"]), parse_square_spec(cfg.extra["second"]))
        except (ValueError, LatinError) as exc:
            raise InputError(str(exc)) from exc
        report = ols_to_incidence(pair).to_json()
    cfg.deterministic = True
    if cfg.fmt == "text" and what == "incidence":
        emit(cfg, report, [], NetIncidence.from_json(report).to_text())
    else:
        cfg.fmt = "json"
        emit(cfg, report, [], "")
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    from .acceptance import CRITERIA

    selected = cfg.extra.get("only") or list(CRITERIA)
    results = []
    for n in sorted(selected):
        if n not in CRITERIA:
            raise InputError(f"no acceptance criterion {n}")
        res = CRITERIA[n]()
        results.append(res)
        if cfg.fmt == "text" and not cfg.out:
            print(res.line(), flush=True)
    report = {"criteria": [r.to_json() for r in results], "passed": all(r.passed for r in results)}
    rows = [r.to_json() for r in results]
    if not (cfg.fmt == "text" and not cfg.out):
        emit(cfg, report, rows, "\n".join(r.line() for r in results))
    return EXIT_OK if report["passed"] else EXIT_INTERNAL


COMMANDS = {
    "enumerate": cmd_enumerate,
    "mates": cmd_mates,
    "classify": cmd_classify,
    "realize": cmd_realize,
    "verify": cmd_verify,
    "export": cmd_export,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None,
                        help="orbit state budget (default NETFORGE_BUDGET or 20000000)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp field")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="netforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"netforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="count (and optionally list) Latin squares")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--reduced", action="store_true", help="first row and column fixed to 1..k")
    p.add_argument("--list", action="store_true", help="include every square in the report")

    p = sub.add_parser("mates", parents=[common], help="orthogonal mates of a square")
    p.add_argument("square", help="cyclic:k, cyclic:k:step, inline grid like 123/231/312, or a file")
    p.add_argument("--reduced", action="store_true", help="one mate per symbol relabeling")

    p = sub.add_parser("classify", parents=[common], help="classes of OLS_k under R1-R6")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--method", choices=("auto", "bfs", "reduced"), default="auto")

    p = sub.add_parser("realize", parents=[common], help="decide realizability by lines in CP^2")
    p.add_argument("--order", type=int)
    p.add_argument("--pair", help="JSON file with an OLS pair or an incidence")
    p.add_argument("--max-branches", type=int, default=2000)
    p.add_argument("--trace", action="store_true", help="print the trace in text format")

    p = sub.add_parser("verify", parents=[common], help="check a certificate against an incidence")
    p.add_argument("--cert", required=True)
    p.add_argument("--incidence", required=True)

    p = sub.add_parser("export", parents=[common], help="write the Hessian certificate or an incidence")
    p.add_argument("what", choices=("hessian", "incidence"))
    p.add_argument("--first", dest="square", help="first square spec (incidence)")
    p.add_argument("--second", help="second square spec (incidence)")

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", type=int, action="append", help="run only this criterion (repeatable)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (InputError, AxiomViolation) as exc:
        print(f"netforge {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExceeded, SystemTooLarge) as exc:
        print(f"netforge {args.command}: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as exc:
        print(f"netforge {args.command}: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
