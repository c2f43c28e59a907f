"""Command-line front end.

Every command writes JSON lines of the form
{command, params, result, paper_expectation, ok}; ``search --format csv``
writes CSV rows instead.  Exit status: 0 when every checked expectation
holds, 1 when one is violated, 2 for bad flags, 3 when a reduction ends in
eps_nonpositive or exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import threading
from fractions import Fraction
from typing import Any, Optional

from . import bounds, contfrac, reduction, search
from .errors import ResourceError
from .hpreal import HPReal, LogRatio, REDUCTION_PREC

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_REDUCTION = 0, 1, 2, 3
PREC_FLOOR = 64
PREC_ENV = "CONCATDIOPH_PREC"

log = logging.getLogger("concatdioph")


class Writer:
    """Serializes output lines so records never interleave."""

    def __init__(self, stream=None):
        self.stream = stream or sys.stdout
        self._lock = threading.Lock()

    def line(self, text: str) -> None:
        with self._lock:
            self.stream.write(text + "\n")
            self.stream.flush()

    def record(self, command: str, params: dict, result: Any,
               paper_expectation: Any = None, ok: bool = True) -> None:
        rec = {"command": command, "params": params, "result": result,
               "paper_expectation": paper_expectation, "ok": bool(ok)}
        self.line(json.dumps(rec, default=_json_default))


def _json_default(o):
    if isinstance(o, Fraction):
        return float(o)
    if isinstance(o, HPReal):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _sci(x: Fraction, digits: int = 20) -> str:
    """Exact rational in scientific notation, truncated to ``digits`` digits."""
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    e = len(str(x.numerator)) - len(str(x.denominator))
    if Fraction(10) ** e > x:
        e -= 1
    mant = x / Fraction(10) ** (e - digits + 1)
    m = str(mant.numerator // mant.denominator)
    return f"{sign}{m[0]}.{m[1:]}e{e:+d}"


# argument types


def _base(text: str) -> int:
    try:
        b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"base must be an integer in 2..10, got {text!r}") from None
    if not 2 <= b <= 10:
        raise argparse.ArgumentTypeError(f"base must be in 2..10, got {b}")
    return b


def _bases(text: str) -> list[int]:
    if text == "all":
        return list(range(2, 11))
    return [_base(text)]


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _prec(text: str) -> int:
    v = _nonneg(text)
    if v < PREC_FLOOR:
        raise argparse.ArgumentTypeError(f"precision must be at least {PREC_FLOOR} digits, got {v}")
    return v


def default_prec() -> int:
    env = os.environ.get(PREC_ENV)
    if not env:
        return REDUCTION_PREC
    try:
        return _prec(env)
    except argparse.ArgumentTypeError as exc:
        raise SystemExit(f"{PREC_ENV}: {exc}") from None


# commands


def cmd_search(args, out: Writer) -> int:
    rows = []
    for b in args.base:
        sols = search.search_solutions(args.eq, b, args.nmax, jobs=args.jobs,
                                       include_trivial=args.trivial)
        rows.extend((t, False) for t in sols.tuples)
        rows.extend((t, True) for t in sols.trivial)
    if args.format == "csv":
        w = csv.writer(out.stream, lineterminator="\n")
        w.writerow(search.CSV_FIELDS + (("trivial",) if args.trivial else ()))
        for t, triv in rows:
            w.writerow([getattr(t, f) for f in search.CSV_FIELDS] + ([int(triv)] if args.trivial else []))
        return EXIT_OK
    params = {"eq": args.eq, "nmax": args.nmax}
    for t, triv in rows:
        result = dict(t.as_row(), verified=search.verify_tuple(t))
        if args.trivial:
            result["trivial"] = triv
        out.record("search", dict(params, base=t.b), result)
    return EXIT_OK


def _outcome_result(cell: reduction.ScenarioId, o: reduction.ReductionOutcome) -> dict:
    res = {
        "scenario": cell.kind, "b": cell.b, "m": cell.m, "nk": cell.nk,
        "status": o.status, "method": o.method, "conv_index": o.conv_index,
        "q": str(o.q) if o.q is not None else None,
        "eps_lo": _sci(o.eps.lo_q) if o.eps is not None else None,
        "eps_hi": _sci(o.eps.hi_q) if o.eps is not None else None,
        "bound": o.w_bound, "a_max": o.a_max, "prec": o.prec,
    }
    if o.note:
        res["note"] = o.note
    return res


def _judge(cell: reduction.ScenarioId, o: reduction.ReductionOutcome) -> tuple[dict, bool]:
    """The table expectation for a cell and whether the outcome meets it."""
    expect = {"paper_bound": cell.paper_bound, "slack": reduction.SLACK}
    ok = o.ok and o.w_bound <= cell.paper_bound + reduction.SLACK
    if cell.kind == "thm1-step1":
        expect = {"paper_bound": cell.paper_bound, "a_max": reduction.PAPER_LEGENDRE_AMAX[cell.b]}
        ok = o.ok and o.w_bound <= cell.paper_bound and o.a_max == expect["a_max"]
    return expect, ok


def cmd_reduce(args, out: Writer) -> int:
    kind = reduction._norm(args.scenario)
    has_grid = kind in ("thm1-step2", "thm2-step2")
    if args.grid and not has_grid:
        raise ValueError(f"{kind} has no grid")
    if has_grid and not args.grid and (args.m is None or args.nk is None):
        raise ValueError(f"{kind} needs --m and --nk, or --grid")
    status = EXIT_OK
    params = {"scenario": kind, "prec": args.prec}
    for b in args.base:
        if args.grid:
            cells = reduction.run_grid(kind, b, args.prec, jobs=args.jobs)
        else:
            cell = reduction.ScenarioId(kind, b, args.m, args.nk)
            cells = [(cell, reduction.run_scenario(cell, args.prec))]
        for cell, o in cells:
            res = _outcome_result(cell, o)
            expect, ok = _judge(cell, o)
            res["paper_bound"], res["ok"] = expect["paper_bound"], ok
            out.record("reduce", dict(params, base=b, m=cell.m, nk=cell.nk), res, expect, ok)
            if not o.ok:
                status = EXIT_REDUCTION
            elif not ok and status == EXIT_OK:
                status = EXIT_VIOLATED
    return status


def cmd_bounds(args, out: Writer) -> int:
    status = EXIT_OK
    chain = bounds.proof_constants()
    for b in args.base:
        aux = None
        if args.lemma in ("L3.1", "L3.3"):
            if args.n is None or args.m is None:
                raise ValueError(f"{args.lemma} needs --n and --m")
            aux = (args.n, args.m)
        v = bounds.lemma_bound(args.lemma, b, aux)
        paper = bounds.PAPER_CONSTANTS[args.lemma]
        lb = bounds._ln_b(b)
        if args.lemma == "L3.2":
            # Z / (log Z)^2 < T with T = 1.7e23 (log b)^2, solved for Z
            closed = bounds.guzman_luca(2, chain["L3.2_n"].published * lb**2)
            satisfied = closed.hi_q <= v.lo_q
        elif args.lemma == "L3.4":
            closed = bounds.guzman_luca(2, chain["L3.4_n"].published * lb**2)
            satisfied = closed.hi_q <= v.lo_q
        elif args.lemma == "L3.1":
            closed = chain["L3.1_nk"].value
            satisfied = chain["L3.1_nk"].dominated()
        else:
            closed = chain["L3.3_matveev"].value
            satisfied = chain["L3.3_matveev"].dominated()
        res = {"lemma": args.lemma, "b": b, "value_lo": _sci(v.lo_q), "value_hi": _sci(v.hi_q),
               "paper_constant": _sci(paper), "satisfied": satisfied}
        expect = {"derived_lo": _sci(closed.lo_q), "derived_hi": _sci(closed.hi_q)}
        out.record("bounds", {"lemma": args.lemma, "base": b, "n": args.n, "m": args.m},
                   res, expect, satisfied)
        if not satisfied:
            status = EXIT_VIOLATED
    return status


def cmd_cf(args, out: Writer) -> int:
    for b in args.base:
        cf = contfrac.cf_expand(LogRatio(b), max_terms=args.terms, prec=args.prec)
        res = {"b": b, "tau": cf.tau.describe(), "quotients": list(cf.quotients),
               "convergents": [[str(p), str(q)] for p, q in zip(cf.p, cf.q)], "prec": cf.prec}
        out.record("cf", {"base": b, "terms": args.terms, "prec": args.prec}, res)
    return EXIT_OK


def cmd_verify_tables(args, out: Writer) -> int:
    rep = search.verify_tables(args.nmax, jobs=args.jobs)
    diffs = [{"eq": d.eq, "b": d.b, "found": d.found, "expected": d.expected,
              "missing": [str(t) for t in d.missing], "extra": [str(t) for t in d.extra]}
             for d in rep.diffs]
    res = {"nmax": args.nmax, "counts": rep.counts, "total": sum(rep.counts.values()), "diffs": diffs}
    expect = search.TABLE_COUNTS if args.nmax == search.TABLE_N_MAX else None
    out.record("verify-tables", {"nmax": args.nmax}, res, expect, rep.ok)
    return EXIT_OK if rep.ok else EXIT_VIOLATED


# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="concatdioph",
                                description="Lucas numbers as concatenations of Fibonacci and Lucas numbers.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="log to stderr (-vv for debug)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="exhaustive search for n <= nmax")
    s.add_argument("--eq", type=int, choices=(1, 2), required=True)
    s.add_argument("--base", type=_bases, default=_bases("all"), help="2..10 or 'all' (default)")
    s.add_argument("--nmax", type=_nonneg, default=search.TABLE_N_MAX)
    s.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    s.add_argument("--trivial", action="store_true", help="also emit the m = 0 family of equation 2")
    s.add_argument("--jobs", type=_positive, default=1)
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("reduce", help="run a reduction scenario")
    r.add_argument("--scenario", required=True,
                   choices=reduction.SCENARIOS + tuple(x.replace("-", "_") for x in reduction.SCENARIOS))
    r.add_argument("--base", type=_bases, required=True, help="2..10 or 'all'")
    r.add_argument("--m", type=_nonneg)
    r.add_argument("--nk", type=_positive, help="n - k")
    r.add_argument("--grid", action="store_true", help="sweep the full (m, n - k) grid; slow")
    r.add_argument("--prec", type=_prec, default=None, help=f"digits (default {REDUCTION_PREC} or ${PREC_ENV})")
    r.add_argument("--jobs", type=_positive, default=1)
    r.set_defaults(func=cmd_reduce)

    b = sub.add_parser("bounds", help="evaluate a lemma bound")
    b.add_argument("--lemma", choices=bounds.LEMMAS, required=True)
    b.add_argument("--base", type=_bases, required=True, help="2..10 or 'all'")
    b.add_argument("--n", type=_nonneg)
    b.add_argument("--m", type=_nonneg)
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("cf", help="certified continued fraction of log b / log alpha")
    c.add_argument("--base", type=_bases, required=True, help="2..10 or 'all'")
    c.add_argument("--terms", type=_positive, default=20)
    c.add_argument("--prec", type=_prec, default=None)
    c.set_defaults(func=cmd_cf)

    v = sub.add_parser("verify-tables", help="diff the search against the expected tables")
    v.add_argument("--nmax", type=_nonneg, default=search.TABLE_N_MAX)
    v.add_argument("--jobs", type=_positive, default=1)
    v.set_defaults(func=cmd_verify_tables)
    return p


def main(argv: Optional[list[str]] = None, stream=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command == "reduce" and args.prec is None:
        args.prec = default_prec()
    out = Writer(stream)
    try:
        return args.func(args, out)
    except (ValueError, ResourceError) as exc:
        print(f"concatdioph {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); stop quietly
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
