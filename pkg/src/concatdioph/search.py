"""Exhaustive search for small solutions of both concatenation equations.

Equation 1:  L_n = L_m * b^d + F_k,  d = number of base-b digits of F_k.
Equation 2:  L_n = F_m * b^d + L_k,  d = number of base-b digits of L_k, m >= 1.

The search runs over (k, m) instead of n.  For fixed k the right-hand side
grows with m, so each inner loop stops as soon as it passes L_{n_max}.
"""

from __future__ import annotations

import csv
import importlib.resources
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from . import seqcore
from .bounds import search_window
from .errors import ResourceError, check_base

log = logging.getLogger(__name__)

EQUATIONS = (1, 2)
TABLE_N_MAX = 1500
TABLE_COUNTS = {1: 49, 2: 40}
CSV_FIELDS = ("eq", "b", "n", "m", "k", "d")


class SolutionTuple(NamedTuple):
    eq: int
    n: int
    m: int
    k: int
    b: int
    d: int

    def as_row(self) -> dict:
        return {f: getattr(self, f) for f in CSV_FIELDS}

    def __str__(self) -> str:
        return f"({self.n},{self.m},{self.k},{self.b},{self.d})"


def _sort_key(t: SolutionTuple):
    return (t.eq, t.b, t.n, t.m, t.k)


@dataclass
class SolutionSet:
    eq: int
    b: int
    n_max: int
    tuples: tuple[SolutionTuple, ...] = ()
    trivial: tuple[SolutionTuple, ...] = ()  # eq 2 with m = 0, kept apart

    def __post_init__(self):
        self.tuples = tuple(sorted(set(self.tuples), key=_sort_key))
        self.trivial = tuple(sorted(set(self.trivial), key=_sort_key))

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __contains__(self, t) -> bool:
        return t in self.tuples


def _check_eq(eq) -> None:
    if eq not in EQUATIONS:
        raise ValueError(f"equation must be 1 or 2, got {eq!r}")


def verify_tuple(t: SolutionTuple) -> bool:
    """Check the equation and the digit-length condition exactly."""
    eq, n, m, k, b, d = t
    if eq not in EQUATIONS or min(n, m, k, d) < 0:
        return False
    try:
        check_base(b)
    except ValueError:
        return False
    if eq == 1:
        tail, head = seqcore.fib(k), seqcore.lucas(m)
    else:
        if m < 1:
            return False
        tail, head = seqcore.lucas(k), seqcore.fib(m)
    if seqcore.digit_len(tail, b) != d:
        return False
    return seqcore.lucas(n) == head * b**d + tail


def _search_stripe(eq: int, b: int, n_max: int, ks: Iterable[int]) -> list[SolutionTuple]:
    win = search_window(eq, b, n_max)
    table = seqcore.lucas_table(n_max)
    top = table.values[n_max]
    heads = [seqcore.lucas(m) if eq == 1 else seqcore.fib(m) for m in range(n_max + 5)]
    found = []
    for k in ks:
        tail = seqcore.fib(k) if eq == 1 else seqcore.lucas(k)
        if tail > top:
            break
        d = seqcore.digit_len(tail, b)
        p = b**d
        for m in range(win.m_range.start, win.m_range.stop - k):
            v = heads[m] * p + tail
            if v > top:
                # L_0 = 2 exceeds L_1 = 1, so m = 0 is not yet past the peak
                if m > 0:
                    break
                continue
            n = table.index_of(v, n_max)
            if n is not None:
                found.append(SolutionTuple(eq, n, m, k, b, d))
    return found


def search_solutions(eq: int, b: int, n_max: int, jobs: int = 1,
                     include_trivial: bool = False) -> SolutionSet:
    """All solutions with n <= n_max.

    ``jobs`` > 1 splits the k range into interleaved stripes run in worker
    processes; the merged set does not depend on the split.
    """
    _check_eq(eq)
    check_base(b)
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    ks = search_window(eq, b, n_max).k_range
    if jobs > 1:
        stripes = [ks[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as ex:
            parts = ex.map(_search_stripe, [eq] * jobs, [b] * jobs, [n_max] * jobs, stripes)
            found = [t for part in parts for t in part]
    else:
        found = _search_stripe(eq, b, n_max, ks)
    trivial = ()
    if eq == 2 and include_trivial:
        # F_0 = 0 leaves L_n = L_k, so n = k for every k
        trivial = tuple(SolutionTuple(2, n, 0, n, b, seqcore.digit_len(seqcore.lucas(n), b))
                        for n in range(n_max + 1))
    return SolutionSet(eq, b, n_max, tuple(found), trivial)


def brute_force(eq: int, b: int, n_max: int) -> set[SolutionTuple]:
    """Unpruned search over all m, k <= n_max, for cross-checking small cases."""
    _check_eq(eq)
    check_base(b)
    lucas = {seqcore.lucas(n): n for n in range(n_max, -1, -1)}
    out = set()
    for k in range(n_max + 1):
        tail = seqcore.fib(k) if eq == 1 else seqcore.lucas(k)
        d = seqcore.digit_len(tail, b)
        for m in range(1 if eq == 2 else 0, n_max + 1):
            head = seqcore.lucas(m) if eq == 1 else seqcore.fib(m)
            n = lucas.get(head * b**d + tail)
            if n is not None:
                out.add(SolutionTuple(eq, n, m, k, b, d))
    return out


# embedded tables


def parse_tables(text: str) -> list[SolutionTuple]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ResourceError(f"solutions table must have columns {','.join(CSV_FIELDS)}")
    rows = []
    for i, row in enumerate(reader, start=2):
        try:
            t = SolutionTuple(*(int(row[f]) for f in ("eq", "n", "m", "k", "b", "d")))
        except (TypeError, ValueError) as exc:
            raise ResourceError(f"solutions table line {i}: {exc}") from None
        if not verify_tuple(t):
            raise ResourceError(f"solutions table line {i}: {t} does not satisfy equation {t.eq}")
        rows.append(t)
    return rows


def load_tables(text: Optional[str] = None) -> dict[tuple[int, int], set[SolutionTuple]]:
    """Expected solutions keyed by (eq, b), read from the packaged CSV unless
    ``text`` is given."""
    if text is None:
        try:
            text = importlib.resources.files(__package__).joinpath("data/solutions.csv").read_text()
        except (FileNotFoundError, OSError):
            raise ResourceError("packaged solutions table is missing") from None
    tables = {(eq, b): set() for eq in EQUATIONS for b in range(2, 11)}
    for t in parse_tables(text):
        tables[t.eq, t.b].add(t)
    return tables


@dataclass
class TableDiff:
    eq: int
    b: int
    found: int
    expected: int
    missing: list[SolutionTuple] = field(default_factory=list)  # in table, not found
    extra: list[SolutionTuple] = field(default_factory=list)    # found, not in table

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra


@dataclass
class TableReport:
    n_max: int
    diffs: list[TableDiff]

    @property
    def counts(self) -> dict[int, int]:
        return {eq: sum(d.found for d in self.diffs if d.eq == eq) for eq in EQUATIONS}

    @property
    def ok(self) -> bool:
        if not all(d.ok for d in self.diffs):
            return False
        return self.n_max != TABLE_N_MAX or self.counts == TABLE_COUNTS


def verify_tables(n_max: int = TABLE_N_MAX, text: Optional[str] = None,
                  jobs: int = 1) -> TableReport:
    """Search every (eq, b) and diff against the expected tables.

    With n_max below the table range only tuples with n <= n_max are expected.
    """
    tables = load_tables(text)
    diffs = []
    for (eq, b), expected in sorted(tables.items()):
        expected = {t for t in expected if t.n <= n_max}
        found = set(search_solutions(eq, b, n_max, jobs=jobs).tuples)
        log.info("eq %d b %d: %d found, %d expected", eq, b, len(found), len(expected))
        diffs.append(TableDiff(eq, b, len(found), len(expected),
                               sorted(expected - found, key=_sort_key),
                               sorted(found - expected, key=_sort_key)))
    return TableReport(n_max, diffs)
