"""Continued-fraction reductions of the Baker-type bounds.

Two engines live here: the Dujella-Petho version of the Baker-Davenport lemma
(:func:`dp_reduce`) and the Legendre criterion (:func:`legendre_amax`,
:func:`legendre_nk_bound`).  :func:`run_scenario` instantiates them with the
exact tau, mu, A, B, M used for each step of the two theorems.
"""

from __future__ import annotations

import functools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Optional

from . import seqcore
from .contfrac import CFExpansion, cf_expand, first_q_exceeding
from .errors import AmbiguityError, EscalationError, check_base
from .hpreal import (
    REDUCTION_PREC,
    Const,
    HPReal,
    LogRatio,
    OverLnAlpha,
    Recipe,
    escalate,
    evaluate,
    frac_nearest,
    hp_const,
    hp_ln,
    hp_log1m,
)

log = logging.getLogger(__name__)

RETRY_BUDGET = 25

M_THM1_STEP1 = 13 * 10**28
M_THM1_STEP2 = 13 * 10**38
M_THM2 = 18 * 10**31

THM1_STEP2_M = range(1, 167)
THM1_STEP2_NK = range(3, 161)
THM2_STEP2_M = range(0, 183)
THM2_STEP2_NK = range(10, 200)

# Values printed in the reduction tables, keyed by base.
PAPER_LEGENDRE_AMAX = {2: 134, 3: 161, 4: 66, 5: 59, 6: 347, 7: 35, 8: 44, 9: 80, 10: 106}
PAPER_THM1_STEP2 = {  # b: (m, n - k, n bound)
    2: (87, 95, 223), 3: (3, 38, 221), 4: (87, 95, 223), 5: (10, 111, 223),
    6: (52, 155, 229), 7: (69, 66, 219), 8: (39, 140, 221), 9: (107, 126, 219),
    10: (2, 66, 220),
}
PAPER_THM2_STEP1 = {2: 173, 3: 171, 4: 169, 5: 171, 6: 175, 7: 171, 8: 171, 9: 171, 10: 177}
PAPER_THM2_STEP2 = {  # b: (m, n - k, n bound)
    2: (1, 200, 210), 3: (1, 201, 211), 4: (1, 201, 210), 5: (1, 201, 214),
    6: (1, 200, 208), 7: (1, 201, 209), 8: (1, 201, 211), 9: (1, 201, 208),
    10: (1, 201, 209),
}
GLOBAL_BOUNDS = {
    "thm1-step1": 161,   # n - k < 161
    "thm1-step2": 229,   # n <= 229
    "thm2-step1": 177,   # n - k < 177
    "thm2-step2": 214,   # n < 214
}
SLACK = 2


# mu recipes


@functools.lru_cache(maxsize=1024)
def _ln_int(v: int, prec: int) -> HPReal:
    return hp_ln(HPReal.exact(v, prec))


@functools.lru_cache(maxsize=1024)
def _ln_one_minus_alpha_pow(nk: int, over_sqrt5: bool, prec: int) -> HPReal:
    # ln(1 - alpha^(-nk) / sqrt5) or ln(1 - alpha^(-nk))
    w = prec + 10
    x = hp_const("alpha", w) ** (-nk)
    if over_sqrt5:
        x = x / hp_const("sqrt5", w)
    return hp_log1m(x).at(prec)


@functools.lru_cache(maxsize=64)
def _inv_ln_alpha(prec: int) -> HPReal:
    return hp_const("ln_alpha", prec).reciprocal()


@dataclass(frozen=True)
class MuThm1Step2(Recipe):
    """log(L_m / (1 - alpha^(k-n)/sqrt5)) / log(alpha), with nk = n - k."""

    m: int
    nk: int

    def evaluate(self, prec: int) -> HPReal:
        w = prec + 6
        num = _ln_int(seqcore.lucas(self.m), w) - _ln_one_minus_alpha_pow(self.nk, True, w)
        return (num * _inv_ln_alpha(w)).at(prec)

    def describe(self) -> str:
        return f"log(L_{self.m}/(1-alpha^-{self.nk}/sqrt5))/log(alpha)"


@dataclass(frozen=True)
class MuThm2Step1(Recipe):
    """log(1/sqrt5) / log(alpha)."""

    def evaluate(self, prec: int) -> HPReal:
        w = prec + 6
        return (-_ln_int(5, w) / 2 * _inv_ln_alpha(w)).at(prec)

    def describe(self) -> str:
        return "log(1/sqrt5)/log(alpha)"


@dataclass(frozen=True)
class MuThm2Step2(Recipe):
    """log(F_m / (1 - alpha^(k-n))) / log(alpha), with nk = n - k."""

    m: int
    nk: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("F_0 = 0 has no logarithm; m = 0 is the trivial family")

    def evaluate(self, prec: int) -> HPReal:
        w = prec + 6
        num = _ln_int(seqcore.fib(self.m), w) - _ln_one_minus_alpha_pow(self.nk, False, w)
        return (num * _inv_ln_alpha(w)).at(prec)

    def describe(self) -> str:
        return f"log(F_{self.m}/(1-alpha^-{self.nk}))/log(alpha)"


def mu_expr(which: str, m: Optional[int] = None, nk: Optional[int] = None) -> Recipe:
    """The mu recipe of a scenario, validated against the scenario grid."""
    which = _norm(which)
    if which == "thm2-step1":
        return MuThm2Step1()
    if m is None or nk is None:
        raise ValueError(f"{which} needs m and n - k")
    if which == "thm1-step2":
        if m not in THM1_STEP2_M or nk not in THM1_STEP2_NK:
            raise ValueError(f"thm1-step2 needs 1 <= m <= 166 and 3 <= n-k < 161, got m={m}, n-k={nk}")
        return MuThm1Step2(m, nk)
    if which == "thm2-step2":
        if m not in THM2_STEP2_M or nk not in THM2_STEP2_NK:
            raise ValueError(f"thm2-step2 needs 0 <= m <= 182 and 10 <= n-k <= 199, got m={m}, n-k={nk}")
        return MuThm2Step2(m, nk)
    raise ValueError(f"no mu for scenario {which!r}")


# engines


@dataclass(frozen=True)
class DPParams:
    tau: Recipe
    mu: Recipe
    A: Recipe
    B: Recipe
    M: int

    def __post_init__(self):
        if self.M <= 1:
            raise ValueError("M must exceed 1")


@dataclass(frozen=True)
class ReductionOutcome:
    status: str                  # success | eps_nonpositive | exhausted
    method: str                  # dujella-petho | legendre
    conv_index: Optional[int] = None
    q: Optional[int] = None
    eps: Optional[HPReal] = None
    w_bound: Optional[int] = None
    a_max: Optional[int] = None
    prec: Optional[int] = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "success"


@functools.lru_cache(maxsize=256)
def _expansion(tau: Recipe, q_exceeds: int, extra: int) -> CFExpansion:
    return cf_expand(tau, q_exceeds=q_exceeds, extra_terms=extra)


W_BOUND_PREC = 80


@functools.lru_cache(maxsize=64)
def _ln_recipe(r: Recipe, prec: int) -> HPReal:
    return hp_ln(evaluate(r, prec))


def _w_bound(p: DPParams, q: int, eps_lo: Fraction) -> int:
    # the logarithm only needs a few digits past q's size
    prec = W_BOUND_PREC + len(str(q))
    A = evaluate(p.A, prec)
    x = hp_ln(A * q / HPReal.exact(eps_lo, prec)) / _ln_recipe(p.B, prec)
    return x.hi_q.__floor__()


def dp_reduce(p: DPParams, prec: int = REDUCTION_PREC, retries: int = RETRY_BUDGET) -> ReductionOutcome:
    """Dujella-Petho reduction.

    Starts at the first convergent with q > 6M and computes
    eps = ||mu q|| - M ||tau q|| on enclosures.  An enclosure that is entirely
    positive gives w <= floor(log(A q / eps_lo) / log B).  An undecided sign
    or nearest integer raises the precision; a nonpositive eps moves on to
    the next convergent, at most ``retries`` times.
    """
    try:
        cf = _expansion(p.tau, 6 * p.M, retries)
    except EscalationError as exc:
        return ReductionOutcome("exhausted", "dujella-petho", prec=prec, note=str(exc))
    i0 = first_q_exceeding(cf, 6 * p.M)
    while True:
        try:
            return _dp_scan(p, cf, i0, prec, retries)
        except AmbiguityError as exc:
            log.debug("dp_reduce at %d digits: %s", prec, exc)
            prec = escalate(prec)


def _dp_scan(p: DPParams, cf: CFExpansion, i0: int, prec: int, retries: int) -> ReductionOutcome:
    tau, mu = evaluate(p.tau, prec), evaluate(p.mu, prec)
    eps = None
    for i in range(i0, min(i0 + retries + 1, len(cf.q))):
        q = cf.q[i]
        eps = frac_nearest(mu * q) - p.M * frac_nearest(tau * q)
        if eps.is_positive():
            return ReductionOutcome("success", "dujella-petho", i, q, eps,
                                    _w_bound(p, q, eps.lo_q), prec=prec)
        if eps.hi > 0:
            raise AmbiguityError(f"sign of eps undecided at convergent {i}: {eps}")
    return ReductionOutcome("eps_nonpositive", "dujella-petho", i, q, eps, prec=prec,
                            note=f"eps <= 0 for {retries + 1} convergents from index {i0}")


def legendre_amax(tau: Recipe, M: int) -> tuple[int, int]:
    """Largest partial quotient among a_0..a_N, N the first index with q_N > M."""
    cf = _expansion(tau, M, 0)
    N = first_q_exceeding(cf, M)
    return max(cf.quotients[: N + 1]), N


def legendre_nk_bound_value(b: int, M: int, a_max: int, prec: int = 64) -> HPReal:
    """log(7 b (a_max + 2) M) / log(alpha) as an enclosure."""
    check_base(b)
    return hp_ln(HPReal.exact(7 * b * (a_max + 2) * M, prec)) / hp_const("ln_alpha", prec)


def legendre_nk_bound(b: int, M: int, a_max: int) -> int:
    """Integer X with n - k < X, namely the ceiling of log(7 b (a_max+2) M) / log(alpha)."""
    v = legendre_nk_bound_value(b, M, a_max)
    return -int((-v.hi_q) // 1)


# Degenerate mu: when mu = c tau + e exactly, eps <= 0 for every convergent and
# the inequality |u tau - v + mu| < A B^-w collapses to |(u+c) tau - (v-e)| < A B^-w,
# which the Legendre criterion handles.


class _QSqrt5:
    """Exact element x + y sqrt5 of Q(sqrt5)."""

    __slots__ = ("x", "y")

    def __init__(self, x, y=0):
        self.x, self.y = Fraction(x), Fraction(y)

    def __mul__(self, o):
        return _QSqrt5(self.x * o.x + 5 * self.y * o.y, self.x * o.y + self.y * o.x)

    def inv(self):
        n = self.x * self.x - 5 * self.y * self.y
        return _QSqrt5(self.x / n, -self.y / n)

    def __sub__(self, o):
        return _QSqrt5(self.x - o.x, self.y - o.y)

    def __eq__(self, o):
        return self.x == o.x and self.y == o.y

    @staticmethod
    def alpha_pow(e: int) -> "_QSqrt5":
        # alpha^e = (L_e + F_e sqrt5) / 2, and alpha^-e = (-1)^e (L_e - F_e sqrt5) / 2
        a = abs(e)
        L, F = seqcore.lucas(a), seqcore.fib(a)
        if e >= 0:
            return _QSqrt5(Fraction(L, 2), Fraction(F, 2))
        s = -1 if a % 2 else 1
        return _QSqrt5(Fraction(s * L, 2), Fraction(-s * F, 2))


def _mu_argument(mu: Recipe) -> Optional[_QSqrt5]:
    """The algebraic number whose log / log(alpha) is mu, when known exactly."""
    if isinstance(mu, MuThm2Step2):
        return _QSqrt5(seqcore.fib(mu.m)) * (_QSqrt5(1) - _QSqrt5.alpha_pow(-mu.nk)).inv()
    if isinstance(mu, MuThm1Step2):
        inv_sqrt5 = _QSqrt5(0, Fraction(1, 5))
        return _QSqrt5(seqcore.lucas(mu.m)) * (_QSqrt5(1) - _QSqrt5.alpha_pow(-mu.nk) * inv_sqrt5).inv()
    if isinstance(mu, MuThm2Step1):
        return _QSqrt5(0, Fraction(1, 5))
    return None


def find_linear_relation(mu: Recipe, b: int, max_c: int = 64, prec: int = 200) -> Optional[tuple[int, int]]:
    """(c, e) with mu = c * log b / log alpha + e proved exactly, or None.

    Candidates come from the numerics; the identity X = b^c alpha^e is then
    checked in exact arithmetic on Q(sqrt5).
    """
    X = _mu_argument(mu)
    if X is None:
        return None
    tau_v, mu_v = evaluate(LogRatio(b), prec), evaluate(mu, prec)
    tiny = Fraction(1, 10 ** (prec // 2))
    for c in range(-max_c, max_c + 1):
        r = mu_v - tau_v * c
        try:
            d = frac_nearest(r)
        except AmbiguityError:
            continue
        if d.hi_q > tiny:
            continue
        e = int((r.mid + Fraction(1, 2)) // 1)
        rhs = _QSqrt5(Fraction(b) ** c) * _QSqrt5.alpha_pow(e)
        if X == rhs:
            return c, e
    return None


def legendre_fallback(p: DPParams, b: int) -> Optional[ReductionOutcome]:
    rel = find_linear_relation(p.mu, b)
    if rel is None:
        return None
    c, e = rel
    cap = p.M + abs(c)
    a_max, N = legendre_amax(p.tau, cap)
    prec = 64
    A, B = evaluate(p.A, prec), evaluate(p.B, prec)
    # 1/((a_max+2) u) < |u tau - v| < A B^-w with 0 < u < cap
    x = hp_ln(A * ((a_max + 2) * cap)) / hp_ln(B)
    w = x.hi_q.__floor__()
    cf = _expansion(p.tau, cap, 0)
    return ReductionOutcome("success", "legendre", N, cf.q[N], None, w, a_max, prec,
                            note=f"mu = {c} tau + {e} exactly")


# scenarios


SCENARIOS = ("thm1-step1", "thm1-step2", "thm2-step1", "thm2-step2")


def _norm(kind: str) -> str:
    k = kind.replace("_", "-")
    if k == "thm1-step1-legendre":
        k = "thm1-step1"
    if k.endswith("-dp"):
        k = k[:-3]
    return k


@dataclass(frozen=True)
class ScenarioId:
    kind: str
    b: int
    m: Optional[int] = None
    nk: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", _norm(self.kind))
        if self.kind not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.kind!r}; expected one of {SCENARIOS}")
        check_base(self.b)
        if self.kind.endswith("step2"):
            mu_expr(self.kind, self.m, self.nk)

    @property
    def paper_bound(self) -> int:
        """The table value for this scenario, or the global bound for other grid cells."""
        if self.kind == "thm1-step1":
            return GLOBAL_BOUNDS["thm1-step1"]
        if self.kind == "thm2-step1":
            return PAPER_THM2_STEP1[self.b]
        table = PAPER_THM1_STEP2 if self.kind == "thm1-step2" else PAPER_THM2_STEP2
        m, nk, bound = table[self.b]
        if (self.m, self.nk) == (m, nk):
            return bound
        return GLOBAL_BOUNDS[self.kind]


def scenario_params(s: ScenarioId) -> DPParams:
    tau = LogRatio(s.b)
    alpha = Const("alpha")
    if s.kind == "thm1-step2":
        return DPParams(tau, mu_expr(s.kind, s.m, s.nk), OverLnAlpha(Fraction(6)), alpha, M_THM1_STEP2)
    if s.kind == "thm2-step1":
        return DPParams(tau, mu_expr(s.kind), OverLnAlpha(Fraction(18)), alpha, M_THM2)
    if s.kind == "thm2-step2":
        return DPParams(tau, mu_expr(s.kind, s.m, s.nk), OverLnAlpha(Fraction(12)), alpha, M_THM2)
    raise ValueError(f"{s.kind} is not a Dujella-Petho scenario")


def run_scenario(s: ScenarioId, prec: int = REDUCTION_PREC) -> ReductionOutcome:
    if s.kind == "thm1-step1":
        tau = LogRatio(s.b)
        a_max, N = legendre_amax(tau, M_THM1_STEP1)
        cf = _expansion(tau, M_THM1_STEP1, 0)
        return ReductionOutcome("success", "legendre", N, cf.q[N], None,
                                legendre_nk_bound(s.b, M_THM1_STEP1, a_max), a_max, prec)
    p = scenario_params(s)
    out = dp_reduce(p, prec)
    if out.status == "eps_nonpositive":
        fallback = legendre_fallback(p, s.b)
        if fallback is not None:
            return replace(fallback, note=f"{fallback.note}; Dujella-Petho gave eps <= 0")
    return out


def grid_cells(kind: str, b: int) -> Iterator[ScenarioId]:
    kind = _norm(kind)
    if kind == "thm1-step2":
        ms, nks = THM1_STEP2_M, THM1_STEP2_NK
    elif kind == "thm2-step2":
        # m = 0 makes F_m = 0: that is the trivial family n = k, not a grid cell
        ms, nks = range(1, THM2_STEP2_M.stop), THM2_STEP2_NK
    else:
        raise ValueError(f"{kind} has no grid")
    for m in ms:
        for nk in nks:
            yield ScenarioId(kind, b, m, nk)


def _run_cell(args) -> ReductionOutcome:
    cell, prec = args
    return run_scenario(cell, prec)


def run_grid(kind: str, b: int, prec: int = REDUCTION_PREC,
             jobs: int = 1) -> Iterator[tuple[ScenarioId, ReductionOutcome]]:
    """Outcomes for every grid cell of one base, in grid order."""
    cells = list(grid_cells(kind, b))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            yield from zip(cells, ex.map(_run_cell, [(c, prec) for c in cells], chunksize=64))
    else:
        for cell in cells:
            yield cell, run_scenario(cell, prec)


def grid_max(kind: str, bases=range(2, 11), prec: int = REDUCTION_PREC, jobs: int = 1):
    """Per base: (best, number of cells, failed cells), where best is
    (largest w bound, its cell, its outcome)."""
    summary = {}
    for b in bases:
        best, failed, n = None, [], 0
        for cell, out in run_grid(kind, b, prec, jobs):
            n += 1
            if not out.ok:
                failed.append(cell)
            elif best is None or out.w_bound > best[0]:
                best = (out.w_bound, cell, out)
        summary[b] = (best, n, failed)
    return summary
