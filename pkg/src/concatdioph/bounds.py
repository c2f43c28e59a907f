"""Explicit upper bounds: Matveev's lower bound, the Guzman-Luca resolution
lemma, the per-lemma bounds for both equations and the desk-search windows.

Everything is evaluated on enclosures at ``BOUNDS_PREC`` digits, which is far
more than order-of-magnitude comparisons need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .errors import HypothesisViolation, check_base
from .hpreal import HPReal, hp_const, hp_ln, hp_sqrt

BOUNDS_PREC = 64

Real = Union[int, Fraction, HPReal]


def _hp(x: Real, prec: int) -> HPReal:
    if isinstance(x, HPReal):
        return x.at(max(prec, x.prec))
    return HPReal.exact(x, prec)


def _ln(x: Real, prec: int = BOUNDS_PREC) -> HPReal:
    return hp_ln(_hp(x, prec))


def _ln_b(b: int, prec: int = BOUNDS_PREC) -> HPReal:
    check_base(b)
    return hp_const("ln_b", prec, b)


def _ln_alpha(prec: int = BOUNDS_PREC) -> HPReal:
    return hp_const("ln_alpha", prec)


@dataclass(frozen=True)
class LinearFormParams:
    """Data for Matveev's theorem: t logarithms in a field of degree D,
    coefficients bounded by B and height caps A_1..A_t."""

    t: int
    D: int
    B: Real
    A: Sequence[Real]

    def __post_init__(self):
        if self.t < 1 or self.D < 1:
            raise HypothesisViolation("need t >= 1 and D >= 1")
        if len(self.A) != self.t:
            raise HypothesisViolation(f"expected {self.t} height caps, got {len(self.A)}")
        if _hp(self.B, BOUNDS_PREC).lo_q < 1:
            raise HypothesisViolation("B must be at least 1")
        for a in self.A:
            if _hp(a, BOUNDS_PREC).lo_q < Fraction(16, 100):
                raise HypothesisViolation(f"height cap {a} is below 0.16")


def matveev_constant(t: int, D: int, A: Sequence[Real], prec: int = BOUNDS_PREC) -> HPReal:
    """1.4 * 30^(t+3) * t^4.5 * D^2 * (1 + log D) * A_1 ... A_t."""
    c = HPReal.exact(Fraction(14, 10) * 30 ** (t + 3) * t**4 * D * D, prec)
    c = c * hp_sqrt(HPReal.exact(t, prec))
    c = c * (1 + _ln(D, prec))
    for a in A:
        c = c * _hp(a, prec)
    return c


def matveev_log_lower(p: LinearFormParams, prec: int = BOUNDS_PREC) -> HPReal:
    """Enclosure of the (negative) lower bound for log|Gamma|."""
    return -(matveev_constant(p.t, p.D, p.A, prec) * (1 + _ln(p.B, prec)))


def guzman_luca(s: int, T: Real, prec: int = BOUNDS_PREC) -> HPReal:
    """2^s * T * (log T)^s, the bound on Z when Z / (log Z)^s < T.

    The lemma needs s >= 1 and T > (4 s^2)^s; both are checked.
    """
    if s < 1:
        raise HypothesisViolation("the lemma needs s >= 1")
    T = _hp(T, prec)
    if not T.lo_q > (4 * s * s) ** s:
        raise HypothesisViolation(f"T must exceed (4 s^2)^s = {(4 * s * s) ** s}, got {T}")
    return (2**s) * T * hp_ln(T) ** s


# Published closed forms, kept as exact rationals.
PAPER_CONSTANTS = {
    "L3.1": Fraction(23, 10) * 10**10,
    "L3.2": Fraction(44, 10) * 10**27,
    "L3.3": Fraction(80, 10) * 10**12,
    "L3.4": Fraction(63, 10) * 10**30,
}
LEMMAS = tuple(PAPER_CONSTANTS)


def lemma_bound(which: str, b: int, aux: Optional[tuple[int, int]] = None,
                prec: int = BOUNDS_PREC) -> HPReal:
    """Right-hand side of the stated lemma bound.

    L3.1: n - k < 2.3e10 log b log(n - m + 2)        (aux = (n, m))
    L3.2: n < 4.4e27 (log b)^4
    L3.3: n - k < 8.0e12 log b (1 + log(n - m + 3))  (aux = (n, m))
    L3.4: n < 6.3e30 (log b)^4
    """
    if which not in PAPER_CONSTANTS:
        raise ValueError(f"unknown lemma {which!r}; expected one of {LEMMAS}")
    lb = _ln_b(b, prec)
    c = PAPER_CONSTANTS[which]
    if which in ("L3.2", "L3.4"):
        return c * lb**4
    if aux is None:
        raise ValueError(f"{which} needs aux = (n, m)")
    n, m = aux
    if which == "L3.1":
        return c * lb * _ln(n - m + 2, prec)
    return c * lb * (1 + _ln(n - m + 3, prec))


# The chain of constants inside the proofs of the four lemmas.


@dataclass(frozen=True)
class ChainConstant:
    name: str
    value: HPReal
    published: Fraction
    note: str

    @property
    def rel_diff(self) -> float:
        return float(abs(self.value.mid - self.published) / self.published)

    def within(self, tol: float) -> bool:
        return self.rel_diff <= tol

    def dominated(self) -> bool:
        """True when the recomputed value does not exceed the published constant."""
        return self.value.hi_q <= self.published


def proof_constants(prec: int = BOUNDS_PREC) -> dict[str, ChainConstant]:
    """Recompute the constants appearing in the four lemma proofs.

    Each value is the coefficient obtained by substituting the heights and the
    auxiliary inequalities quoted with it into Matveev's formula; the notes say
    which inequalities were used.
    """
    la = _ln_alpha(prec)
    ln5 = hp_const("ln5", prec)
    ln2 = _ln(2, prec)
    out = {}

    # L3.1: t=2, A = (2 log b, log alpha); log b factored out and
    # 1 + log B < 2 log B for B = n - m + 2 >= e.
    c = matveev_constant(2, 2, [2, la], prec) * 2
    out["L3.1_matveev"] = ChainConstant(
        "L3.1_matveev", c, Fraction(11, 10) * 10**10,
        "t=2, D=2, A=(2 log b, log alpha), 1+log B < 2 log B")
    out["L3.1_nk"] = ChainConstant(
        "L3.1_nk", c / la, PAPER_CONSTANTS["L3.1"],
        "previous coefficient divided by log alpha")

    # L3.2: t=3, A3 < 2.3e10 log b log(n-m+2), with
    # log(n-m+2) < 3 log n and 1 + log(n+2) < 5 log n.
    a3 = PAPER_CONSTANTS["L3.1"]
    c = matveev_constant(3, 2, [2, la, a3], prec) * 15
    out["L3.2_matveev"] = ChainConstant(
        "L3.2_matveev", c, Fraction(81, 10) * 10**22,
        "t=3, D=2, A=(2 log b, log alpha, 2.3e10 log b log(n-m+2)), "
        "log(n-m+2) < 3 log n, 1+log(n+2) < 5 log n")
    out["L3.2_n"] = ChainConstant(
        "L3.2_n", c / la, Fraction(17, 10) * 10**23,
        "previous coefficient divided by log alpha")

    # L3.3: t=3, A = (2 log b, log 5, log alpha), log b factored out.
    c = matveev_constant(3, 2, [2, ln5, la], prec)
    out["L3.3_matveev"] = ChainConstant(
        "L3.3_matveev", c, Fraction(151, 100) * 10**12,
        "t=3, D=2, A=(2 log b, log 5, log alpha)")

    # L3.4: t=3, A3 = (3(n-k)+8) log alpha + 2 log 2 with
    # 3(n-k)+8 < 4.8e13 log b log n, 1 + log(n+3) < 2 log n.  The additive
    # 2 log 2 is absorbed using log b >= log 2 and log n >= log 1500.
    k48 = Fraction(48, 10) * 10**13
    absorb = 2 * ln2 / (ln2 * _ln(1500, prec))
    a3 = k48 * la + absorb
    c = matveev_constant(3, 2, [2, la, a3], prec) * 2
    out["L3.4_n"] = ChainConstant(
        "L3.4_n", c / la, Fraction(19, 10) * 10**26,
        "t=3, D=2, A=(2 log b, log alpha, (3(n-k)+8) log alpha + 2 log 2), "
        "3(n-k)+8 < 4.8e13 log b log n, 1+log(n+3) < 2 log n, divided by log alpha")
    return out


def tight_lemma32_coefficient(n_min: int = 1500, prec: int = BOUNDS_PREC) -> HPReal:
    """L3.2 coefficient using the sharp factor for n > n_min instead of 3 * 5.

    (1 + log(n+2)) log(n-m+2) <= K (log n)^2 with K = (1 + log(n_min+2)) log(n_min+2) / (log n_min)^2,
    which is decreasing in n.
    """
    la = _ln_alpha(prec)
    l_n = _ln(n_min, prec)
    l_n2 = _ln(n_min + 2, prec)
    K = (1 + l_n2) * l_n2 / (l_n * l_n)
    return matveev_constant(3, 2, [2, la, PAPER_CONSTANTS["L3.1"]], prec) * K


# Search windows


@dataclass(frozen=True)
class SearchWindow:
    """Index ranges for the desk search of one equation in one base.

    Every solution with n <= n_max has k + m < n_max + 5 (from n > k + m - 5),
    and n lies in the open window (k + m - 5, k + m + 7 log b).
    """

    eq: int
    b: int
    n_max: int
    m_range: range = field(init=False)
    k_range: range = field(init=False)

    def __post_init__(self):
        if self.eq not in (1, 2):
            raise ValueError(f"equation must be 1 or 2, got {self.eq!r}")
        check_base(self.b)
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")
        top = self.n_max + 5
        object.__setattr__(self, "m_range", range(1 if self.eq == 2 else 0, top))
        object.__setattr__(self, "k_range", range(0, top))

    @property
    def n_slack(self) -> float:
        return 7 * math.log(self.b)

    def n_window(self, k: int, m: int) -> tuple[int, int]:
        """Inclusive integer range of admissible n for the pair (k, m)."""
        lo = max(0, k + m - 4)
        hi = k + m + math.ceil(self.n_slack) - 1
        return lo, hi

    def d_bounds(self, k: int) -> tuple[Fraction, int]:
        """Open interval for d; holds once k is past the first few indices."""
        if self.eq == 1:
            return Fraction(k - 2, 5), k
        return Fraction(k - 1, 2), k + 2

    def d_cap(self, n: int, m: int) -> int:
        """Strict upper bound on d: n - m + 2 (eq 1) or n - m + 3 (eq 2)."""
        return n - m + (2 if self.eq == 1 else 3)

    def pairs(self) -> Iterator[tuple[int, int]]:
        top = self.n_max + 5
        for k in self.k_range:
            for m in range(self.m_range.start, top - k):
                yield k, m


def search_window(eq: int, b: int, n_max: int) -> SearchWindow:
    return SearchWindow(eq, b, n_max)
