"""Certified real arithmetic on decimal-scaled integer enclosures.

An :class:`HPReal` at precision ``P`` stores two integers ``lo <= hi`` and
represents the interval ``[lo * 10**-P, hi * 10**-P]``.  Every operation rounds
outward, so if the inputs contain their true values the output contains the
true result.

Constants and logarithms are computed at ``P + guard`` digits internally and
then rounded outward to ``P``; their width is at most ``10**(-P + 1)``
(guard ``g = 1`` in the width invariant).  Derived quantities accumulate width
in the usual interval-arithmetic way.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import AmbiguityError, EscalationError, check_base

MAX_PREC = 10000
SEARCH_PREC = 128
REDUCTION_PREC = 1200
WIDTH_GUARD = 1

Number = Union[int, Fraction]


@functools.lru_cache(maxsize=64)
def _scale(prec: int) -> int:
    return 10**prec


def _cdiv(a: int, b: int) -> int:
    return -((-a) // b)


def _check_prec(prec: int) -> None:
    if not isinstance(prec, int) or prec < 1:
        raise ValueError(f"precision must be a positive integer, got {prec!r}")
    if prec > MAX_PREC:
        raise EscalationError(f"precision {prec} exceeds the cap of {MAX_PREC} digits")


@dataclass(frozen=True)
class HPReal:
    lo: int
    hi: int
    prec: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure: lo={self.lo} > hi={self.hi}")

    # construction and conversion

    @classmethod
    def exact(cls, x: Number, prec: int) -> "HPReal":
        """Tightest enclosure of a rational number."""
        x = Fraction(x)
        s = _scale(prec) * x.numerator
        return cls(s // x.denominator, _cdiv(s, x.denominator), prec)

    @classmethod
    def hull(cls, a: "HPReal", b: "HPReal") -> "HPReal":
        p = max(a.prec, b.prec)
        a, b = a.at(p), b.at(p)
        return cls(min(a.lo, b.lo), max(a.hi, b.hi), p)

    def at(self, prec: int) -> "HPReal":
        if prec == self.prec:
            return self
        if prec > self.prec:
            f = _scale(prec - self.prec)
            return HPReal(self.lo * f, self.hi * f, prec)
        f = _scale(self.prec - prec)
        return HPReal(self.lo // f, _cdiv(self.hi, f), prec)

    @property
    def lo_q(self) -> Fraction:
        return Fraction(self.lo, _scale(self.prec))

    @property
    def hi_q(self) -> Fraction:
        return Fraction(self.hi, _scale(self.prec))

    @property
    def width(self) -> Fraction:
        return Fraction(self.hi - self.lo, _scale(self.prec))

    @property
    def mid(self) -> Fraction:
        return Fraction(self.lo + self.hi, 2 * _scale(self.prec))

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x: Union[Number, "HPReal"]) -> bool:
        if isinstance(x, HPReal):
            return self.lo_q <= x.lo_q and x.hi_q <= self.hi_q
        x = Fraction(x)
        return self.lo_q <= x <= self.hi_q

    def intersects(self, other: "HPReal") -> bool:
        return self.lo_q <= other.hi_q and other.lo_q <= self.hi_q

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def floor(self) -> int:
        """Common floor of both endpoints; ambiguous enclosures raise."""
        s = _scale(self.prec)
        a, b = self.lo // s, self.hi // s
        if a != b:
            raise AmbiguityError(f"floor is not determined by {self}")
        return a

    def __str__(self) -> str:
        return f"{_fmt(self.lo, self.prec)}..{_fmt(self.hi, self.prec)}@{self.prec}"

    def __repr__(self) -> str:
        return f"HPReal({self})"

    # arithmetic

    def _coerce(self, other) -> tuple["HPReal", "HPReal"]:
        if isinstance(other, HPReal):
            p = max(self.prec, other.prec)
            return self.at(p), other.at(p)
        if isinstance(other, (int, Fraction)):
            return self, HPReal.exact(other, self.prec)
        return NotImplemented, NotImplemented

    def __neg__(self) -> "HPReal":
        return HPReal(-self.hi, -self.lo, self.prec)

    def __abs__(self) -> "HPReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return HPReal(0, max(-self.lo, self.hi), self.prec)

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return HPReal(a.lo + b.lo, a.hi + b.hi, a.prec)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return HPReal(a.lo - b.hi, a.hi - b.lo, a.prec)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            lo, hi = self.lo * other, self.hi * other
            return HPReal(min(lo, hi), max(lo, hi), self.prec)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        prods = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
        s = _scale(a.prec)
        return HPReal(min(prods) // s, _cdiv(max(prods), s), a.prec)

    __rmul__ = __mul__

    def reciprocal(self) -> "HPReal":
        if not self.excludes_zero():
            raise AmbiguityError(f"division by an enclosure containing zero: {self}")
        s2 = _scale(self.prec) ** 2
        return HPReal(s2 // self.hi, _cdiv(s2, self.lo), self.prec)

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            if other > 0:
                return HPReal(self.lo // other, _cdiv(self.hi, other), self.prec)
            return HPReal(self.hi // other, _cdiv(self.lo, other), self.prec)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.reciprocal()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return HPReal.exact(other, self.prec) * self.reciprocal()

    def __pow__(self, k: int) -> "HPReal":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        if k % 2 == 0 and self.lo < 0 < self.hi:
            return HPReal(0, max(-self.lo, self.hi), self.prec) ** k
        result = HPReal.exact(1, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result


def _fmt(v: int, prec: int) -> str:
    sign = "-" if v < 0 else ""
    digits = str(abs(v)).rjust(prec + 1, "0")
    return f"{sign}{digits[:-prec]}.{digits[-prec:]}"


def parse(text: str) -> HPReal:
    """Inverse of ``str(HPReal)`` for debug dumps of the form ``lo..hi@P``."""
    body, prec = text.rsplit("@", 1)
    lo, hi = body.split("..")
    p = int(prec)
    return HPReal(_parse_scaled(lo, p), _parse_scaled(hi, p), p)


def _parse_scaled(s: str, prec: int) -> int:
    neg = s.startswith("-")
    whole, _, frac = s.lstrip("-").partition(".")
    v = int(whole or "0") * _scale(prec) + int(frac.ljust(prec, "0")[:prec] or "0")
    return -v if neg else v


def hp_arith(op: str, x: HPReal, y=None) -> HPReal:
    """Dispatch form of the operator overloads: add, sub, mul, div, neg, pow_int."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "neg":
        return -x
    if op == "pow_int":
        return x**y
    raise ValueError(f"unknown operation {op!r}")


def hp_sqrt(x: HPReal) -> HPReal:
    if x.lo < 0:
        raise AmbiguityError(f"square root of an enclosure reaching below zero: {x}")
    s = _scale(x.prec)
    lo = math.isqrt(x.lo * s)
    hi = math.isqrt(x.hi * s)
    if hi * hi != x.hi * s:
        hi += 1
    return HPReal(lo, hi, x.prec)


# logarithm


def _ln_unit(y: int, w: int, upper: bool) -> int:
    """Bound for ln(y / 10**w) scaled by 10**w, for 10**w <= y <= 2 * 10**w.

    Takes ``r`` square roots to push the argument towards 1, then sums
    ln(v) = 2 atanh(z), z = (v - 1)/(v + 1).  Each step rounds in the direction
    given by ``upper``, and the upper bound adds a bound on the series tail.
    """
    s = _scale(w)
    r = max(4, int(1.5 * math.isqrt(w)))
    for _ in range(r):
        root = math.isqrt(y * s)
        if upper and root * root != y * s:
            root += 1
        y = root
    num, den = (y - s) * s, y + s
    z = _cdiv(num, den) if upper else num // den
    if z <= 0:
        return 0
    z2 = _cdiv(z * z, s) if upper else (z * z) // s
    total, pw, j = 0, z, 1
    while pw:
        total += _cdiv(pw, j) if upper else pw // j
        if upper and pw <= 1:
            break
        pw = _cdiv(pw * z2, s) if upper else (pw * z2) // s
        j += 2
    if upper:
        # remaining terms sum to at most pw * z^2 / (1 - z^2) <= 2 * pw
        total += 2 * pw + 1
    return total << (r + 1)


@functools.lru_cache(maxsize=256)
def _ln2_bounds(w: int) -> tuple[int, int]:
    s = _scale(w)
    return _ln_unit(2 * s, w, False), _ln_unit(2 * s, w, True)


def _ln_rational_bounds(x: Fraction, w: int) -> tuple[int, int]:
    """Integers (lo, hi) with lo <= ln(x) * 10**w <= hi, for rational x > 0."""
    num, den = x.numerator, x.denominator
    e = num.bit_length() - den.bit_length()
    if e >= 0:
        den <<= e
    else:
        num <<= -e
    if num < den:
        num <<= 1
        e -= 1
    # now 1 <= num/den < 2
    s = _scale(w)
    y_lo = max(num * s // den, s)
    y_hi = min(_cdiv(num * s, den), 2 * s)
    lo = _ln_unit(y_lo, w, False)
    hi = _ln_unit(y_hi, w, True)
    if e:
        l2lo, l2hi = _ln2_bounds(w)
        if e > 0:
            lo, hi = lo + e * l2lo, hi + e * l2hi
        else:
            lo, hi = lo + e * l2hi, hi + e * l2lo
    return lo, hi


def _guard_digits(prec: int) -> int:
    r = max(4, int(1.5 * math.isqrt(prec + 20)))
    return 12 + (r + 2) * 30103 // 100000


def hp_ln(x: HPReal) -> HPReal:
    """Outward-rounded enclosure of the natural logarithm."""
    if x.lo <= 0:
        raise AmbiguityError(f"logarithm of an enclosure that is not entirely positive: {x}")
    w = x.prec + _guard_digits(x.prec)
    lo, hi = _ln_rational_bounds(x.lo_q, w)
    if x.hi != x.lo:
        _, hi = _ln_rational_bounds(x.hi_q, w)
    return HPReal(lo, hi, w).at(x.prec)


def _log1m_series(x: int, w: int, upper: bool) -> int:
    """Bound for -ln(1 - x / 10**w) scaled by 10**w, for 0 <= x <= 10**w / 2."""
    s = _scale(w)
    total, pw, j = 0, x, 1
    while pw:
        total += _cdiv(pw, j) if upper else pw // j
        pw = _cdiv(pw * x, s) if upper else (pw * x) // s
        j += 1
        if upper and pw <= 1:
            break
    if upper:
        # tail is at most pw / (1 - x) <= 2 * pw
        total += 2 * pw + 1
    return total


def hp_log1m(x: HPReal) -> HPReal:
    """Enclosure of ln(1 - x) for 0 <= x <= 1/2, summed directly.

    Much faster than ``hp_ln(1 - x)`` when x is small.
    """
    s = _scale(x.prec)
    if x.lo < 0 or 2 * x.hi > s:
        raise ValueError(f"hp_log1m needs 0 <= x <= 1/2, got {x}")
    w = x.prec + 4
    shift = _scale(4)
    lo = -_log1m_series(x.hi * shift, w, True)
    hi = -_log1m_series(x.lo * shift, w, False)
    return HPReal(lo, hi, w).at(x.prec)


def frac_nearest(x: HPReal) -> HPReal:
    """Enclosure of the distance from x to the nearest integer, within [0, 1/2].

    Raises AmbiguityError when the enclosure straddles a half-integer, since the
    nearest integer is then undetermined.
    """
    s = _scale(x.prec)
    n_lo = (2 * x.lo + s) // (2 * s)
    n_hi = (2 * x.hi + s) // (2 * s)
    if n_lo != n_hi:
        raise AmbiguityError(f"nearest integer is ambiguous for {x}; raise the precision")
    return abs(x - n_lo)


# named constants


CONSTANTS = ("alpha", "sqrt5", "ln_alpha", "ln_b", "ln5")


@functools.lru_cache(maxsize=512)
def hp_const(name: str, prec: int, b: int | None = None) -> HPReal:
    """Enclosure of a named constant: alpha, sqrt5, ln_alpha, ln_b (needs b), ln5."""
    _check_prec(prec)
    if name == "sqrt5":
        s = math.isqrt(5 * _scale(2 * prec))
        return HPReal(s, s + 1, prec)
    if name == "alpha":
        w = prec + 2
        r5 = hp_const("sqrt5", w)
        return ((r5 + 1) / 2).at(prec)
    if name == "ln_alpha":
        w = prec + 4
        return hp_ln(hp_const("alpha", w)).at(prec)
    if name == "ln5":
        return hp_ln(HPReal.exact(5, prec))
    if name == "ln_b":
        if b is None:
            raise ValueError("ln_b requires a base")
        check_base(b)
        return hp_ln(HPReal.exact(b, prec))
    raise ValueError(f"unsupported constant {name!r}; expected one of {CONSTANTS}")


# refinable recipes


class Recipe:
    """Something that can be evaluated from scratch at any precision.

    Subclasses are frozen dataclasses so they hash and cache by value.
    """

    def evaluate(self, prec: int) -> HPReal:
        raise NotImplementedError

    def describe(self) -> str:
        return repr(self)


@dataclass(frozen=True)
class Const(Recipe):
    name: str
    b: int | None = None

    def evaluate(self, prec: int) -> HPReal:
        return hp_const(self.name, prec, self.b)

    def describe(self) -> str:
        return f"ln({self.b})" if self.name == "ln_b" else self.name


@dataclass(frozen=True)
class LogRatio(Recipe):
    """ln(b) / ln(alpha), the irrational that drives every reduction."""

    b: int

    def __post_init__(self):
        check_base(self.b)

    def evaluate(self, prec: int) -> HPReal:
        w = prec + 4
        return (hp_const("ln_b", w, self.b) / hp_const("ln_alpha", w)).at(prec)

    def describe(self) -> str:
        return f"ln({self.b})/ln(alpha)"


@dataclass(frozen=True)
class OverLnAlpha(Recipe):
    """c / ln(alpha) for a rational c; the A constants of the reduction lemma."""

    c: Fraction

    def evaluate(self, prec: int) -> HPReal:
        w = prec + 4
        return (HPReal.exact(self.c, w) / hp_const("ln_alpha", w)).at(prec)

    def describe(self) -> str:
        return f"{self.c}/ln(alpha)"


@functools.lru_cache(maxsize=4096)
def _evaluate_cached(recipe: Recipe, prec: int) -> HPReal:
    return recipe.evaluate(prec)


def evaluate(recipe: Recipe, prec: int) -> HPReal:
    _check_prec(prec)
    return _evaluate_cached(recipe, prec)


def refine(recipe: Recipe, prec: int, previous: HPReal | None = None) -> HPReal:
    """Re-evaluate ``recipe`` at a higher precision.

    When ``previous`` is given the new precision must exceed it, and the new
    enclosure must overlap the old one; anything else means a broken recipe.
    """
    if previous is not None and prec <= previous.prec:
        raise ValueError(f"refine needs a precision above {previous.prec}, got {prec}")
    fresh = evaluate(recipe, prec)
    if previous is not None and not fresh.intersects(previous):
        raise ArithmeticError(f"refined enclosure {fresh} is disjoint from {previous}")
    return fresh


def escalate(prec: int) -> int:
    """Next precision in the doubling schedule, or EscalationError at the cap."""
    if prec >= MAX_PREC:
        raise EscalationError(f"precision cap of {MAX_PREC} digits reached")
    return min(2 * prec, MAX_PREC)
