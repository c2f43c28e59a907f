"""Independent reference values: mpmath at extra precision, and a Decimal
exp-series bisection that shares no code with the package."""

from decimal import Decimal, localcontext
from fractions import Fraction

import mpmath


def encloses(x, value, dps=None) -> bool:
    """True when the HPReal x contains the mpmath value (compared exactly)."""
    dps = dps or x.prec + 30
    with mpmath.workdps(dps):
        v = mpmath.mpf(value) if not isinstance(value, Fraction) else value
        if isinstance(v, Fraction):
            return x.lo_q <= v <= x.hi_q
        s = mpmath.mpf(10) ** x.prec
        return mpmath.mpf(x.lo) <= v * s <= mpmath.mpf(x.hi)


def mp_at(expr, prec):
    """Evaluate a zero-argument callable with mpmath at prec + 30 digits."""
    with mpmath.workdps(prec + 30):
        return +expr()


def decimal_exp(x: Decimal, digits: int) -> Decimal:
    """exp(x) for 0 <= x < 1 by its Taylor series."""
    with localcontext() as ctx:
        ctx.prec = digits + 10
        total, term, n = Decimal(1), Decimal(1), 0
        eps = Decimal(10) ** -(digits + 5)
        while term > eps:
            n += 1
            term = term * x / n
            total += term
        return total


def decimal_ln_bisect(y: Decimal, digits: int) -> tuple[Decimal, Decimal]:
    """Bracket [lo, hi] of ln(y) for 1 <= y < e, found by bisection on exp."""
    with localcontext() as ctx:
        ctx.prec = digits + 10
        lo, hi = Decimal(0), Decimal(1)
        width = Decimal(10) ** -(digits + 2)
        while hi - lo > width:
            mid = (lo + hi) / 2
            if decimal_exp(mid, digits) < y:
                lo = mid
            else:
                hi = mid
        return lo, hi
