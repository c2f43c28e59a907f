"""Certified continued fraction expansions of irrationals given as recipes.

A partial quotient is accepted only when both endpoints of the enclosure
produce it.  The reals sharing a prefix [a_0; ..., a_n] form an interval, so
when both endpoints share it, every point in between shares it too.  This
includes the irrational being expanded.  When the endpoints disagree before
the stop condition is reached, the expansion restarts at twice the precision.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from .errors import ExpansionTooShort
from .hpreal import SEARCH_PREC, Recipe, escalate, evaluate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CFExpansion:
    tau: Recipe
    quotients: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]
    prec: int

    def __len__(self) -> int:
        return len(self.quotients)

    @property
    def last_index(self) -> int:
        return len(self.quotients) - 1


def _common_prefix(lo: int, hi: int, scale: int) -> list[int]:
    # run Euclid on lo/scale and hi/scale side by side
    n1, d1, n2, d2 = lo, scale, hi, scale
    out = []
    while d1 and d2:
        a1, a2 = n1 // d1, n2 // d2
        if a1 != a2:
            break
        out.append(a1)
        n1, d1 = d1, n1 - a1 * d1
        n2, d2 = d2, n2 - a2 * d2
    if not (d1 and d2):
        # an endpoint expansion terminated; its last quotient is not safe
        out = out[:-1]
    return out


def convergents_of(quotients) -> tuple[tuple[int, ...], tuple[int, ...]]:
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    ps, qs = [], []
    for a in quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        ps.append(p)
        qs.append(q)
    return tuple(ps), tuple(qs)


def _enough(qs, quotients, max_terms, q_exceeds, extra_terms) -> Optional[int]:
    """Number of terms to keep if the stop condition is met, else None."""
    if max_terms is not None:
        return max_terms if len(quotients) >= max_terms else None
    for i, q in enumerate(qs):
        if q > q_exceeds:
            need = i + 1 + extra_terms
            return need if len(quotients) >= need else None
    return None


def cf_expand(
    tau: Recipe,
    *,
    max_terms: Optional[int] = None,
    q_exceeds: Optional[int] = None,
    extra_terms: int = 0,
    prec: Optional[int] = None,
) -> CFExpansion:
    """Expand ``tau`` until ``max_terms`` quotients are certified, or until a
    convergent denominator exceeds ``q_exceeds`` (plus ``extra_terms`` more).

    Exactly one of ``max_terms`` and ``q_exceeds`` must be given.
    """
    if (max_terms is None) == (q_exceeds is None):
        raise ValueError("give exactly one of max_terms or q_exceeds")
    if max_terms is not None and max_terms < 1:
        raise ValueError("max_terms must be at least 1")
    if prec is None:
        prec = SEARCH_PREC
        if q_exceeds is not None:
            prec = max(prec, 2 * len(str(int(q_exceeds))) + 40)
        else:
            prec = max(prec, int(1.1 * max_terms) + 40)
    while True:
        x = evaluate(tau, prec)
        quotients = _common_prefix(x.lo, x.hi, 10**prec)
        ps, qs = convergents_of(quotients)
        keep = _enough(qs, quotients, max_terms, q_exceeds, extra_terms)
        if keep is not None:
            return CFExpansion(tau, tuple(quotients[:keep]), ps[:keep], qs[:keep], prec)
        log.debug("%s: %d certified quotients at %d digits, escalating",
                  tau.describe(), len(quotients), prec)
        prec = escalate(prec)


def convergent(cf: CFExpansion, i: int) -> tuple[int, int]:
    if not 0 <= i <= cf.last_index:
        raise ExpansionTooShort(f"convergent {i} is outside the certified range 0..{cf.last_index}")
    return cf.p[i], cf.q[i]


def first_q_exceeding(cf: CFExpansion, M: int) -> int:
    """Smallest index i with q_i > M."""
    for i, q in enumerate(cf.q):
        if q > M:
            return i
    raise ExpansionTooShort(f"no certified denominator exceeds {M}; expand further")

