import math
from fractions import Fraction

import mpmath
import pytest

from concatdioph.contfrac import cf_expand, convergent, convergents_of, first_q_exceeding
from concatdioph.errors import ExpansionTooShort
from concatdioph.hpreal import LogRatio, evaluate

BASES = range(2, 11)


def mp_quotients(b, n, dps=600):
    # plain Euclid on a high-precision float; the first n terms are safe at this dps
    with mpmath.workdps(dps):
        x = mpmath.log(b) / mpmath.log(mpmath.phi)
        out = []
        for _ in range(n):
            a = int(mpmath.floor(x))
            out.append(a)
            x = 1 / (x - a)
        return out


@pytest.mark.parametrize("b,a0", [(2, 1), (10, 4), (3, 2), (5, 3)])
def test_first_quotient(b, a0):
    assert cf_expand(LogRatio(b), max_terms=1).quotients == (a0,)


def test_ln2_prefix_and_convergent():
    cf = cf_expand(LogRatio(2), max_terms=3)
    assert cf.quotients == (1, 2, 3)
    assert convergent(cf, 0) == (1, 1)
    assert convergent(cf, 2) == (10, 7)


@pytest.mark.parametrize("b", BASES)
def test_matches_mpmath(b):
    cf = cf_expand(LogRatio(b), max_terms=200)
    assert list(cf.quotients) == mp_quotients(b, 200)


@pytest.mark.parametrize("b", BASES)
def test_recurrence_determinant_coprime(b):
    cf = cf_expand(LogRatio(b), max_terms=200)
    a, p, q = cf.quotients, cf.p, cf.q
    assert all(x >= 1 for x in a[1:])
    pm2, qm2, pm1, qm1 = 0, 1, 1, 0
    for i in range(len(a)):
        assert p[i] == a[i] * pm1 + pm2 and q[i] == a[i] * qm1 + qm2
        assert p[i] * qm1 - pm1 * q[i] == (-1) ** (i - 1)
        assert math.gcd(p[i], q[i]) == 1
        pm2, qm2, pm1, qm1 = pm1, qm1, p[i], q[i]
    assert all(q[i] < q[i + 1] for i in range(1, len(q) - 1))


@pytest.mark.parametrize("b", [2, 7])
def test_convergent_error_bound(b):
    cf = cf_expand(LogRatio(b), max_terms=60)
    tau = evaluate(LogRatio(b), 300)
    for i in range(len(cf.q) - 1):
        p, q = convergent(cf, i)
        err = abs(tau - Fraction(p, q))
        assert err.hi_q < Fraction(1, q * cf.q[i + 1])


@pytest.mark.parametrize("b", [3, 10])
def test_double_precision_reproduces_prefix(b):
    lo = cf_expand(LogRatio(b), max_terms=80, prec=130)
    hi = cf_expand(LogRatio(b), max_terms=80, prec=260)
    assert lo.quotients == hi.quotients


def test_b6_largest_quotient():
    M = 13 * 10**28
    cf = cf_expand(LogRatio(6), q_exceeds=M)
    N = first_q_exceeding(cf, M)
    assert max(cf.quotients[: N + 1]) == 347
    assert cf.q[N] > M >= cf.q[N - 1]


def test_first_q_exceeding_small():
    cf = cf_expand(LogRatio(2), max_terms=5)
    assert first_q_exceeding(cf, 0) == 0
    assert first_q_exceeding(cf, 1) == 1
    with pytest.raises(ExpansionTooShort):
        first_q_exceeding(cf, 10**30)


def test_thm2_step1_denominator():
    M = 6 * 18 * 10**31
    cf = cf_expand(LogRatio(2), q_exceeds=M, extra_terms=3)
    i = first_q_exceeding(cf, M)
    assert cf.q[i] > M >= cf.q[i - 1]
    assert len(cf.q) == i + 4


def test_convergent_out_of_range():
    cf = cf_expand(LogRatio(2), max_terms=4)
    with pytest.raises(ExpansionTooShort):
        convergent(cf, 4)
    with pytest.raises(ExpansionTooShort):
        convergent(cf, -1)


def test_bad_stop_conditions():
    with pytest.raises(ValueError):
        cf_expand(LogRatio(2))
    with pytest.raises(ValueError):
        cf_expand(LogRatio(2), max_terms=3, q_exceeds=10)
    with pytest.raises(ValueError):
        cf_expand(LogRatio(2), max_terms=0)


def test_escalates_from_low_precision():
    # 20 digits cannot certify 60 terms; the expansion must restart higher
    cf = cf_expand(LogRatio(5), max_terms=60, prec=20)
    assert cf.prec > 20
    assert list(cf.quotients) == mp_quotients(5, 60)


def test_convergents_of():
    assert convergents_of([1, 2, 3]) == ((1, 3, 10), (1, 2, 7))


@pytest.mark.parametrize("b", BASES)
def test_legendre_sampling(b, rng):
    # |u tau - v| > 1 / ((a_max + 2) u) for 0 < u < 10^6, v the nearest integer
    M = 10**6
    cf = cf_expand(LogRatio(b), q_exceeds=M)
    N = first_q_exceeding(cf, M)
    a_max = max(cf.quotients[: N + 1])
    tau = evaluate(LogRatio(b), 60)
    for _ in range(1000):
        u = rng.randrange(1, M)
        x = tau * u
        v = (x.mid + Fraction(1, 2)) // 1
        assert abs(x - v).lo_q > Fraction(1, (a_max + 2) * u)
