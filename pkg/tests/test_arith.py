import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcheck.arith import (
    CyclotomicNumber,
    IntervalApprox,
    NotRational,
    ZeroSuspected,
    certify_sign,
    cyclo_to_rational,
    cyclotomic_polynomial,
    embed_interval,
    euler_phi,
    factorize,
    is_prime,
    mod_reduce,
    padic_valuation,
)

nonzero_rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=500).filter(lambda x: x != 0)


def test_valuation_examples():
    assert padic_valuation(0, 3) == math.inf
    assert padic_valuation(Fraction(-7, 8), 3) == 0
    assert padic_valuation(6, 3) == 1
    assert padic_valuation(Fraction(3, 16), 2) == -4


def test_valuation_rejects_composite():
    with pytest.raises(ValueError):
        padic_valuation(5, 4)


@given(nonzero_rationals, nonzero_rationals, st.sampled_from([2, 3, 5, 7]))
def test_valuation_is_additive(x, y, p):
    assert padic_valuation(x * y, p) == padic_valuation(x, p) + padic_valuation(y, p)


def test_small_number_theory():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert euler_phi(189) == 108
    assert mod_reduce(Fraction(-7, 8), 9) == 7
    with pytest.raises(ZeroDivisionError):
        mod_reduce(Fraction(1, 3), 9)


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)


def test_cyclo_to_rational_examples():
    assert cyclo_to_rational(CyclotomicNumber.rational(7, 5)) == 5
    assert cyclo_to_rational(CyclotomicNumber.zeta(4) ** 2) == -1
    z5 = CyclotomicNumber.zeta(5)
    assert cyclo_to_rational(z5 + z5**2 + z5**3 + z5**4) == -1
    with pytest.raises(NotRational):
        cyclo_to_rational(z5)


coeff = st.fractions(min_value=-20, max_value=20, max_denominator=7)


@settings(max_examples=40)
@given(st.sampled_from([3, 4, 5, 8, 9, 12, 15]), st.data())
def test_cyclotomic_ring_laws(n, data):
    def draw():
        return CyclotomicNumber(n, data.draw(st.lists(coeff, min_size=n, max_size=n)))

    a, b, c = draw(), draw(), draw()
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    # reduction is idempotent: rebuilding from canonical coefficients is a no-op
    assert CyclotomicNumber(n, a.coefficients) == a


def test_galois_conjugation_is_automorphism():
    z = CyclotomicNumber.zeta(9)
    x = z + 3 * z**2
    y = z**4 - 1
    assert (x * y).galois(2) == x.galois(2) * y.galois(2)


def test_sign_certification_sqrt5():
    # eta = zeta_5 + zeta_5^-1; 2 eta + 1 = sqrt5 under the embedding zeta -> exp(2 pi i/5)
    z = CyclotomicNumber.zeta(5)
    eta = z + z**4
    x = 2 * eta + 1
    assert certify_sign(CyclotomicNumber.rational(5, 1), 1) == 1
    assert certify_sign(CyclotomicNumber.rational(5, 1), 2) == 1
    assert certify_sign(x, 1) == 1
    assert certify_sign(x, 2) == -1


@given(st.fractions(max_denominator=100).filter(lambda x: x != 0))
def test_sign_agrees_with_rational_sign(x):
    assert certify_sign(CyclotomicNumber.rational(7, x), 3) == (1 if x > 0 else -1)


def test_zero_is_suspected():
    z = CyclotomicNumber.zeta(5)
    with pytest.raises(ZeroSuspected):
        certify_sign(CyclotomicNumber.rational(5, 0), 1)
    # a non-canonical zero still certifies as zero by exact arithmetic
    assert (z + z**2 + z**3 + z**4 + 1).is_zero()


def test_intervals_shrink_with_precision():
    x = CyclotomicNumber.zeta(7) + CyclotomicNumber.zeta(7) ** 6
    coarse, _ = embed_interval(x, 1, 64)
    fine, _ = embed_interval(x, 1, 256)
    assert fine.width < coarse.width
    assert coarse.low <= fine.low <= fine.high <= coarse.high
    assert fine.contains_zero() is False
    with pytest.raises(ValueError):
        IntervalApprox(Fraction(1), Fraction(0))
