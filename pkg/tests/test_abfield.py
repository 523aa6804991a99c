import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcheck.abfield import (
    IdealFactored,
    NotCoprime,
    NotTotallyReal,
    RamifiedPrime,
    RamifiedSupport,
    TracePair,
    artin_class,
    catalog_field,
    enumerate_trace_pairs,
    extend_ideal,
    factor_principal,
    field_from_kernel,
    galois_act,
    load_field_catalog,
    rationals,
    splitting_data,
)
from pmcheck.arith import is_prime

Q = rationals()
K5 = catalog_field("Q(sqrt5)")
K7 = catalog_field("Q(zeta7)+")
FIELDS = [Q, K5, K7]


def test_catalog_fields():
    assert set(load_field_catalog()) == {"Q", "Q(sqrt5)", "Q(zeta7)+"}
    assert K5.degree == 2 and K5.minimal_polynomial == (-1, 1, 1)
    assert K7.degree == 3 and K7.minimal_polynomial == (-1, -2, 1, 1)
    assert (Q.discriminant, K5.discriminant, K7.discriminant) == (1, 5, 49)
    assert K5.power_basis_index == 1 and K7.power_basis_index == 1


def test_field_from_kernel():
    assert field_from_kernel(5, [1, 4]).minimal_polynomial == (-1, 1, 1)
    assert field_from_kernel(5, [1, 2, 3, 4]).degree == 1
    with pytest.raises(NotTotallyReal):
        field_from_kernel(5, [1])


def test_splitting_examples():
    above11 = splitting_data(K5, 11)
    assert len(above11) == 2 and {P.f for P in above11} == {1}
    (P2,) = splitting_data(K5, 2)
    assert P2.f == 2 and P2.norm == 4
    assert [P.f for P in splitting_data(Q, 13)] == [1]
    assert len(splitting_data(K7, 13)) == 3 and len(splitting_data(K7, 29)) == 3
    assert [P.f for P in splitting_data(K7, 2)] == [3]
    with pytest.raises(RamifiedPrime):
        splitting_data(K5, 5)


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.name)
def test_efg_accounting(F):
    for q in range(2, 100):
        if is_prime(q) and (F.m == 1 or q % F.m):
            assert sum(P.f for P in splitting_data(F, q)) == F.degree


def test_factor_principal_examples():
    assert factor_principal(Q, Q.element((12,))).norm == 12
    assert {P.q: e for P, e in factor_principal(Q, Q.element((12,))).factors} == {2: 2, 3: 1}
    eta = K5.element(K5.generator)
    assert eta.norm == -1 and factor_principal(K5, eta) == IdealFactored.unit(K5)
    (fac,) = factor_principal(K5, K5.rational(2)).factors
    assert fac[0].f == 2 and fac[1] == 1
    with pytest.raises(RamifiedSupport):
        factor_principal(K5, K5.element((1, -1)))  # eta0 - eta1 = sqrt5 up to sign


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([K5, K7]), st.data())
def test_factorization_norm_matches(F, data):
    coords = tuple(data.draw(st.lists(st.integers(-6, 6), min_size=F.degree, max_size=F.degree)))
    x = F.element(coords)
    if x.is_zero() or (F.m > 1 and x.norm % F.m == 0):
        return
    assert factor_principal(F, x).norm == abs(x.norm)


def test_trace_pairs_examples():
    assert enumerate_trace_pairs(Q, 1, [2, 5]) == [TracePair(Q.element((1,)), IdealFactored.unit(Q))]
    (pair,) = enumerate_trace_pairs(K5, 1, [2, 5])
    assert pair.element.coords == K5.one and pair.ideal == IdealFactored.unit(K5)
    three = enumerate_trace_pairs(Q, 3, [2, 5])
    assert sorted(p.ideal.norm for p in three) == [1, 3]


@pytest.mark.parametrize("F", [K5, K7], ids=lambda F: F.name)
@pytest.mark.parametrize("alpha", [1, 2, 3, 4])
def test_trace_pairs_are_galois_stable(F, alpha):
    S = [2, 5] if F is K5 else [3, 7]
    pairs = enumerate_trace_pairs(F, alpha, S)
    assert len(set(pairs)) == len(pairs)
    for pair in pairs:
        assert pair.element.is_totally_positive()
        assert pair.element.trace == F.degree * alpha
        assert pair.ideal.is_prime_to(S)
    for sigma in F.galois_group.elements:
        assert {galois_act(F, sigma, p) for p in pairs} == set(pairs)


def test_artin_examples():
    a = IdealFactored.make(Q, {P: 1 for P in splitting_data(Q, 7)})
    assert artin_class(Q, a, 40) == 7
    P11 = splitting_data(K5, 11)[0]
    assert artin_class(K5, IdealFactored.make(K5, {P11: 1}), 5) == 1
    (P3,) = splitting_data(K5, 3)
    assert artin_class(K5, IdealFactored.make(K5, {P3: 1}), 5) == 4
    with pytest.raises(NotCoprime):
        artin_class(K5, IdealFactored.make(K5, {P3: 1}), 15)


def test_artin_is_multiplicative():
    rng = random.Random(3)
    primes = [P for q in (11, 19, 29, 31, 41, 3, 13) for P in splitting_data(K5, q)]
    for _ in range(20):
        a = IdealFactored.make(K5, {rng.choice(primes): rng.randint(1, 2)})
        b = IdealFactored.make(K5, {rng.choice(primes): 1})
        assert artin_class(K5, a * b, 40) == artin_class(K5, a, 40) * artin_class(K5, b, 40) % 40


def test_galois_action_examples():
    eta = K5.element(K5.generator)
    assert galois_act(K5, 1, eta) == eta
    conj = galois_act(K5, 2, eta)
    assert K5.power_basis_coords(conj.coords) == (-1, -1)  # -1 - eta
    P, P2 = splitting_data(K5, 11)
    assert galois_act(K5, 2, IdealFactored.make(K5, {P: 1})) == IdealFactored.make(K5, {P2: 1})


@pytest.mark.parametrize("F", [K5, K7], ids=lambda F: F.name)
def test_galois_action_properties(F):
    rng = random.Random(0)
    for _ in range(10):
        x = F.element(tuple(rng.randint(-5, 5) for _ in range(F.degree)))
        for s in F.galois_group.elements:
            y = galois_act(F, s, x)
            assert y.trace == x.trace and y.norm == x.norm


def test_extension_of_split_prime():
    (P13,) = splitting_data(Q, 13)
    ext = extend_ideal(Q, K7, IdealFactored.make(Q, {P13: 1}))
    assert len(ext.factors) == 3 and ext.norm == 13**3
