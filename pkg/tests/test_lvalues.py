import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcheck.abfield import catalog_field, rationals
from pmcheck.arith import padic_valuation
from pmcheck.lvalues import (
    CACHE_FILE,
    DirichletCharacter,
    LevelMismatch,
    LocallyConstantFunction,
    NonPrimitive,
    bernoulli,
    bernoulli_override,
    bernoulli_poly_eval,
    cache_dir,
    characters,
    dedekind_zeta_value,
    delta_tilde,
    galois_group_at_level,
    generalized_bernoulli,
    partial_zeta_Q_oracle,
    partial_zeta_table,
    partial_zeta_tilde,
    quadratic_character,
    read_bernoulli_cache,
    trivial_character,
    truncated_L_value,
    verify_bernoulli_cache,
    write_bernoulli_cache,
    zeta_tilde,
)
from pmcheck.arith import cyclo_to_rational

Q = rationals()
K5 = catalog_field("Q(sqrt5)")
K7 = catalog_field("Q(zeta7)+")


def test_bernoulli_numbers():
    assert [bernoulli(k) for k in range(5)] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]
    assert bernoulli(12) == Fraction(-691, 2730)
    assert all(bernoulli(k) == 0 for k in range(3, 40, 2))


def test_bernoulli_polynomial_examples():
    assert bernoulli_poly_eval(1, 0) == Fraction(-1, 2)
    assert bernoulli_poly_eval(2, 0) == Fraction(1, 6)
    assert bernoulli_poly_eval(2, Fraction(1, 4)) == Fraction(-1, 48)


@given(st.integers(1, 12), st.fractions(min_value=0, max_value=1, max_denominator=30))
def test_bernoulli_polynomial_reflection(k, x):
    assert bernoulli_poly_eval(k, 1 - x) == (-1) ** k * bernoulli_poly_eval(k, x)


def test_generalized_bernoulli_examples():
    assert cyclo_to_rational(generalized_bernoulli(trivial_character(), 2)) == Fraction(1, 6)
    assert cyclo_to_rational(generalized_bernoulli(quadratic_character(5), 2)) == Fraction(4, 5)
    assert cyclo_to_rational(generalized_bernoulli(quadratic_character(4), 1)) == Fraction(-1, 2)
    _, _, chars = characters(8)
    imprimitive = next(psi for _, psi in chars if psi.conductor == 4)
    with pytest.raises(NonPrimitive):
        generalized_bernoulli(imprimitive, 2)


def test_truncated_L_examples():
    assert cyclo_to_rational(truncated_L_value(trivial_character(), 2, {3})) == Fraction(1, 6)
    assert cyclo_to_rational(truncated_L_value(quadratic_character(5), 2, {2, 5})) == Fraction(-6, 5)
    assert cyclo_to_rational(truncated_L_value(quadratic_character(5), 2, {5})) == Fraction(-2, 5)
    with pytest.raises(LevelMismatch):
        truncated_L_value(quadratic_character(5), 2, {2})


def test_character_basics():
    _, N, chars = characters(20)
    assert len(chars) == 8
    conductors = sorted(psi.conductor for _, psi in chars)
    assert conductors == [1, 4, 5, 5, 5, 20, 20, 20]
    for _, psi in chars:
        for a in (3, 7, 11):
            for b in (3, 13):
                assert psi.value(a * b) == psi.value(a) * psi.value(b)
        assert psi.value(5).is_zero()


def test_partial_zeta_examples():
    assert partial_zeta_tilde(Q, 4, 1, 2, {2}) == Fraction(1, 48)
    assert partial_zeta_tilde(Q, 9, 1, 2, {3}) == Fraction(-11, 72)
    assert partial_zeta_Q_oracle(4, 1, 2, {2}) == Fraction(1, 24)
    assert partial_zeta_Q_oracle(9, 5, 2, {3}) == Fraction(13, 36)
    assert partial_zeta_Q_oracle(4, 3, 2, {2}) == Fraction(1, 24)


def test_dedekind_values():
    assert dedekind_zeta_value(K5, 2) == Fraction(1, 30)
    assert dedekind_zeta_value(K5, 2, {5}) == Fraction(-2, 15)
    table = partial_zeta_table(K5, 5, 2, {5})
    assert sum(table.values()) == Fraction(-2, 15)
    # zeta_Q(-1) = -1/12
    assert dedekind_zeta_value(Q, 2) == Fraction(-1, 12)


@pytest.mark.parametrize("F,level,S", [(K5, 40, (2, 5)), (K7, 63, (3, 7)), (Q, 27, (3,))])
@pytest.mark.parametrize("k", [2, 4])
def test_full_zeta_consistency(F, level, S, k):
    assert sum(partial_zeta_table(F, level, k, S).values()) == dedekind_zeta_value(F, k, S)


@pytest.mark.parametrize("level,S", [(8, {2}), (12, {2, 3}), (25, {5}), (40, {2, 5}), (63, {3, 7})])
def test_oracle_agreement_sample(level, S):
    for k in (2, 4):
        table = partial_zeta_table(Q, level, k, S)
        for a, v in table.items():
            assert v == partial_zeta_Q_oracle(level, a, k, S)


def test_even_partial_zeta_symmetry():
    # for even k the partial zeta of x and -x agree
    t = partial_zeta_table(K7, 189, 2, (3, 7))
    assert all(t[x] == t[(-x) % 189] for x in t)


def test_galois_group_at_level():
    assert galois_group_at_level(K5, 20) == (1, 9, 11, 19)
    assert len(galois_group_at_level(K7, 189)) == 36
    with pytest.raises(LevelMismatch):
        galois_group_at_level(K5, 8)


def test_delta_examples():
    eps = LocallyConstantFunction.indicator(Q, 9, 1)
    assert delta_tilde(eps, 2, 2, {3}) == Fraction(-7, 8)
    assert delta_tilde(eps, 1, 2, {3}) == 0
    assert eps.shift(2) == LocallyConstantFunction.indicator(Q, 9, 5)


@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.sampled_from([2, 4, 5, 8]))
@settings(max_examples=25, deadline=None)
def test_delta_is_linear(a, b, g):
    G = galois_group_at_level(Q, 9)
    e1 = LocallyConstantFunction.make(Q, 9, dict(zip(G, a)))
    e2 = LocallyConstantFunction.make(Q, 9, dict(zip(G, b)))
    assert delta_tilde(e1 + e2, g, 2, {3}) == delta_tilde(e1, g, 2, {3}) + delta_tilde(e2, g, 2, {3})


def test_norm_representative_matters_beyond_integrality():
    # N(g) = 2 and N(g) = 11 have the same image mod 9, yet the differences
    # disagree mod 9; both stay 3-integral
    eps = LocallyConstantFunction.indicator(Q, 9, 1)
    d2 = delta_tilde(eps, 2, 2, {3}, norm=2)
    d11 = delta_tilde(eps, 2, 2, {3}, norm=11)
    assert d11 == -22
    assert padic_valuation(d2 - d11, 3) == 0


def test_locally_constant_function_api():
    eps = LocallyConstantFunction.make(K5, 40, {11: 1, 29: 1, 9: 0})
    assert eps.is_even and eps.mass == 2 and eps(9) == 0
    assert not LocallyConstantFunction.indicator(K5, 40, 11).is_even
    assert LocallyConstantFunction.constant(K5, 40).mass == 8
    with pytest.raises(LevelMismatch):
        LocallyConstantFunction.indicator(K5, 40, 3)
    assert zeta_tilde(eps.scale(0), 2, (2, 5)) == 0


def test_bernoulli_override_is_scoped():
    b2 = bernoulli(2)
    with bernoulli_override({2: Fraction(1, 5)}):
        assert bernoulli(2) == Fraction(1, 5)
        assert partial_zeta_table(Q, 4, 2, (2,))[1] != Fraction(1, 24)
    assert bernoulli(2) == b2
    assert partial_zeta_table(Q, 4, 2, (2,))[1] == Fraction(1, 24)


def test_bernoulli_cache_roundtrip(cache_env):
    path = write_bernoulli_cache(cache_dir() / CACHE_FILE)
    assert path.parent == cache_env
    assert read_bernoulli_cache(path)[12] == Fraction(-691, 2730)
    assert verify_bernoulli_cache(path) == []
    text = path.read_text().replace("4 -1/30", "4 1/30")
    path.write_text(text)
    assert verify_bernoulli_cache(path) == [(4, Fraction(1, 30), Fraction(-1, 30))]
