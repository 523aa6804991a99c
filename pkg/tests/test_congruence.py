from fractions import Fraction

import pytest

from pmcheck.abfield import rationals
from pmcheck.congruence import (
    NoAdmissibleLevel,
    TOWERS,
    build_tower,
    check_claim,
    check_cocycle,
    check_dr_integrality,
    check_four_star,
    check_hio,
    check_iota_bijection,
    check_k_independence,
    check_norm_compat,
    check_prop9,
    check_theorem,
    coeff_alpha,
    coeff_alpha_fixed_points,
    coeff_alpha_orbits,
    even_test_functions,
    four_star_difference_form,
    four_star_sum,
    select_special_g,
    special_modulus,
)
from pmcheck.grouplat import FiniteGroup, enumerate_subgroups, load_catalog, moebius_table
from pmcheck.lvalues import LocallyConstantFunction
from pmcheck.pmeasure import LiftedElement

Q = rationals()
P2 = build_tower("p2-sqrt5")
P3 = build_tower("p3-zeta7plus")


def test_towers():
    assert set(TOWERS) == {"p2-sqrt5", "p3-zeta7plus"}
    assert [(tf.field.degree, tf.mu) for tf in P2.fields] == [(1, -1), (2, 1)]
    assert [(tf.field.degree, tf.mu) for tf in P3.fields] == [(1, -1), (3, 1)]
    assert (P2.f, P2.level, P3.f, P3.level) == (20, 40, 63, 189)
    assert special_modulus(3, 3, 7) == 63


def test_claim_examples():
    rep = check_claim(FiniteGroup.cyclic(3), 2)
    assert rep.passed
    assert check_claim(FiniteGroup.cyclic(2), 3).passed
    assert check_claim(FiniteGroup.cyclic(3), 1).passed
    with pytest.raises(ValueError):
        check_claim(FiniteGroup.cyclic(3), 6)


def test_claim_failure_has_witness():
    G = FiniteGroup.cyclic(3)
    lat = enumerate_subgroups(G)
    bad = moebius_table(lat).corrupted(lat.whole, 0)
    rep = check_claim(G, 2, bad)
    assert not rep.passed and rep.witness["sum"] == 8 and rep.witness["valuation"] == 0


def test_hio_examples():
    cat = {e.name: e.group for e in load_catalog()}
    for name in ("C2", "C3", "C3xC3", "C9", "Q8"):
        assert check_hio(cat[name]).passed


def test_dr_examples():
    eps = LocallyConstantFunction.indicator(Q, 9, 1)
    rep = check_dr_integrality(P3, Q, 9, ks=(2,), gs=[2], functions=[eps])
    assert rep.passed and rep.details == [1, 0]
    zero = LocallyConstantFunction.make(Q, 9, {})
    assert check_dr_integrality(P3, Q, 9, ks=(2,), gs=[2], functions=[zero]).passed
    for level in (9, 27):
        assert check_dr_integrality(P3, Q, level).passed


def test_dr_p2_single_indicators_fail_with_witness():
    rep = check_dr_integrality(P2, Q, 8, ks=(2,))
    assert not rep.passed
    assert rep.witness["valuation"] == -1
    assert check_dr_integrality(P2, Q, 8, ks=(2,), even=True).passed


def test_special_g():
    sp, rep = select_special_g(P3)
    assert (sp.f, sp.level, sp.g.residue) == (63, 189, 127)
    assert 64 * 127 % 189 == 1 and sp.g.norm == Fraction(1, 64)
    assert rep.passed
    by_field = {d["field"]: d for d in rep.witness["fields"]}
    assert by_field["Q"]["v_p(N-1)"] == 2 and by_field["Q"]["nontrivial_mod_p^e"]
    assert select_special_g(P2)[0].g.residue == 21
    with pytest.raises(NoAdmissibleLevel):
        select_special_g(P3, level=63)
    with pytest.raises(NoAdmissibleLevel):
        select_special_g(P2, f=10)


def test_coeff_alpha_examples():
    eps = LocallyConstantFunction.constant(P2.L, 40)
    assert coeff_alpha(P2, 1, 2, eps) == 0
    assert coeff_alpha(P2, 3, 2, LocallyConstantFunction.make(P2.L, 40, {})) == 0
    c = coeff_alpha(P2, 3, 2, eps)
    assert c != 0 and c.denominator == 1 and c % 2 == 0
    assert c == coeff_alpha_fixed_points(P2, 3, 2, eps) == coeff_alpha_orbits(P2, 3, 2, eps)[0]


def test_prop9_corrupted_moebius_fails():
    whole = frozenset(P2.sigma.elements)
    bad = P2.with_moebius(whole, 0)
    assert not bad.moebius_is_valid()
    rep = check_prop9(bad, alphas=range(1, 6), ks=(2,))
    assert not rep.passed and "alpha" in rep.witness


def test_iota_examples():
    for tower in (P2, P3):
        for tf in tower.fields:
            for alpha in (1, 2):
                rep = check_iota_bijection(tower, tf, alpha)
                assert rep.passed, rep.witness
    rep = check_iota_bijection(P2, P2.fields[0], 1)
    assert "= 1, fixed points 1" in rep.note


def test_four_star_forms_agree():
    sp, _ = select_special_g(P2)
    for eps in even_test_functions(P2, extra=1):
        assert four_star_sum(P2, eps, 2, sp.g) == four_star_difference_form(P2, eps, 2, sp.g)
    zero = LocallyConstantFunction.make(P2.L, 40, {})
    assert check_four_star(P2, ks=(2,), functions=[zero]).passed


def test_theorem_identity_is_vacuous():
    rep = check_theorem(P2, ks=(2,), g=LiftedElement.of(1, 40))
    assert rep.passed and rep.vacuous
    assert all(c == 0 for c in rep.details[0][1].values())


def test_norm_compat():
    assert check_norm_compat(P2).passed
    assert check_norm_compat(P3).passed


def test_pseudomeasure_suite_small():
    assert check_k_independence(P3, Q, 9, gs=[2]).passed
    assert check_cocycle(P3, Q, 9, pairs=[(LiftedElement.of(2, 9), LiftedElement.of(2, 9))]).passed
    assert check_cocycle(P3, Q, 27, samples=10, seed=5).passed


def test_report_records_are_exact():
    rep = check_dr_integrality(P2, Q, 8, ks=(2,))
    rec = rep.as_record()
    assert rec["verdict"] == "fail"
    assert isinstance(rec["witness"]["delta"], str) and "/" in rec["witness"]["delta"]
