import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pmcheck.grouplat import (
    CapExceeded,
    FiniteAbelianGroup,
    FiniteGroup,
    GroupAction,
    GroupRingElement,
    NotASubgroup,
    enumerate_subgroups,
    load_catalog,
    moebius_of_group,
    moebius_table,
    orbit_stabilizer,
    trace_ideal_test,
    transfer_abelian,
    trivial_action,
    unit_group,
)

CATALOG = {e.name: e for e in load_catalog()}


def product_of_cyclic(*orders):
    elems = list(itertools.product(*[range(o) for o in orders]))
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[tuple((x + y) % o for x, y, o in zip(a, b, orders))] for b in elems] for a in elems]
    return FiniteGroup(table, name="x".join(f"C{o}" for o in orders))


def test_unit_group_examples():
    G5 = unit_group(5)
    assert G5.invariant_factors == (4,) and G5.element_order(2) == 4
    G8 = unit_group(8)
    assert G8.invariant_factors == (2, 2)
    assert {G8.element_order(a) for a in (3, 5, 7)} == {2}
    G20 = unit_group(20)
    assert G20.order == 8 and G20.invariant_factors == (2, 4)


def test_unit_group_labels_are_least_residues():
    Q = unit_group(20).quotient([1, 9])
    assert Q.elements == (1, 3, 11, 13) and Q.label(19) == 11 and Q.label(7) == 3


def test_catalog_contents():
    names = set(CATALOG)
    for p in (2, 3):
        for base in ("C{p}", "C{p2}", "C{p3}", "C{p}xC{p}", "C{p2}xC{p}", "C{p}xC{p}xC{p}"):
            assert base.format(p=p, p2=p * p, p3=p**3) in names
    assert {"D8", "Q8", "Heis27", "M27"} <= names
    for e in CATALOG.values():
        assert e.group.is_p_group(e.p) and e.group.order <= 27


def test_subgroup_counts():
    assert len(enumerate_subgroups(FiniteGroup.cyclic(3))) == 2
    assert len(enumerate_subgroups(CATALOG["C3xC3"].group)) == 6
    lat = enumerate_subgroups(CATALOG["Q8"].group)
    assert sorted(len(s) for s in lat) == [1, 2, 4, 4, 4, 8]
    assert len(enumerate_subgroups(CATALOG["D8"].group)) == 10


def test_lattice_closed_under_intersection():
    for e in CATALOG.values():
        lat = enumerate_subgroups(e.group)
        subs = set(lat)
        assert lat.trivial in subs and lat.whole in subs
        assert all(a & b in subs for a in subs for b in subs)


def test_cap():
    with pytest.raises(CapExceeded):
        enumerate_subgroups(product_of_cyclic(2, 2, 2, 2), cap=8)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_moebius_examples(p):
    assert moebius_of_group(FiniteGroup.cyclic(p)) == -1
    assert moebius_of_group(product_of_cyclic(p, p)) == p
    assert moebius_of_group(FiniteGroup.cyclic(p * p)) == 0
    mu = moebius_table(enumerate_subgroups(FiniteGroup.cyclic(p)))
    assert mu[frozenset({0})] == 1


def test_moebius_sums_vanish_and_hio():
    for e in CATALOG.values():
        lat = enumerate_subgroups(e.group)
        mu = moebius_table(lat)
        assert mu.satisfies_recursion()
        assert sum(mu[s] for s in lat) == 0
        for s in lat:
            assert (e.p * moebius_of_group(e.group.restrict(s))) % len(s) == 0


def test_corrupted_moebius_breaks_recursion():
    lat = enumerate_subgroups(CATALOG["C2xC2"].group)
    mu = moebius_table(lat)
    assert not mu.corrupted(lat.whole, 1).satisfies_recursion()


def test_transfer_examples():
    assert transfer_abelian(unit_group(5), [1, 4], 2) == 4
    G = unit_group(9)
    assert transfer_abelian(G, G.elements, 2) == 2
    assert transfer_abelian(G, [1, 8], 2) == 8
    with pytest.raises(NotASubgroup):
        transfer_abelian(G, [1, 2], 2)


@given(st.sampled_from([(9, [1, 8]), (20, [1, 9]), (7, [1, 6]), (16, [1, 7, 9, 15])]), st.data())
def test_transfer_is_homomorphism(case, data):
    m, H = case
    G = unit_group(m)
    a = data.draw(st.sampled_from(G.elements))
    b = data.draw(st.sampled_from(G.elements))
    assert transfer_abelian(G, H, G.mul(a, b)) == G.mul(transfer_abelian(G, H, a), transfer_abelian(G, H, b))


def test_orbit_stabilizer_trivial_action():
    act = trivial_action([0, 1], ["x", "y"], 0)
    assert orbit_stabilizer(act, "x") == (frozenset({"x"}), frozenset({0, 1}))


def test_orbit_stabilizer_split_prime():
    from pmcheck.abfield import catalog_field, galois_act_prime, splitting_data

    L = catalog_field("Q(sqrt5)")
    primes = splitting_data(L, 11)
    act = GroupAction(L.galois_group.elements, primes, lambda s, P: galois_act_prime(L, s, P), 1)
    act.spot_check()
    orbit, stab = orbit_stabilizer(act, primes[0])
    assert len(orbit) == 2 and stab == frozenset({1})


def test_trace_ideal_examples():
    G = unit_group(20).quotient([1, 9])
    act = trivial_action([0, 1], G.elements, 0)
    assert trace_ideal_test(GroupRingElement.zero(G, 8), act)
    assert trace_ideal_test(GroupRingElement(G, 8, {1: 2, 3: 6, 11: 4}), act)
    res = trace_ideal_test(GroupRingElement(G, 8, {1: 2, 3: 5}), act)
    assert not res and res.witness["element"] == 3


def test_trace_ideal_nontrivial_action():
    # Sigma = {1, 9} acting on (Z/20)^* by multiplication; orbits of size 2 have trivial stabilizers
    G = unit_group(20)
    act = GroupAction([1, 9], G.elements, lambda s, y: (s * y) % 20, 1)
    x = GroupRingElement(G, 4, {1: 3, 9: 3, 3: 1, 7: 1})
    assert trace_ideal_test(x, act)
    bad = GroupRingElement(G, 4, {1: 3, 9: 1})
    assert trace_ideal_test(bad, act).reason == "not fixed by the action"


@given(st.permutations([1, 3, 7, 9, 11, 13, 17, 19]), st.lists(st.integers(0, 7), min_size=4, max_size=4))
def test_trace_ideal_invariant_under_relabelling(perm, cs):
    # a bijection of (Z/20)^* commuting with the trivial action relabels coefficients only
    G = unit_group(20)
    act = trivial_action([0, 1], G.elements, 0)
    coeffs = dict(zip(G.elements, cs + cs))
    x = GroupRingElement(G, 8, coeffs)
    relabelled = GroupRingElement(G, 8, {perm[i]: coeffs[y] for i, y in enumerate(G.elements)})
    assert bool(trace_ideal_test(x, act)) == bool(trace_ideal_test(relabelled, act))


def test_group_ring_operations():
    G = unit_group(9)
    x = GroupRingElement(G, 9, {1: 1, 2: 3})
    assert (x.shift(2)).as_table()[4] == 3
    assert (x - x).is_zero()
    assert x.scale(3).reduce(3).is_zero()
    Q = G.quotient([1, 8])
    y = x.push_forward(Q.label, Q)
    assert y[1] == 1 and y[2] == 3
