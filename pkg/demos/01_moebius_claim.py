"""Subgroup lattices, Moebius values and the r-power congruence.

For a p-group P and a p-unit r the sum over subgroups P' of mu(P') r^[P:P']
is divisible by |P|.  We walk through two small lattices and then the
whole catalog.
"""

from fractions import Fraction

from pmcheck.congruence import check_claim, check_hio
from pmcheck.grouplat import enumerate_subgroups, load_catalog, moebius_table

catalog = {e.name: e for e in load_catalog()}

for name in ("C3xC3", "Q8"):
    G = catalog[name].group
    lat = enumerate_subgroups(G)
    mu = moebius_table(lat)
    print(f"{name}: {len(lat)} subgroups")
    for s in lat:
        print(f"  order {len(s):2d}  mu = {mu[s]:+d}")

print()
print("Claim sums for C3xC3:")
for r in (Fraction(2), Fraction(-2), Fraction(1, 5)):
    rep = check_claim(catalog["C3xC3"].group, r)
    print(f"  r = {r}: {'divisible by 9' if rep.passed else rep.witness}")

print()
print("HIO divisibility |Q| | p mu_Q(Q) over the catalog:")
for e in catalog.values():
    rep = check_hio(e.group)
    print(f"  {e.name:10s} {'ok' if rep.passed else rep.witness}")
