"""Partial zeta values at negative integers and the twisted difference.

Values come from a character decomposition over Q(zeta_N); for F = Q they
are compared against the Hurwitz route.  The last part shows why the p = 2
constructions work with functions that are even under x -> -x.
"""

from fractions import Fraction

from pmcheck.abfield import catalog_field, rationals
from pmcheck.arith import padic_valuation
from pmcheck.lvalues import (
    LocallyConstantFunction,
    dedekind_zeta_value,
    delta_tilde,
    partial_zeta_Q_oracle,
    partial_zeta_table,
)

Q = rationals()
K5 = catalog_field("Q(sqrt5)")

print("zeta_{Q(sqrt5)}(-1) =", dedekind_zeta_value(K5, 2))
print("partial zeta of Q at level 9, k = 2, S = {3}:")
for a, v in partial_zeta_table(Q, 9, 2, (3,)).items():
    print(f"  a = {a}: {v}   oracle {partial_zeta_Q_oracle(9, a, 2, {3})}")

eps = LocallyConstantFunction.indicator(Q, 9, 1)
print("\nDelta~_2(-1, delta^(1)) at level 9:", delta_tilde(eps, 2, 2, (3,)))

print("\np = 2, level 8: single classes against symmetrized classes")
for x in (1, 3):
    single = LocallyConstantFunction.indicator(Q, 8, x)
    pair = LocallyConstantFunction.make(Q, 8, {x: 1, -x: 1})
    d1 = delta_tilde(single, 3, 2, (2,))
    d2 = delta_tilde(pair, 3, 2, (2,))
    print(f"  x = {x}: {str(d1):>8s} (v_2 = {padic_valuation(d1, 2)})   {{x, -x}}: {str(d2):>6s} (v_2 = {padic_valuation(d2, 2)})")
print("  even k makes zeta(x) = zeta(-x), so the pair doubles the value and clears the 2 in the denominator")
