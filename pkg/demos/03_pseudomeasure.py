"""Finite-level pseudomeasure elements: weight independence and the cocycle rule."""

from pmcheck.abfield import catalog_field, rationals
from pmcheck.pmeasure import LevelData, LiftedElement, pseudomeasure_element

Q = rationals()
ld = LevelData(Q, 9, 3, (3,))
for k in (2, 4, 6):
    lam = pseudomeasure_element(ld, 2, k)
    print(f"k = {k}: {lam.element}")

L = catalog_field("Q(zeta7)+")
ld = LevelData(L, 63, 3, (3, 7))
g = LiftedElement.of(13, 63)
h = LiftedElement.of(20, 63, 20 + 9 * 4)  # same image mod 63, different exact norm
lam = lambda x: pseudomeasure_element(ld, x, 2).element
lhs, rhs = lam(g * h), lam(g) + lam(h).shift(13)
print("\ncocycle over Q(zeta7)+ at level 63:", "holds" if lhs == rhs else "fails")
print("  lambda_gh =", lhs)

ld2 = LevelData(catalog_field("Q(sqrt5)"), 40, 2, (2, 5))
print("\np = 2 elements live on the quotient by -1:")
print("  ", pseudomeasure_element(ld2, 21, 2, even=True).element)
