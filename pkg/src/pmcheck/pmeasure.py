"""Finite-level pseudomeasure elements.

At cyclotomic level m' the Galois group of Q(zeta_m')/F is the set of residues
``a mod m'`` with ``a mod m`` in the kernel of F.  The norm character sends a
residue to its image in (Z/p^e)^*, e = v_p(m').  The element attached to a
shifting element h is

    sum_x Delta~_h(1-k, delta^(x)) N(x)^(-k) [x]   in (Z/p^e)[Gal]

and its coefficients do not depend on the even weight k.

Group elements carry an exact norm alongside their residue class (see
:class:`LiftedElement`): the residue alone does not pin the element down
modulo p^e once products and transfers are taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .abfield import AbelianField
from .arith import mod_reduce, padic_valuation, prime_factors
from .grouplat import FiniteAbelianGroup, GroupRingElement
from .lvalues import LocallyConstantFunction, delta_tilde, galois_group_at_level


class NotAdmissible(ValueError):
    pass


class InsufficientLevel(ValueError):
    pass


class NotIntegral(ArithmeticError):
    """A Delta~ value that should be p-integral is not."""


def level_exponent(level: int, p: int) -> int:
    if level % p:
        raise NotAdmissible(f"{p} does not divide the level {level}")
    if p == 2 and level % 4:
        raise NotAdmissible("for p = 2 the level must be divisible by 4")
    return int(padic_valuation(level, p))


@dataclass(frozen=True)
class LevelData:
    field: AbelianField
    level: int
    p: int
    S: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(sorted(set(self.S))))
        level_exponent(self.level, self.p)
        if self.p not in self.S:
            raise NotAdmissible(f"{self.p} is not in S")
        bad = [q for q in prime_factors(self.level) if q not in self.S]
        if bad:
            raise NotAdmissible(f"level {self.level} has primes {bad} outside S")
        if self.field.m > 1 and self.level % self.field.m:
            raise NotAdmissible(f"level {self.level} is not a multiple of the conductor {self.field.m}")

    @property
    def e(self) -> int:
        return level_exponent(self.level, self.p)

    @property
    def modulus(self) -> int:
        return self.p**self.e

    @cached_property
    def group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(self.level, galois_group_at_level(self.field, self.level), name=f"Gal(Q(zeta_{self.level})/{self.field.name})")

    def __hash__(self):
        return hash((self.field.m, tuple(sorted(self.field.kernel)), self.level, self.p, self.S))

    def __eq__(self, other):
        return isinstance(other, LevelData) and hash(self) == hash(other) and self.level == other.level


def norm_character(ld: LevelData, x: int) -> int:
    """Image of x in (Z/p^e)^*."""
    if math.gcd(x, ld.level) != 1:
        raise ValueError(f"{x} is not a unit mod {ld.level}")
    return x % ld.modulus


@dataclass(frozen=True)
class LiftedElement:
    """A Galois element at level m' together with an exact norm.

    ``norm`` is a rational p-unit congruent to ``residue`` mod p^e; the pair
    stands for an element of the profinite group whose image at level m' is
    ``residue`` and whose norm character is ``norm``.  The default lift of a
    residue is the residue itself.
    """

    residue: int
    norm: Fraction
    level: int

    @classmethod
    def of(cls, residue: int, level: int, norm: Fraction | int | None = None) -> "LiftedElement":
        residue %= level
        norm = Fraction(residue if norm is None else norm)
        el = cls(residue, norm, level)
        el._check()
        return el

    def _check(self):
        if self.norm == 0:
            raise ValueError("norm must be nonzero")

    def congruent_at(self, p: int) -> bool:
        """Whether the norm is a p-unit reducing to the residue mod p^(v_p(level))."""
        if padic_valuation(self.norm, p) != 0:
            return False
        pe = p ** int(padic_valuation(self.level, p))
        return mod_reduce(self.norm, pe) == self.residue % pe

    def __mul__(self, other: "LiftedElement") -> "LiftedElement":
        if other.level != self.level:
            raise ValueError("levels differ")
        return LiftedElement((self.residue * other.residue) % self.level, self.norm * other.norm, self.level)

    def __pow__(self, n: int) -> "LiftedElement":
        return LiftedElement(pow(self.residue, n, self.level), self.norm**n, self.level)

    def is_identity(self) -> bool:
        return self.residue == 1 % self.level and self.norm == 1


@dataclass(frozen=True)
class PseudomeasureElement:
    level_data: LevelData
    shift: LiftedElement
    k: int
    even: bool
    element: GroupRingElement
    exact: tuple[tuple[int, Fraction], ...]  # label -> Delta~ before reduction


def even_group(G: FiniteAbelianGroup) -> FiniteAbelianGroup:
    """G / <-1>, labelled by least residues."""
    m = G.modulus
    minus = (-1) % m
    if not G.contains(minus):
        raise ValueError("-1 is not in the group")
    kernel = set(G.residues_of([G.identity])) | set(G.residues_of([G.label(minus)]))
    return FiniteAbelianGroup(m, G.ambient, kernel, name=f"{G.name}/<-1>")


def delta_coefficients(ld: LevelData, h: LiftedElement, k: int, even: bool = False) -> dict[int, Fraction]:
    """x -> Delta~_h(1-k, delta^(x)); with ``even`` the classes are {x, -x}."""
    G = even_group(ld.group) if even else ld.group
    out = {}
    for x in G.elements:
        members = {x, (-x) % ld.level} if even else {x}
        eps = LocallyConstantFunction.make(ld.field, ld.level, {y: 1 for y in members})
        out[x] = delta_tilde(eps, h.residue, k, ld.S, norm=h.norm)
    return out


def pseudomeasure_element(ld: LevelData, h: LiftedElement | int, k: int, even: bool = False) -> PseudomeasureElement:
    """sum_x Delta~_h(1-k, delta^(x)) N(x)^(-k) [x] mod p^e.

    With ``even`` the sum runs over G/<-1> and delta^(x) is the indicator of
    {x, -x}; N(x)^(-k) is well defined there because k is even.
    """
    if k < 2 or k % 2:
        raise ValueError("k must be an even integer >= 2")
    if isinstance(h, int):
        h = LiftedElement.of(h, ld.level)
    if h.level != ld.level:
        raise ValueError("shifting element lives at a different level")
    if not ld.group.contains(h.residue):
        raise ValueError(f"{h.residue} is not in {ld.group.name}")
    if not h.congruent_at(ld.p):
        raise ValueError("norm of the shifting element does not match its residue mod p^e")
    pe = ld.modulus
    G = even_group(ld.group) if even else ld.group
    exact = delta_coefficients(ld, h, k, even)
    coeffs = {}
    for x, d in exact.items():
        if padic_valuation(d, ld.p) < 0:
            raise NotIntegral(f"Delta~ at x = {x} equals {d}, not {ld.p}-integral")
        coeffs[x] = mod_reduce(d, pe) * pow(norm_character(ld, x), -k, pe)
    return PseudomeasureElement(ld, h, k, even, GroupRingElement(G, pe, coeffs), tuple(sorted(exact.items())))


def verlagerung_ring_map(F: AbelianField, L: AbelianField, ld_F: LevelData, x: GroupRingElement) -> GroupRingElement:
    """(Z/p^e)[Gal_F] -> (Z/p^(e - e_F))[Gal_L] induced by x -> x^[L:F].

    Works on full level quotients and on their even quotients alike; the
    target is of the same kind as the source.
    """
    if not L.contains_subgroup_field(F):
        raise ValueError(f"{F.name} is not contained in {L.name}")
    index = L.degree // F.degree
    p = ld_F.p
    e_F = int(padic_valuation(index, p)) if index > 1 else 0
    if p**e_F != index:
        raise ValueError("[L:F] is not a power of p")
    if ld_F.e - e_F < 1:
        raise InsufficientLevel(f"e - e_F = {ld_F.e - e_F} < 1")
    target = LevelData(L, ld_F.level, p, ld_F.S).group
    if len(x.group.kernel) > 1:
        target = even_group(target)
    return x.push_forward(lambda a: target.label(pow(a, index, ld_F.level)), target, p ** (ld_F.e - e_F))


def transfer_element(g: LiftedElement, index: int) -> LiftedElement:
    """ver on lifted elements: both the class and the norm are raised to the index."""
    return g**index


def even_quotient(x: GroupRingElement) -> GroupRingElement:
    """Push forward to the quotient by the class of -1."""
    Q = even_group(x.group)
    return x.push_forward(Q.label, Q)


def restrict_level(x: GroupRingElement, ld_big: LevelData, ld_small: LevelData) -> GroupRingElement:
    """Projection (Z/p^e')[Gal at m'p] -> (Z/p^e)[Gal at m'] (or of their even quotients)."""
    if ld_big.level % ld_small.level:
        raise ValueError("levels are not nested")
    target = ld_small.group
    if len(x.group.kernel) > 1:
        target = even_group(target)
    return x.push_forward(lambda a: target.label(a % ld_small.level), target, ld_small.modulus)
