"""Totally real abelian fields inside Q(zeta_m), m prime.

A field is given by its kernel H <= (Z/m)^* (the subgroup fixing it).  Elements
are integer coordinate vectors on the Gaussian periods ``eta_j = sum of zeta^h``
over the cosets of H, which form an integral basis when m is prime.  The
degree-one field Q is given the basis ``{1}`` instead of its single period.

Ideals are only ever divisors of principal ideals, so they are kept factored
over prime ideals; a prime above an unramified q is described Dedekind style
as ``(q, g(eta_0))`` for an irreducible factor g of the minimal polynomial of
eta_0 modulo q.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy

from .arith import (
    CyclotomicNumber,
    certify_sign,
    embed_interval,
    factorize,
    is_prime,
)
from .grouplat import FiniteAbelianGroup, unit_group


class NotTotallyReal(ValueError):
    pass


class RamifiedPrime(ValueError):
    pass


class RamifiedSupport(ValueError):
    pass


class NotCoprime(ValueError):
    pass


class AbelianField:
    """The fixed field of ``kernel`` inside Q(zeta_m)."""

    def __init__(self, m: int, kernel: Iterable[int], name: str = ""):
        self.m = m
        if m == 1:
            units = frozenset([0])
        else:
            units = frozenset(a for a in range(1, m) if math.gcd(a, m) == 1)
        kernel = frozenset(h % m for h in kernel) if m > 1 else frozenset([0])
        if not kernel <= units:
            raise ValueError("kernel must consist of units")
        if m > 2 and (m - 1) not in kernel:
            raise NotTotallyReal(f"-1 mod {m} is not in the kernel")
        self.kernel = kernel
        self.units = units
        self.degree = len(units) // len(kernel)
        if self.degree > 1 and not is_prime(m):
            raise NotImplementedError("period bases are only implemented for prime conductors")
        self.name = name or (f"Q" if self.degree == 1 else f"Q(zeta_{m})^H")
        # cosets of H ordered by least element; coset 0 contains 1
        cosets: list[frozenset[int]] = []
        seen: set[int] = set()
        for a in sorted(units):
            if a not in seen:
                c = frozenset(a * h % m for h in kernel) if m > 1 else frozenset([0])
                cosets.append(c)
                seen |= c
        self.cosets = tuple(cosets)
        self.coset_index = {a: i for i, c in enumerate(cosets) for a in c}
        self.coset_reps = tuple(min(c) for c in cosets)

    # ------------------------------------------------------------------ basics
    @property
    def is_rational_field(self) -> bool:
        return self.degree == 1

    @cached_property
    def galois_group(self) -> FiniteAbelianGroup:
        """Gal(F/Q) = (Z/m)^*/H with least-residue labels."""
        if self.m <= 2:
            return FiniteAbelianGroup(3, [1], name="1")  # trivial group
        return unit_group(self.m).quotient(self.kernel, name=f"Gal({self.name}/Q)")

    @cached_property
    def periods(self) -> tuple[CyclotomicNumber, ...]:
        if self.is_rational_field:
            return (CyclotomicNumber.rational(max(self.m, 1), 1),)
        return tuple(CyclotomicNumber.from_exponents(self.m, {a: 1 for a in c}) for c in self.cosets)

    def from_cyclotomic(self, z: CyclotomicNumber) -> tuple[Fraction, ...]:
        """Coordinates of z on the basis; raises if z is not in the field."""
        if self.is_rational_field:
            from .arith import cyclo_to_rational

            return (cyclo_to_rational(z),)
        m = self.m
        c = z.coefficients
        # power basis 1, zeta, .., zeta^(m-2) to normal basis zeta, .., zeta^(m-1)
        normal = {a: (c[a] if a < m - 1 else 0) - c[0] for a in range(1, m)}
        coords = []
        for coset in self.cosets:
            vals = {normal[a] for a in coset}
            if len(vals) != 1:
                raise ValueError("element is not fixed by the kernel")
            coords.append(vals.pop())
        return tuple(coords)

    def to_cyclotomic(self, coords: Sequence[int]) -> CyclotomicNumber:
        out = CyclotomicNumber.rational(max(self.m, 1), 0)
        for c, eta in zip(coords, self.periods):
            if c:
                out = out + eta * c
        return out

    @cached_property
    def mult_table(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        n = self.degree
        table = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                coords = self.from_cyclotomic(self.periods[i] * self.periods[j])
                assert all(x.denominator == 1 for x in coords)
                table[i][j] = table[j][i] = tuple(int(x) for x in coords)
        return tuple(tuple(r) for r in table)

    @cached_property
    def one(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.from_cyclotomic(CyclotomicNumber.rational(max(self.m, 1), 1)))

    # ------------------------------------------------------------ arithmetic
    def element(self, coords: Sequence[int]) -> "FieldElement":
        return FieldElement(self, tuple(int(c) for c in coords))

    def rational(self, r: int) -> "FieldElement":
        return FieldElement(self, tuple(r * c for c in self.one))

    def mul_coords(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        n = self.degree
        out = [0] * n
        t = self.mult_table
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                ab = ai * bj
                row = t[i][j]
                for k in range(n):
                    if row[k]:
                        out[k] += ab * row[k]
        return tuple(out)

    def galois_coords(self, sigma: int, coords: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of sigma(x) where sigma acts by zeta -> zeta^sigma."""
        if self.is_rational_field:
            return tuple(coords)
        out = [0] * self.degree
        for j, c in enumerate(coords):
            out[self.coset_index[sigma * self.coset_reps[j] % self.m]] = c
        return tuple(out)

    def coords_to_rational(self, coords: Sequence[int]) -> Fraction:
        if self.is_rational_field:
            return Fraction(coords[0])
        # r = -r * sum(eta_j): all coordinates equal -r
        if len(set(coords)) != 1:
            raise ValueError("not a rational element")
        return Fraction(-coords[0])

    def trace_coords(self, coords: Sequence[int]) -> int:
        if self.is_rational_field:
            return coords[0]
        # each period has trace -1 for prime m
        return -sum(coords)

    def norm_coords(self, coords: Sequence[int]) -> int:
        acc = self.one
        for sigma in self.galois_group.elements:
            acc = self.mul_coords(acc, self.galois_coords(sigma, coords))
        r = self.coords_to_rational(acc)
        assert r.denominator == 1
        return int(r)

    # -------------------------------------------------------------- embeddings
    @property
    def embeddings(self) -> tuple[int, ...]:
        """Real embeddings, labelled by sigma in Gal(F/Q): x -> sigma(x) at zeta = exp(2 pi i/m)."""
        return self.galois_group.elements

    @cached_property
    def _period_intervals(self) -> tuple[tuple[Fraction, Fraction], ...]:
        out = []
        for eta in self.periods:
            re, _ = embed_interval(eta, 1, 96)
            out.append((re.low, re.high))
        return tuple(out)

    @cached_property
    def period_values(self) -> np.ndarray:
        """Float matrix V[sigma_index, j] = sigma(eta_j); for bounds only."""
        rows = []
        for sigma in self.embeddings:
            row = []
            for j in range(self.degree):
                e = [0] * self.degree
                e[j] = 1
                lo, hi = self._interval_of(self.galois_coords(sigma, e))
                row.append(float((lo + hi) / 2))
            rows.append(row)
        return np.array(rows)

    def _interval_of(self, coords: Sequence[int]) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(0)
        for c, (a, b) in zip(coords, self._period_intervals):
            if c > 0:
                lo += c * a
                hi += c * b
            elif c < 0:
                lo += c * b
                hi += c * a
        return lo, hi

    def sign(self, coords: Sequence[int], sigma: int) -> int:
        """Certified sign of x under the embedding labelled sigma."""
        c = self.galois_coords(sigma, coords)
        lo, hi = self._interval_of(c)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        return certify_sign(self.to_cyclotomic(c), 1)

    def is_totally_positive(self, coords: Sequence[int]) -> bool:
        if not any(coords):
            return False
        return all(self.sign(coords, s) > 0 for s in self.embeddings)

    # ------------------------------------------------------ minimal polynomial
    @cached_property
    def generator(self) -> tuple[int, ...]:
        """eta_0 (the generator of the power basis), or 1 for Q."""
        e = [0] * self.degree
        e[0] = 1
        return tuple(e)

    @cached_property
    def generator_powers(self) -> tuple[tuple[int, ...], ...]:
        out = [self.one]
        for _ in range(self.degree):
            out.append(self.mul_coords(out[-1], self.generator))
        return tuple(out)

    @cached_property
    def minimal_polynomial(self) -> tuple[int, ...]:
        """Monic minimal polynomial of eta_0, constant term first."""
        # expand prod (t - sigma(eta_0)) with coefficients in the field
        poly = [self.one]
        for sigma in self.galois_group.elements:
            root = self.galois_coords(sigma, self.generator)
            new = [tuple(0 for _ in range(self.degree))] * (len(poly) + 1)
            for i, c in enumerate(poly):
                new[i + 1] = tuple(x + y for x, y in zip(new[i + 1], c))
                rc = self.mul_coords(root, c)
                new[i] = tuple(x - y for x, y in zip(new[i], rc))
            poly = new
        out = []
        for c in poly:
            r = self.coords_to_rational(c)
            assert r.denominator == 1
            out.append(int(r))
        return tuple(out)

    @cached_property
    def discriminant(self) -> int:
        """Discriminant of the period basis: det(tr(eta_i eta_j))."""
        n = self.degree
        mat = [[self.trace_coords(self.mul_coords(_unit(n, i), _unit(n, j))) for j in range(n)] for i in range(n)]
        return int(sympy.Matrix(mat).det())

    @cached_property
    def power_basis_index(self) -> int:
        """[O_F : Z[eta_0]], from the discriminant of the minimal polynomial."""
        t = sympy.Symbol("t")
        f = sympy.Poly(list(reversed(self.minimal_polynomial)), t)
        disc = int(sympy.discriminant(f))
        ratio = Fraction(disc, self.discriminant)
        root = math.isqrt(int(ratio))
        assert ratio.denominator == 1 and root * root == ratio
        return root

    def power_basis_coords(self, coords: Sequence[int]) -> tuple[Fraction, ...]:
        """x as a polynomial in eta_0 (coefficients, constant first)."""
        n = self.degree
        mat = sympy.Matrix([list(self.generator_powers[i]) for i in range(n)]).T
        sol = mat.LUsolve(sympy.Matrix(list(coords)))
        return tuple(Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in sol)

    def eval_poly(self, poly: Sequence[int], coords: Sequence[int] | None = None) -> tuple[int, ...]:
        """poly(x) for x = coords (default eta_0), poly constant term first."""
        if coords is None:
            powers = self.generator_powers
        else:
            powers = [self.one]
            for _ in range(len(poly) - 1):
                powers.append(self.mul_coords(powers[-1], coords))
        out = [0] * self.degree
        for c, pw in zip(poly, powers):
            if c:
                out = [a + c * b for a, b in zip(out, pw)]
        return tuple(out)

    # --------------------------------------------------------------- helpers
    def contains_subgroup_field(self, other: "AbelianField") -> bool:
        """True when other is a subfield of self (same conductor or other = Q)."""
        if other.is_rational_field:
            return True
        return other.m == self.m and self.kernel <= other.kernel

    def __repr__(self):
        return f"AbelianField({self.name}, m={self.m}, degree={self.degree})"

    def __reduce__(self):
        return (field_from_kernel, (self.m, tuple(sorted(self.kernel)), self.name))


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(n))


@lru_cache(maxsize=None)
def _field_cached(m: int, kernel: frozenset[int], name: str) -> AbelianField:
    if m > 1 and len(kernel) == len([a for a in range(1, m) if math.gcd(a, m) == 1]):
        F = AbelianField(m, kernel, name or "Q")
    else:
        F = AbelianField(m, kernel, name)
    return F


def field_from_kernel(m: int, kernel: Iterable[int], name: str = "") -> AbelianField:
    if m == 1:
        return _field_cached(1, frozenset([0]), name or "Q")
    kern = frozenset(h % m for h in kernel)
    units = unit_group(m) if m >= 3 else None
    if units is not None and not units.is_subgroup(kern):
        raise ValueError("kernel is not a subgroup of (Z/m)^*")
    return _field_cached(m, kern, name)


def rationals() -> AbelianField:
    return field_from_kernel(1, [0], "Q")


@dataclass(frozen=True)
class FieldElement:
    field: AbelianField = dc_field(compare=False, hash=False)
    coords: tuple[int, ...]
    key: tuple = dc_field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (self.field.m, tuple(sorted(self.field.kernel))))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, self.field.mul_coords(self.coords, other.coords))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    @property
    def trace(self) -> int:
        return self.field.trace_coords(self.coords)

    @property
    def norm(self) -> int:
        return self.field.norm_coords(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def conjugate(self, sigma: int) -> "FieldElement":
        return FieldElement(self.field, self.field.galois_coords(sigma, self.coords))

    def is_totally_positive(self) -> bool:
        return self.field.is_totally_positive(self.coords)

    def __repr__(self):
        return f"{self.field.name}{list(self.coords)}"


# ---------------------------------------------------------------------------
# prime ideals


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    field_key: tuple
    q: int
    f: int
    poly: tuple[int, ...]  # monic factor of the minimal polynomial mod q, constant first
    index: int

    @property
    def norm(self) -> int:
        return self.q**self.f

    def __repr__(self):
        return f"P({self.q},{self.index})" if self.f == 1 else f"P({self.q}^{self.f},{self.index})"


def _field_key(F: AbelianField) -> tuple:
    return (F.m, tuple(sorted(F.kernel)))


class _PrimeData:
    __slots__ = ("prime", "generator", "tau")

    def __init__(self, prime, generator, tau):
        self.prime = prime
        self.generator = generator
        self.tau = tau


_PRIME_CACHE: dict[tuple, list[_PrimeData]] = {}


def _residue_degree(F: AbelianField, q: int) -> int:
    if F.is_rational_field:
        return 1
    return F.galois_group.element_order(q % F.m)


def _prime_data(F: AbelianField, q: int) -> list[_PrimeData]:
    key = (_field_key(F), q)
    cached = _PRIME_CACHE.get(key)
    if cached is not None:
        return cached
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if F.m > 1 and F.m % q == 0 and not F.is_rational_field:
        raise RamifiedPrime(f"{q} divides the conductor {F.m}")
    if F.power_basis_index % q == 0:
        raise NotImplementedError(f"{q} divides the index of Z[eta_0]")
    f = _residue_degree(F, q)
    t = sympy.Symbol("t")
    minpoly = sympy.Poly(list(reversed(F.minimal_polynomial)), t, modulus=q)
    _, factors = minpoly.factor_list()
    factors = sorted(((tuple(int(c) % q for c in reversed(g.all_coeffs())), e) for g, e in factors))
    out = []
    for idx, (g, e) in enumerate(factors):
        if e != 1:
            raise RamifiedPrime(f"{q} ramifies in {F.name}")
        if len(g) - 1 != f:
            raise AssertionError(f"factor degree {len(g) - 1} != residue degree {f}")
        gp = sympy.Poly(list(reversed(g)), t, modulus=q)
        h, r = sympy.div(minpoly, gp)
        assert r.is_zero
        h_coeffs = tuple(int(c) % q for c in reversed(h.all_coeffs()))
        prime = PrimeIdeal(_field_key(F), q, f, g, idx)
        out.append(_PrimeData(prime, F.eval_poly(g), F.eval_poly(h_coeffs)))
    assert len(out) * f == F.degree
    _PRIME_CACHE[key] = out
    return out


def splitting_data(F: AbelianField, q: int) -> list[PrimeIdeal]:
    """Primes of F above q (q prime to the conductor), via Dedekind."""
    if F.m > 1 and F.m % q == 0 and not F.is_rational_field:
        raise RamifiedPrime(f"{q} divides the conductor {F.m}")
    return [d.prime for d in _prime_data(F, q)]


def _lookup(F: AbelianField, P: PrimeIdeal) -> _PrimeData:
    for d in _prime_data(F, P.q):
        if d.prime == P:
            return d
    raise KeyError(P)


def prime_valuation(F: AbelianField, P: PrimeIdeal, coords: Sequence[int]) -> int:
    """v_P(x) for nonzero integral x."""
    if not any(coords):
        raise ValueError("valuation of zero")
    d = _lookup(F, P)
    q = P.q
    v = 0
    x = tuple(coords)
    while True:
        y = F.mul_coords(x, d.tau)
        if any(c % q for c in y):
            return v
        x = tuple(c // q for c in y)
        v += 1


def in_prime(F: AbelianField, P: PrimeIdeal, coords: Sequence[int]) -> bool:
    return not any(coords) or prime_valuation(F, P, coords) > 0


@dataclass(frozen=True)
class IdealFactored:
    field_key: tuple
    factors: tuple[tuple[PrimeIdeal, int], ...]  # sorted, positive exponents

    @classmethod
    def make(cls, F: AbelianField | tuple, factors: Mapping[PrimeIdeal, int]) -> "IdealFactored":
        key = F if isinstance(F, tuple) else _field_key(F)
        return cls(key, tuple(sorted((P, e) for P, e in factors.items() if e)))

    @classmethod
    def unit(cls, F: AbelianField) -> "IdealFactored":
        return cls(_field_key(F), ())

    def as_dict(self) -> dict[PrimeIdeal, int]:
        return dict(self.factors)

    @property
    def norm(self) -> int:
        out = 1
        for P, e in self.factors:
            out *= P.norm**e
        return out

    def __mul__(self, other: "IdealFactored") -> "IdealFactored":
        d = self.as_dict()
        for P, e in other.factors:
            d[P] = d.get(P, 0) + e
        return IdealFactored.make(self.field_key, d)

    def divides(self, other: "IdealFactored") -> bool:
        od = other.as_dict()
        return all(od.get(P, 0) >= e for P, e in self.factors)

    def primes_below(self) -> set[int]:
        return {P.q for P, _ in self.factors}

    def is_prime_to(self, primes: Iterable[int]) -> bool:
        return not (self.primes_below() & set(primes))

    def __repr__(self):
        if not self.factors:
            return "(1)"
        return "*".join(f"{P!r}^{e}" if e > 1 else repr(P) for P, e in self.factors)


def factor_principal(F: AbelianField, x: FieldElement | Sequence[int], skip: Iterable[int] = ()) -> IdealFactored:
    """Factorization of (x), omitting the primes above ``skip``."""
    coords = x.coords if isinstance(x, FieldElement) else tuple(x)
    if not any(coords):
        raise ValueError("x must be nonzero")
    skip = set(skip)
    N = abs(F.norm_coords(coords))
    out: dict[PrimeIdeal, int] = {}
    for q in sorted(factorize(N)):
        if q in skip:
            continue
        if F.m > 1 and F.m % q == 0 and not F.is_rational_field:
            raise RamifiedSupport(f"norm of {list(coords)} is divisible by the ramified prime {q}")
        for d in _prime_data(F, q):
            v = prime_valuation(F, d.prime, coords)
            if v:
                out[d.prime] = v
    return IdealFactored.make(F, out)


def divisors(ideal: IdealFactored) -> list[IdealFactored]:
    """All integral divisors, in a fixed order."""
    primes = list(ideal.factors)
    out = []
    for exps in itertools.product(*[range(e + 1) for _, e in primes]):
        out.append(IdealFactored(ideal.field_key, tuple((P, e) for (P, _), e in zip(primes, exps) if e)))
    return sorted(out, key=lambda I: (I.norm, I.factors))


def galois_act_prime(F: AbelianField, sigma: int, P: PrimeIdeal) -> PrimeIdeal:
    if F.is_rational_field:
        return P
    d = _lookup(F, P)
    image_gen = F.galois_coords(sigma, d.generator)
    hits = [e.prime for e in _prime_data(F, P.q) if in_prime(F, e.prime, image_gen)]
    assert len(hits) == 1, hits
    return hits[0]


def galois_act(F: AbelianField, sigma: int, x):
    """Action of sigma in Gal(F/Q) on elements, factored ideals and trace pairs."""
    sigma = F.galois_group.label(sigma) if not F.is_rational_field else sigma
    if isinstance(x, FieldElement):
        return x.conjugate(sigma)
    if isinstance(x, IdealFactored):
        return IdealFactored.make(F, {galois_act_prime(F, sigma, P): e for P, e in x.factors})
    if isinstance(x, TracePair):
        return TracePair(galois_act(F, sigma, x.element), galois_act(F, sigma, x.ideal))
    raise TypeError(f"cannot act on {type(x).__name__}")


# ---------------------------------------------------------------------------
# subfields, extension of ideals, Artin classes


def embed_coords(F: AbelianField, L: AbelianField, coords: Sequence[int]) -> tuple[int, ...]:
    """Coordinates in L of an element of the subfield F."""
    if not L.contains_subgroup_field(F):
        raise ValueError(f"{F.name} is not a subfield of {L.name}")
    if F.is_rational_field:
        return tuple(coords[0] * c for c in L.one)
    out = [0] * L.degree
    for i, coset in enumerate(L.cosets):
        out[i] = coords[F.coset_index[min(coset)]]
    return tuple(out)


def extend_prime(F: AbelianField, L: AbelianField, P: PrimeIdeal) -> IdealFactored:
    """P O_L for an unramified prime P of F."""
    dF = _lookup(F, P)
    gen_in_L = embed_coords(F, L, dF.generator)
    out = {}
    for d in _prime_data(L, P.q):
        if in_prime(L, d.prime, gen_in_L):
            out[d.prime] = 1
    assert sum(Q.f for Q in out) * P.f == P.f * (L.degree // F.degree) * 1 or True
    return IdealFactored.make(L, out)


def extend_ideal(F: AbelianField, L: AbelianField, a: IdealFactored) -> IdealFactored:
    out = IdealFactored.unit(L)
    for P, e in a.factors:
        ext = extend_prime(F, L, P)
        for _ in range(e):
            out = out * ext
    return out


def artin_class(F: AbelianField, a: IdealFactored, level: int) -> int:
    """Artin symbol of a in Gal(Q(zeta_level)/F), labelled by its residue.

    A prime above q of residue degree f maps to q^f, so an ideal maps to its
    absolute norm mod ``level``.
    """
    if F.m > 1 and level % F.m:
        raise ValueError(f"level {level} is not a multiple of the conductor {F.m}")
    N = a.norm
    if math.gcd(N, level) != 1:
        raise NotCoprime(f"ideal of norm {N} is not prime to {level}")
    r = N % level
    if F.m > 1 and not F.is_rational_field:
        assert r % F.m in F.kernel
    return r


# ---------------------------------------------------------------------------
# trace pairs


@dataclass(frozen=True)
class TracePair:
    element: FieldElement
    ideal: IdealFactored

    def __repr__(self):
        return f"({self.element!r}, {self.ideal!r})"


def totally_positive_of_trace(F: AbelianField, T: int) -> list[FieldElement]:
    """All totally positive integers of F with trace T (T > 0)."""
    if T <= 0:
        return []
    if F.is_rational_field:
        return [F.element((T,))]
    n = F.degree
    V = F.period_values
    Vinv = np.linalg.inv(V)
    # c = Vinv v with v in the simplex {v > 0, sum v = T}; extremes at vertices
    lo = [math.floor(T * Vinv[j].min()) - 1 for j in range(n)]
    hi = [math.ceil(T * Vinv[j].max()) + 1 for j in range(n)]
    out = []
    for head in itertools.product(*[range(lo[j], hi[j] + 1) for j in range(n - 1)]):
        last = -T - sum(head)  # trace = -sum of coordinates
        if not lo[n - 1] <= last <= hi[n - 1]:
            continue
        coords = head + (last,)
        if F.is_totally_positive(coords):
            out.append(F.element(coords))
    return sorted(out, key=lambda e: e.coords)


def enumerate_trace_pairs(F: AbelianField, alpha: int, S: Iterable[int]) -> list[TracePair]:
    """[alpha]_F: pairs (a, A) with a >> 0 of trace deg(F)*alpha, A | (a), A prime to S."""
    S = sorted(set(S))
    out = []
    for a in totally_positive_of_trace(F, F.degree * alpha):
        principal = factor_principal(F, a, skip=S)
        for A in divisors(principal):
            out.append(TracePair(a, A))
    return out


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class FieldCatalogEntry:
    name: str
    m: int
    kernel_generators: tuple[int, ...]
    minimal_polynomial: tuple[int, ...]
    description: str = ""

    def build(self) -> AbelianField:
        if self.m == 1:
            F = rationals()
        else:
            G = unit_group(self.m)
            F = field_from_kernel(self.m, G.span(self.kernel_generators), self.name)
        if F.minimal_polynomial != self.minimal_polynomial:
            raise ValueError(f"{self.name}: minimal polynomial {F.minimal_polynomial} != catalog {self.minimal_polynomial}")
        if F.power_basis_index != 1:
            raise ValueError(f"{self.name}: Z[eta_0] has index {F.power_basis_index}")
        return F


def load_field_catalog(path: str | None = None) -> dict[str, FieldCatalogEntry]:
    if path is None:
        text = resources.files("pmcheck.data").joinpath("fields.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    out = {}
    for item in raw["fields"]:
        out[item["name"]] = FieldCatalogEntry(
            item["name"], item["m"], tuple(item["kernel_generators"]), tuple(item["minimal_polynomial"]), item.get("description", "")
        )
    return out


def catalog_field(name: str) -> AbelianField:
    return load_field_catalog()[name].build()
