"""Finite groups, subgroup lattices, Moebius functions and group rings.

Two group types are used.  :class:`FiniteGroup` is a bare multiplication table,
enough for subgroup lattices of small p-groups.  :class:`FiniteAbelianGroup`
models subquotients of ``(Z/m)^*`` with elements labelled by least positive
residues; every Galois group met at a cyclotomic level is of this kind.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .arith import factorize, is_prime, prime_factors

DEFAULT_CAP = 64


class CapExceeded(ValueError):
    pass


class NotASubgroup(ValueError):
    pass


# ---------------------------------------------------------------------------
# multiplication-table groups


class FiniteGroup:
    """A finite group on the elements ``0..order-1`` given by its table."""

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        name: str = "",
        generators: Sequence[int] | None = None,
        cap: int = DEFAULT_CAP,
        labels: Sequence[Hashable] | None = None,
    ):
        n = len(table)
        if n > cap:
            raise CapExceeded(f"group of order {n} exceeds cap {cap}")
        self.table = tuple(tuple(row) for row in table)
        self.order = n
        self.name = name
        self.generators = tuple(generators) if generators is not None else None
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        self._validate()
        self.identity = next(e for e in range(n) if all(self.table[e][x] == x for x in range(n)))
        self._inverse = [
            next(y for y in range(n) if self.table[x][y] == self.identity) for x in range(n)
        ]

    def _validate(self) -> None:
        n = self.order
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise ValueError("table row is not a permutation")
        rng = random.Random(n)
        triples = (
            [(a, b, c) for a in range(n) for b in range(n) for c in range(n)]
            if n <= 12
            else [(rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(2000)]
        )
        t = self.table
        for a, b, c in triples:
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise ValueError(f"table is not associative at {(a, b, c)}")

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out = self.identity
        for _ in range(k):
            out = self.table[out][a]
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(set(gens))
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        if self.identity not in s:
            return False
        return all(self.table[a][self.inv(b)] in s for a in s for b in s)

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def is_p_group(self, p: int | None = None) -> bool:
        ps = prime_factors(self.order)
        if self.order == 1:
            return True
        return len(ps) == 1 and (p is None or ps[0] == p)

    @property
    def prime(self) -> int:
        ps = prime_factors(self.order)
        if len(ps) != 1:
            raise ValueError(f"{self.name or 'group'} is not a p-group")
        return ps[0]

    def restrict(self, subgroup: frozenset[int], name: str = "") -> "FiniteGroup":
        """The subgroup as a group in its own right."""
        elems = sorted(subgroup)
        index = {e: i for i, e in enumerate(elems)}
        table = [[index[self.table[a][b]] for b in elems] for a in elems]
        return FiniteGroup(table, name=name, labels=[self.labels[e] for e in elems], cap=max(self.order, 1))

    @classmethod
    def from_permutations(cls, gens: Sequence[Sequence[int]], name: str = "", cap: int = DEFAULT_CAP) -> "FiniteGroup":
        degree = len(gens[0])
        ident = tuple(range(degree))
        gens = [tuple(g) for g in gens]
        elems = [ident]
        seen = {ident: 0}
        i = 0
        while i < len(elems):
            x = elems[i]
            for g in gens:
                y = tuple(g[x[j]] for j in range(degree))  # apply x then g
                if y not in seen:
                    if len(elems) >= cap:
                        raise CapExceeded(f"{name}: more than {cap} elements")
                    seen[y] = len(elems)
                    elems.append(y)
            i += 1
        # (a*b)(j) = a(b(j)): right factor acts first
        table = [[seen[tuple(a[b[j]] for j in range(degree))] for b in elems] for a in elems]
        return cls(table, name=name, generators=[seen[g] for g in gens], cap=cap, labels=elems)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)], name=f"C{n}", generators=[1 % n])

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.order})"


# ---------------------------------------------------------------------------
# subgroup lattice and Moebius function


@dataclass(frozen=True)
class SubgroupLattice:
    group: FiniteGroup
    subgroups: tuple[frozenset[int], ...]  # sorted by order, then elements

    @cached_property
    def index(self) -> dict[frozenset[int], int]:
        return {s: i for i, s in enumerate(self.subgroups)}

    @property
    def trivial(self) -> frozenset[int]:
        return self.subgroups[0]

    @property
    def whole(self) -> frozenset[int]:
        return self.subgroups[-1]

    def below(self, s: frozenset[int], strict: bool = True) -> list[frozenset[int]]:
        return [t for t in self.subgroups if t <= s and (not strict or t != s)]

    def __len__(self):
        return len(self.subgroups)

    def __iter__(self):
        return iter(self.subgroups)


def enumerate_subgroups(G: FiniteGroup, cap: int = DEFAULT_CAP) -> SubgroupLattice:
    """All subgroups: cyclic ones first, then joins until nothing new appears."""
    if G.order > cap:
        raise CapExceeded(f"order {G.order} exceeds cap {cap}")
    gens_of: dict[frozenset[int], tuple[int, ...]] = {}
    for g in G.elements:
        c = G.closure([g])
        gens_of.setdefault(c, (g,))
    current = list(gens_of)
    while True:
        new = []
        items = list(gens_of.items())
        for i, (a, ga) in enumerate(items):
            for b, gb in items[i + 1 :]:
                if a <= b or b <= a:
                    continue
                j = G.closure(ga + gb)
                if j not in gens_of:
                    gens_of[j] = ga + gb
                    new.append(j)
        if not new:
            break
        current.extend(new)
    subs = sorted(gens_of, key=lambda s: (len(s), sorted(s)))
    return SubgroupLattice(G, tuple(subs))


class MoebiusTable(Mapping):
    """mu on a subgroup lattice: mu(1) = 1 and mu(K) = -sum over J < K of mu(J)."""

    def __init__(self, lattice: SubgroupLattice, values: Mapping[frozenset[int], int] | None = None):
        self.lattice = lattice
        if values is None:
            values = {}
            for s in lattice.subgroups:
                if s == lattice.trivial:
                    values[s] = 1
                else:
                    values[s] = -sum(values[t] for t in lattice.below(s))
        self._values = dict(values)

    def __getitem__(self, s):
        return self._values[frozenset(s)]

    def __iter__(self):
        return iter(self.lattice.subgroups)

    def __len__(self):
        return len(self._values)

    def corrupted(self, subgroup: frozenset[int], value: int) -> "MoebiusTable":
        """Copy with one entry overwritten; used by the mutation tests."""
        vals = dict(self._values)
        vals[frozenset(subgroup)] = value
        return MoebiusTable(self.lattice, vals)

    def satisfies_recursion(self) -> bool:
        fresh = MoebiusTable(self.lattice)
        return all(fresh[s] == self[s] for s in self.lattice)


def moebius_table(lattice: SubgroupLattice) -> MoebiusTable:
    return MoebiusTable(lattice)


def moebius_of_group(G: FiniteGroup) -> int:
    """mu_G(G) in G's own subgroup lattice."""
    lat = enumerate_subgroups(G, cap=max(G.order, DEFAULT_CAP))
    return moebius_table(lat)[lat.whole]


# ---------------------------------------------------------------------------
# abelian subquotients of (Z/m)^*


def _standard_unit_generators(m: int) -> list[tuple[int, int]]:
    """CRT generators of (Z/m)^* as (residue, order) pairs."""
    gens = []
    for q, e in sorted(factorize(m).items()):
        qe = q**e
        rest = m // qe
        if q == 2:
            local = []
            if e >= 2:
                local.append((qe - 1, 2))
            if e >= 3:
                local.append((5, qe // 4))
        else:
            phi = qe - qe // q
            g = next(
                g
                for g in range(2, qe)
                if g % q and all(pow(g, phi // r, qe) != 1 for r in prime_factors(phi))
            )
            local = [(g, phi)]
        for r, o in local:
            # lift to a residue that is r mod q^e and 1 mod the rest
            if rest == 1:
                lifted = r % m
            else:
                lifted = (r * rest * pow(rest, -1, qe) + qe * pow(qe, -1, rest)) % m
            gens.append((lifted, o))
    return gens


class FiniteAbelianGroup:
    """A subquotient ``A / N`` of ``(Z/m)^*``.

    ``ambient`` is the set of residues of A, ``kernel`` that of N <= A.  Each
    coset is labelled by its least positive residue.
    """

    def __init__(self, modulus: int, ambient: Iterable[int], kernel: Iterable[int] = (1,), name: str = ""):
        self.modulus = modulus
        self.ambient = frozenset(a % modulus for a in ambient)
        self.kernel = frozenset(a % modulus for a in kernel)
        self.name = name
        if 1 % modulus not in self.kernel or not self.kernel <= self.ambient:
            raise NotASubgroup("kernel must be a subgroup of the ambient group")
        self._label = {}
        for a in sorted(self.ambient):
            if a not in self._label:
                coset = {a * n % modulus for n in self.kernel}
                lab = min(coset)
                for c in coset:
                    self._label[c] = lab
        self.elements = tuple(sorted(set(self._label.values())))
        self.identity = self._label[1 % modulus]

    # basic group law ------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.elements)

    def label(self, residue: int) -> int:
        try:
            return self._label[residue % self.modulus]
        except KeyError:
            raise ValueError(f"{residue} mod {self.modulus} is not in {self.name or 'the group'}") from None

    def contains(self, residue: int) -> bool:
        return residue % self.modulus in self._label

    def mul(self, a: int, b: int) -> int:
        return self._label[a * b % self.modulus]

    def inv(self, a: int) -> int:
        return self._label[pow(a, -1, self.modulus)]

    def power(self, a: int, k: int) -> int:
        return self._label[pow(a, k, self.modulus)]

    def element_order(self, a: int) -> int:
        k, x = 1, self.label(a)
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def coset(self, a: int) -> frozenset[int]:
        return frozenset(r for r, lab in self._label.items() if lab == self.label(a))

    def span(self, gens: Iterable[int]) -> frozenset[int]:
        out = {self.identity}
        frontier = [self.identity]
        gens = [self.label(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in out:
                        out.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(out)

    def is_subgroup(self, labels: Iterable[int]) -> bool:
        s = frozenset(labels)
        return self.identity in s and all(self.mul(a, self.inv(b)) in s for a in s for b in s)

    def residues_of(self, labels: Iterable[int]) -> frozenset[int]:
        """Preimage in the ambient group of a set of labels."""
        labels = set(labels)
        return frozenset(r for r, lab in self._label.items() if lab in labels)

    def quotient(self, sub_labels: Iterable[int], name: str = "") -> "FiniteAbelianGroup":
        sub = frozenset(sub_labels)
        if not self.is_subgroup(sub):
            raise NotASubgroup("not a subgroup")
        return FiniteAbelianGroup(self.modulus, self.ambient, self.residues_of(sub), name=name)

    # structure ------------------------------------------------------------
    @cached_property
    def basis(self) -> tuple[tuple[int, int], ...]:
        """Independent generators (label, order) of prime-power orders."""
        out = []
        for ell in prime_factors(self.order):
            sylow = [x for x in self.elements if _is_power_of(self.element_order(x), ell)]
            out.extend(_p_group_basis(self, sylow))
        return tuple(out)

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        by_prime: dict[int, list[int]] = {}
        for _, o in self.basis:
            by_prime.setdefault(prime_factors(o)[0], []).append(o)
        for v in by_prime.values():
            v.sort(reverse=True)
        rank = max((len(v) for v in by_prime.values()), default=0)
        facs = []
        for i in range(rank):
            d = 1
            for v in by_prime.values():
                if i < len(v):
                    d *= v[i]
            facs.append(d)
        return tuple(sorted(facs))

    @cached_property
    def _vectors(self) -> dict[int, tuple[int, ...]]:
        table = {self.identity: tuple(0 for _ in self.basis)}
        for i, (g, o) in enumerate(self.basis):
            new = {}
            for x, vec in table.items():
                y = x
                for k in range(o):
                    v = list(vec)
                    v[i] = k
                    new[y] = tuple(v)
                    y = self.mul(y, g)
            table = new
        return table

    def exponent_vector(self, a: int) -> tuple[int, ...]:
        return self._vectors[self.label(a)]

    def to_finite_group(self, name: str = "") -> FiniteGroup:
        idx = {e: i for i, e in enumerate(self.elements)}
        table = [[idx[self.mul(a, b)] for b in self.elements] for a in self.elements]
        return FiniteGroup(table, name=name or self.name, labels=self.elements, cap=max(self.order, DEFAULT_CAP))

    def __repr__(self):
        return f"FiniteAbelianGroup(mod {self.modulus}, order {self.order}, {self.invariant_factors})"


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _p_group_basis(G: FiniteAbelianGroup, sylow: list[int]) -> list[tuple[int, int]]:
    # pick g of maximal order in the quotient by the current span, then correct
    # it so that its order equals its order in the quotient
    basis: list[tuple[int, int]] = []
    span = frozenset([G.identity])
    while len(span) < len(sylow):
        def qorder(x):
            k, y = 1, x
            while y not in span:
                y = G.mul(y, x)
                k += 1
            return k

        h = max((x for x in sylow if x not in span), key=lambda x: (qorder(x), -x))
        k = qorder(h)
        hk = G.power(h, k)  # lies in span; find s in span with s^k = hk
        s = next(s for s in sorted(span) if G.power(s, k) == hk)
        h2 = G.mul(h, G.inv(s))
        basis.append((h2, k))
        span = G.span([b for b, _ in basis])
    return basis


def unit_group(m: int) -> FiniteAbelianGroup:
    """(Z/m)^* with residues as labels."""
    if m < 3:
        raise ValueError("unit_group needs m >= 3")
    units = [a for a in range(1, m) if math.gcd(a, m) == 1]
    return FiniteAbelianGroup(m, units, name=f"(Z/{m})^*")


def standard_generators(m: int) -> list[tuple[int, int]]:
    return _standard_unit_generators(m)


def transfer_abelian(G: FiniteAbelianGroup, H: Iterable[int], g: int) -> int:
    """Transfer G -> H for abelian G: the power map g -> g^[G:H]."""
    H = frozenset(G.label(h) for h in H)
    if not G.is_subgroup(H):
        raise NotASubgroup("H is not a subgroup of G")
    index = G.order // len(H)
    out = G.power(g, index)
    assert out in H
    return out


# ---------------------------------------------------------------------------
# group actions


@dataclass(frozen=True)
class GroupAction:
    """``act(sigma, x)`` for sigma in the acting group's elements, x in ``targets``."""

    acting: Sequence[Hashable]
    targets: Sequence[Hashable]
    act: Callable[[Hashable, Hashable], Hashable]
    identity: Hashable
    compose: Callable[[Hashable, Hashable], Hashable] | None = None

    def spot_check(self, samples: int = 50, seed: int = 0) -> None:
        rng = random.Random(seed)
        targets = list(self.targets)
        acting = list(self.acting)
        for x in rng.sample(targets, min(samples, len(targets))):
            if self.act(self.identity, x) != x:
                raise ValueError(f"identity moves {x!r}")
            if self.compose is not None:
                s, t = rng.choice(acting), rng.choice(acting)
                if self.act(self.compose(s, t), x) != self.act(s, self.act(t, x)):
                    raise ValueError("action is not compatible with composition")


def trivial_action(acting: Sequence[Hashable], targets: Sequence[Hashable], identity: Hashable) -> GroupAction:
    return GroupAction(acting, targets, lambda s, x: x, identity, compose=lambda s, t: s)


def orbit_stabilizer(action: GroupAction, x: Hashable) -> tuple[frozenset, frozenset]:
    orbit = frozenset(action.act(s, x) for s in action.acting)
    stab = frozenset(s for s in action.acting if action.act(s, x) == x)
    assert len(orbit) * len(stab) == len(action.acting)
    return orbit, stab


# ---------------------------------------------------------------------------
# group rings over Z/p^e


class GroupRingElement:
    """Element of (Z/modulus)[A] for a finite abelian group A."""

    __slots__ = ("group", "modulus", "coefficients")

    def __init__(self, group: FiniteAbelianGroup, modulus: int, coefficients: Mapping[int, int] | None = None):
        self.group = group
        self.modulus = modulus
        coeffs = {}
        for lab, c in (coefficients or {}).items():
            if lab not in group.elements:
                raise ValueError(f"{lab} is not an element label of the group")
            c %= modulus
            if c:
                coeffs[lab] = c
        self.coefficients = coeffs

    @classmethod
    def zero(cls, group: FiniteAbelianGroup, modulus: int) -> "GroupRingElement":
        return cls(group, modulus, {})

    def __getitem__(self, lab: int) -> int:
        return self.coefficients.get(lab, 0)

    def _same(self, other: "GroupRingElement") -> None:
        if other.group is not self.group and other.group.elements != self.group.elements:
            raise ValueError("group mismatch")
        if other.modulus != self.modulus:
            raise ValueError("modulus mismatch")

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._same(other)
        out = dict(self.coefficients)
        for lab, c in other.coefficients.items():
            out[lab] = out.get(lab, 0) + c
        return GroupRingElement(self.group, self.modulus, out)

    def __neg__(self):
        return GroupRingElement(self.group, self.modulus, {k: -v for k, v in self.coefficients.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "GroupRingElement":
        return GroupRingElement(self.group, self.modulus, {k: v * c for k, v in self.coefficients.items()})

    def shift(self, g: int) -> "GroupRingElement":
        """Multiplication by the basis element g."""
        G = self.group
        return GroupRingElement(G, self.modulus, {G.mul(g, k): v for k, v in self.coefficients.items()})

    def reduce(self, modulus: int) -> "GroupRingElement":
        if self.modulus % modulus:
            raise ValueError(f"{modulus} does not divide {self.modulus}")
        return GroupRingElement(self.group, modulus, self.coefficients)

    def push_forward(self, basis_map: Callable[[int], int], target: FiniteAbelianGroup, modulus: int | None = None) -> "GroupRingElement":
        modulus = self.modulus if modulus is None else modulus
        if self.modulus % modulus:
            raise ValueError(f"{modulus} does not divide {self.modulus}")
        out: dict[int, int] = {}
        for lab, c in self.coefficients.items():
            y = basis_map(lab)
            out[y] = out.get(y, 0) + c
        return GroupRingElement(target, modulus, out)

    def is_zero(self) -> bool:
        return not self.coefficients

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return (
            self.modulus == other.modulus
            and self.group.elements == other.group.elements
            and self.coefficients == other.coefficients
        )

    def as_table(self) -> dict[int, int]:
        return {lab: self[lab] for lab in self.group.elements}

    def __repr__(self):
        body = " + ".join(f"{c}[{lab}]" for lab, c in sorted(self.coefficients.items())) or "0"
        return f"GroupRingElement(mod {self.modulus}: {body})"


@dataclass
class TraceIdealResult:
    passed: bool
    reason: str = ""
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


def trace_ideal_test(x: GroupRingElement, action: GroupAction) -> TraceIdealResult:
    """Membership of x in the trace ideal of the acting group.

    x must be fixed by the action (coefficients constant on orbits); it then
    lies in the trace ideal iff each orbit's coefficient is divisible by the
    order of the stabilizer of a point of that orbit.
    """
    if set(action.targets) != set(x.group.elements):
        raise ValueError("action does not act on the group basis of x")
    M = x.modulus
    seen: set = set()
    for y in x.group.elements:
        if y in seen:
            continue
        orbit, stab = orbit_stabilizer(action, y)
        seen |= orbit
        c = x[y]
        for z in orbit:
            if x[z] != c:
                return TraceIdealResult(False, "not fixed by the action", {"orbit": sorted(orbit), "at": z, "coefficient": x[z], "expected": c})
        # in Z/M the ideal |stab| Z/M is generated by gcd(|stab|, M)
        need = math.gcd(len(stab), M)
        if c % need:
            return TraceIdealResult(False, "coefficient not divisible by stabilizer order", {"element": y, "coefficient": c, "stabilizer_order": len(stab), "modulus": M})
    return TraceIdealResult(True)


# ---------------------------------------------------------------------------
# p-group catalog


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    p: int
    group: FiniteGroup


def load_catalog(path: str | None = None) -> list[CatalogEntry]:
    """Read the p-group catalog (JSON; see README for the format)."""
    if path is None:
        text = resources.files("pmcheck.data").joinpath("pgroups.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    out = []
    for item in raw["groups"]:
        if "table" in item:
            G = FiniteGroup(item["table"], name=item["name"])
        else:
            G = FiniteGroup.from_permutations(item["generators"], name=item["name"])
        if G.order != item["order"]:
            raise ValueError(f"{item['name']}: expected order {item['order']}, got {G.order}")
        if not is_prime(item["p"]) or not G.is_p_group(item["p"]):
            raise ValueError(f"{item['name']} is not a {item['p']}-group")
        out.append(CatalogEntry(item["name"], item["p"], G))
    return out
