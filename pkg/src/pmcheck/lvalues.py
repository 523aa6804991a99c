"""Values of partial zeta functions at negative integers.

Everything is exact.  Partial zeta values of an abelian field F at level m'
are assembled from S-truncated Dirichlet L-values:

    zeta_{F,S}(1-k, delta^(x)) = 1/|G| * sum_chi conj(chi(x)) * prod_{psi | G = chi} L_S(1-k, psi)

where G = Gal(Q(zeta_m')/F) sits inside (Z/m')^* and psi runs over the Dirichlet
characters mod m' restricting to chi.  Each L_S(1-k, psi) is
``-B_{k,psi0}/k * prod_{q in S}(1 - psi0(q) q^(k-1))`` with psi0 primitive.
"""

from __future__ import annotations

import contextlib
import itertools
import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .abfield import AbelianField
from .arith import CyclotomicNumber, cyclo_to_rational, lcm_all, prime_factors
from .grouplat import FiniteAbelianGroup, unit_group

BERNOULLI_MAX = 64
CACHE_ENV = "PMCHECK_CACHE_DIR"
CACHE_FILE = "bernoulli.txt"
CACHE_HEADER = "# pmcheck bernoulli cache v1: lines 'k numerator/denominator', B_1 = -1/2"


class NonPrimitive(ValueError):
    pass


class LevelMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Bernoulli numbers


def _compute_bernoulli(n: int) -> list[Fraction]:
    # sum_{j<=n} C(n+1, j) B_j = 0
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B


_EXACT_BERNOULLI = tuple(_compute_bernoulli(BERNOULLI_MAX))


class _BernoulliState:
    def __init__(self):
        self.lock = threading.RLock()
        self.values: tuple[Fraction, ...] = _EXACT_BERNOULLI
        self.generation = 0


_STATE = _BernoulliState()
_MEMO: dict[tuple, object] = {}
_MEMO_LOCK = threading.Lock()


def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    vals = _STATE.values
    if k < len(vals):
        return vals[k]
    return _compute_bernoulli(k)[k]


def bernoulli_generation() -> int:
    return _STATE.generation


@contextlib.contextmanager
def bernoulli_override(values: Mapping[int, Fraction]) -> Iterator[None]:
    """Temporarily replace selected Bernoulli numbers (used for mutation testing)."""
    with _STATE.lock:
        saved = _STATE.values
        new = list(saved)
        for k, v in values.items():
            new[k] = Fraction(v)
        _STATE.values = tuple(new)
        _STATE.generation += 1
    try:
        yield
    finally:
        with _STATE.lock:
            _STATE.values = saved
            _STATE.generation += 1


def install_bernoulli_table(values: Mapping[int, Fraction]) -> None:
    """Permanently install Bernoulli values, e.g. read from a cache file."""
    with _STATE.lock:
        new = list(_EXACT_BERNOULLI)
        for k, v in values.items():
            if 0 <= k < len(new):
                new[k] = Fraction(v)
        _STATE.values = tuple(new)
        _STATE.generation += 1


def reset_bernoulli_table() -> None:
    install_bernoulli_table({})


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.path.expanduser("~")) / ".cache" / "pmcheck"


def write_bernoulli_cache(path: Path | str, upto: int = BERNOULLI_MAX) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [CACHE_HEADER]
    for k in range(upto + 1):
        b = _EXACT_BERNOULLI[k]
        lines.append(f"{k} {b.numerator}/{b.denominator}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_bernoulli_cache(path: Path | str) -> dict[int, Fraction]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            k, val = line.split()
            out[int(k)] = Fraction(val)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: malformed entry {line!r}") from exc
    return out


def verify_bernoulli_cache(path: Path | str) -> list[tuple[int, Fraction, Fraction]]:
    """Entries (k, cached, correct) that disagree with recomputation."""
    bad = []
    for k, v in sorted(read_bernoulli_cache(path).items()):
        truth = _EXACT_BERNOULLI[k] if k <= BERNOULLI_MAX else _compute_bernoulli(k)[k]
        if v != truth:
            bad.append((k, v, truth))
    return bad


def bernoulli_poly_eval(k: int, r: Fraction | int) -> Fraction:
    """B_k(r) = sum_j C(k, j) B_j r^(k-j)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = Fraction(r)
    return sum((math.comb(k, j) * bernoulli(j) * r ** (k - j) for j in range(k + 1)), Fraction(0))


def _memo(key, build):
    key = (bernoulli_generation(),) + key
    with _MEMO_LOCK:
        if key in _MEMO:
            return _MEMO[key]
    val = build()
    with _MEMO_LOCK:
        _MEMO.setdefault(key, val)
    return val


def clear_memo() -> None:
    with _MEMO_LOCK:
        _MEMO.clear()


# ---------------------------------------------------------------------------
# Dirichlet characters


class DirichletCharacter:
    """A character of (Z/modulus)^* with values zeta_order^e.

    ``exponents`` maps each unit residue to e mod ``order``.
    """

    def __init__(self, modulus: int, order: int, exponents: Mapping[int, int]):
        self.modulus = modulus
        self.order = order
        self.exponents = {a % modulus: e % order for a, e in exponents.items()}

    def exponent(self, a: int) -> int | None:
        return self.exponents.get(a % self.modulus)

    def value(self, a: int) -> CyclotomicNumber:
        e = self.exponent(a)
        if e is None:
            return CyclotomicNumber.rational(self.order, 0)
        return CyclotomicNumber.zeta(self.order, e)

    def is_trivial(self) -> bool:
        return not any(self.exponents.values())

    @cached_property
    def conductor(self) -> int:
        for d in sorted(d for d in range(1, self.modulus + 1) if self.modulus % d == 0):
            if all(e == 0 for a, e in self.exponents.items() if (a - 1) % d == 0):
                return d
        return self.modulus

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @cached_property
    def primitive_core(self) -> "DirichletCharacter":
        f = self.conductor
        if f == self.modulus:
            return self
        exps = {}
        for a, e in self.exponents.items():
            exps.setdefault(a % f, e)
        if f == 1:
            exps = {0: 0}
        return DirichletCharacter(f, self.order, exps)

    def key(self) -> tuple:
        return (self.modulus, self.order, tuple(sorted(self.exponents.items())))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, conductor {self.conductor})"


def characters(modulus: int) -> tuple[FiniteAbelianGroup, int, list[tuple[tuple[int, ...], DirichletCharacter]]]:
    """All characters mod ``modulus``, indexed by dual exponent vectors on the unit-group basis."""

    def build():
        if modulus <= 2:
            return None, 1, [((), DirichletCharacter(modulus, 1, {1 % modulus: 0}))]
        G = unit_group(modulus)
        basis = G.basis
        N = lcm_all(o for _, o in basis)
        vecs = {a: G.exponent_vector(a) for a in G.elements}
        out = []
        for t in itertools.product(*[range(o) for _, o in basis]):
            exps = {a: sum(ti * vi * (N // o) for ti, vi, (_, o) in zip(t, v, basis)) % N for a, v in vecs.items()}
            out.append((t, DirichletCharacter(modulus, N, exps)))
        return G, N, out

    return _memo(("chars", modulus), build)


def quadratic_character(modulus: int) -> DirichletCharacter:
    """The unique real primitive character for modulus 4 or an odd prime."""
    if modulus == 4:
        return DirichletCharacter(4, 2, {1: 0, 3: 1})
    exps = {a: (0 if pow(a, (modulus - 1) // 2, modulus) == 1 else 1) for a in range(1, modulus)}
    return DirichletCharacter(modulus, 2, exps)


def trivial_character() -> DirichletCharacter:
    return DirichletCharacter(1, 1, {0: 0})


def generalized_bernoulli(psi: DirichletCharacter, k: int) -> CyclotomicNumber:
    """B_{k,psi} = f^(k-1) sum_{a=1}^f psi(a) B_k(a/f) for primitive psi."""
    if not psi.is_primitive():
        raise NonPrimitive(f"character mod {psi.modulus} has conductor {psi.conductor}")
    if k < 1:
        raise ValueError("k must be positive")

    def build():
        f = psi.modulus
        buckets = [Fraction(0)] * psi.order
        for a in range(1, f + 1):
            e = psi.exponent(a)
            if e is None:
                continue
            buckets[e] += bernoulli_poly_eval(k, Fraction(a, f))
        scale = Fraction(f) ** (k - 1)
        return CyclotomicNumber.from_exponents(psi.order, [b * scale for b in buckets])

    return _memo(("gb", psi.key(), k), build)


def primitive_L_value(psi: DirichletCharacter, k: int) -> CyclotomicNumber:
    """L(1-k, psi0) = -B_{k,psi0}/k for the primitive core psi0, no Euler factors removed."""
    return generalized_bernoulli(psi.primitive_core, k) * Fraction(-1, k)


def truncated_L_value(psi: DirichletCharacter, k: int, S: Iterable[int]) -> CyclotomicNumber:
    """L_S(1-k, psi) = (-B_{k,psi0}/k) prod_{q in S} (1 - psi0(q) q^(k-1))."""
    S = sorted(set(S))
    if any(q not in S for q in prime_factors(psi.modulus)):
        raise LevelMismatch(f"modulus {psi.modulus} has a prime outside S = {S}")
    return _euler_truncate(psi, primitive_L_value(psi, k), k, S)


def _euler_truncate(psi: DirichletCharacter, val: CyclotomicNumber, k: int, S: Iterable[int]) -> CyclotomicNumber:
    psi0 = psi.primitive_core
    for q in S:
        val = val * (CyclotomicNumber.rational(psi0.order, 1) - psi0.value(q) * (q ** (k - 1)))
    return val


def _restriction_key(t: tuple[int, ...], G: FiniteAbelianGroup, N: int, subgroup: Iterable[int]) -> tuple[int, ...]:
    return tuple(_exp(t, G, N, h) for h in subgroup)


def _exp(t, G, N, a):
    v = G.exponent_vector(a)
    return sum(ti * vi * (N // o) for ti, vi, (_, o) in zip(t, v, G.basis)) % N


# ---------------------------------------------------------------------------
# partial zeta values


def galois_group_at_level(F: AbelianField, level: int) -> tuple[int, ...]:
    """Residues a mod level with a mod m in the kernel of F: Gal(Q(zeta_level)/F)."""
    if F.m > 1 and level % F.m:
        raise LevelMismatch(f"level {level} is not a multiple of {F.m}")
    return _galois_at_level(F, level)


@lru_cache(maxsize=None)
def _galois_at_level(F: AbelianField, level: int) -> tuple[int, ...]:
    out = []
    for a in range(1, level + 1):
        if math.gcd(a, level) != 1:
            continue
        if F.is_rational_field or (a % F.m) in F.kernel:
            out.append(a % level)
    return tuple(sorted(set(out)))


@lru_cache(maxsize=None)
def _galois_set(F: AbelianField, level: int) -> frozenset[int]:
    return frozenset(galois_group_at_level(F, level))


def _check_level(level: int, S: Iterable[int]) -> None:
    if any(q not in set(S) for q in prime_factors(level)):
        raise LevelMismatch(f"level {level} has a prime outside S")


def dedekind_zeta_value(F: AbelianField, k: int, S: Iterable[int] = ()) -> Fraction:
    """zeta_{F,S}(1-k) as a product of L-values over the characters of (Z/m)^*/H_F.

    With S empty this is the complete Dedekind zeta value.
    """
    S = sorted(set(S))
    if F.m <= 2:
        psis = [trivial_character()]
        N = 1
    else:
        _, N, chars = characters(F.m)
        psis = [psi for _, psi in chars if all(psi.exponent(h) == 0 for h in F.kernel)]
    assert len(psis) == F.degree
    val = CyclotomicNumber.rational(N, 1)
    for psi in psis:
        val = val * _euler_truncate(psi, primitive_L_value(psi, k), k, S)
    return cyclo_to_rational(val)


def partial_zeta_table(F: AbelianField, level: int, k: int, S: Iterable[int]) -> dict[int, Fraction]:
    """x -> zeta_{F,S}(1-k, delta^(x)) for x in Gal(Q(zeta_level)/F)."""
    S = tuple(sorted(set(S)))
    _check_level(level, S)
    return _memo(("pz", F.m, tuple(sorted(F.kernel)), level, k, S), lambda: _partial_zeta_table(F, level, k, S))


def _partial_zeta_table(F: AbelianField, level: int, k: int, S: tuple[int, ...]) -> dict[int, Fraction]:
    Gal = galois_group_at_level(F, level)
    if level <= 2:
        return {Gal[0]: cyclo_to_rational(truncated_L_value(trivial_character(), k, S))}
    G, N, chars = characters(level)
    groups: dict[tuple[int, ...], list] = {}
    for t, psi in chars:
        groups.setdefault(_restriction_key(t, G, N, Gal), []).append(psi)
    assert all(len(v) == F.degree for v in groups.values())
    # accumulate sum_chi conj(chi(x)) * prod L(psi) in exponent buckets per x
    products = []
    for key, psis in groups.items():
        prod = CyclotomicNumber.rational(N, 1)
        for psi in psis:
            prod = prod * truncated_L_value(psi, k, S)
        products.append((dict(zip(Gal, key)), prod))
    h = len(Gal)
    out = {}
    for x in Gal:
        total = CyclotomicNumber.rational(N, 0)
        for chi, prod in products:
            total = total + prod * CyclotomicNumber.zeta(N, -chi[x])
        out[x] = cyclo_to_rational(total) / h
    return out


def partial_zeta(F: AbelianField, level: int, x: int, k: int, S: Iterable[int]) -> Fraction:
    table = partial_zeta_table(F, level, k, S)
    try:
        return table[x % level]
    except KeyError:
        raise LevelMismatch(f"{x} mod {level} is not in Gal(Q(zeta_{level})/{F.name})") from None


def partial_zeta_tilde(F: AbelianField, level: int, x: int, k: int, S: Iterable[int]) -> Fraction:
    """2^(-[F:Q]) zeta_{F,S}(1-k, delta^(x))."""
    return partial_zeta(F, level, x, k, S) / 2**F.degree


def partial_zeta_Q_oracle(level: int, a: int, k: int, S: Iterable[int]) -> Fraction:
    """Hurwitz route for F = Q: -(m^(k-1)/k) B_k(a/m), then Euler factors for S outside m."""
    if math.gcd(a, level) != 1:
        raise ValueError("a must be a unit")
    S = set(S)
    _check_level(level, S)
    extra = sorted(q for q in S if level % q)

    def hurwitz(b: int) -> Fraction:
        b = b % level or level
        return -Fraction(level) ** (k - 1) / k * bernoulli_poly_eval(k, Fraction(b, level))

    total = Fraction(0)
    for r in range(len(extra) + 1):
        for T in itertools.combinations(extra, r):
            q = math.prod(T)
            total += (-1) ** r * Fraction(q) ** (k - 1) * hurwitz(a * pow(q, -1, level))
    return total


# ---------------------------------------------------------------------------
# locally constant functions and the twisted difference


@dataclass(frozen=True)
class LocallyConstantFunction:
    """A rational function on Gal(Q(zeta_level)/F), labelled by residues."""

    field: AbelianField
    level: int
    values: tuple[tuple[int, Fraction], ...]  # sorted (residue, value), zeros omitted

    @classmethod
    def make(cls, F: AbelianField, level: int, values: Mapping[int, Fraction | int]) -> "LocallyConstantFunction":
        Gal = _galois_set(F, level)
        clean = {}
        for x, v in values.items():
            x %= level
            if x not in Gal:
                raise LevelMismatch(f"{x} mod {level} is not in Gal(Q(zeta_{level})/{F.name})")
            v = Fraction(v)
            if v:
                clean[x] = clean.get(x, Fraction(0)) + v
        return cls(F, level, tuple(sorted((x, v) for x, v in clean.items() if v)))

    @classmethod
    def indicator(cls, F: AbelianField, level: int, x: int) -> "LocallyConstantFunction":
        return cls.make(F, level, {x: 1})

    @classmethod
    def constant(cls, F: AbelianField, level: int, c: Fraction | int = 1) -> "LocallyConstantFunction":
        return cls.make(F, level, {x: c for x in galois_group_at_level(F, level)})

    def __call__(self, x: int) -> Fraction:
        return dict(self.values).get(x % self.level, Fraction(0))

    def shift(self, g: int) -> "LocallyConstantFunction":
        """eps_g(x) = eps(g x)."""
        ginv = pow(g, -1, self.level)
        return LocallyConstantFunction.make(self.field, self.level, {x * ginv: v for x, v in self.values})

    def __add__(self, other: "LocallyConstantFunction") -> "LocallyConstantFunction":
        if other.level != self.level:
            raise LevelMismatch("levels differ")
        d = dict(self.values)
        for x, v in other.values:
            d[x] = d.get(x, Fraction(0)) + v
        return LocallyConstantFunction.make(self.field, self.level, d)

    def scale(self, c: Fraction | int) -> "LocallyConstantFunction":
        return LocallyConstantFunction.make(self.field, self.level, {x: c * v for x, v in self.values})

    @property
    def is_even(self) -> bool:
        return all(self(-x) == v for x, v in self.values)

    @property
    def mass(self) -> Fraction:
        return sum((v for _, v in self.values), Fraction(0))

    def is_p_integral(self, p: int) -> bool:
        return all(v.denominator % p for _, v in self.values)


def zeta_tilde(eps: LocallyConstantFunction, k: int, S: Iterable[int]) -> Fraction:
    """zeta~_F(1-k, eps), extended linearly from indicators."""
    table = partial_zeta_table(eps.field, eps.level, k, S)
    total = sum((v * table[x] for x, v in eps.values), Fraction(0))
    return total / 2**eps.field.degree


def delta_tilde(
    eps: LocallyConstantFunction, g: int, k: int, S: Iterable[int], norm: Fraction | int | None = None
) -> Fraction:
    """Delta~_g(1-k, eps) = zeta~(1-k, eps) - N(g)^k zeta~(1-k, eps_g).

    ``norm`` is the exact representative N(g); it defaults to the least
    positive residue label of g.
    """
    g %= eps.level
    if norm is None:
        norm = g
    norm = Fraction(norm)
    return zeta_tilde(eps, k, S) - norm**k * zeta_tilde(eps.shift(g), k, S)
