"""Exact scalar arithmetic.

Rationals are :class:`fractions.Fraction` throughout; they are always stored in
lowest terms with a positive denominator, which is all the canonical-form
bookkeeping needed here.  Cyclotomic numbers live in Q(zeta_n) in the power basis
``1, zeta, ..., zeta^(phi(n)-1)`` reduced modulo the n-th cyclotomic polynomial.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from mpmath import iv

Rational = Fraction
RationalLike = Union[int, Fraction]

INFINITY = math.inf

# mpmath's interval context carries a global precision
_IV_LOCK = threading.Lock()

START_BITS = 64
MAX_BITS = 2**14


class NotRational(ArithmeticError):
    """A cyclotomic number expected to be rational has a non-constant part."""


class ZeroSuspected(ArithmeticError):
    """Interval refinement could not separate a value from zero."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of ``|n|`` in increasing order."""
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factorize(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    result = n
    for q in prime_factors(n):
        result -= result // q
    return result


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(x: RationalLike, p: int) -> float | int:
    """v_p(x) for a rational x; ``math.inf`` for zero."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def is_p_integral(x: RationalLike, p: int) -> bool:
    return Fraction(x).denominator % p != 0


def mod_reduce(x: RationalLike, modulus: int) -> int:
    """Image of a rational with denominator prime to ``modulus`` in Z/modulus."""
    x = Fraction(x)
    if math.gcd(x.denominator, modulus) != 1:
        raise ZeroDivisionError(f"{x} is not integral at the primes of {modulus}")
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


# ---------------------------------------------------------------------------
# cyclotomic numbers


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1] // lead
        out[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    assert not any(a[: len(b) - 1]), "inexact polynomial division"
    return out


@lru_cache(maxsize=None)
def _reduction_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row j is zeta_n^j written in the reduced power basis, 0 <= j < n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by zeta and reduce the x^deg term using the monic Phi_n
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


class CyclotomicNumber:
    """An element of Q(zeta_n), immutable.

    ``coefficients[i]`` is the coordinate on ``zeta_n**i`` for ``0 <= i < phi(n)``.
    """

    __slots__ = ("order", "coefficients", "_hash")

    def __init__(self, order: int, coefficients: Sequence[RationalLike]):
        if order < 1:
            raise ValueError("order must be positive")
        deg = euler_phi(order)
        coeffs = [Fraction(c) for c in coefficients]
        if len(coeffs) > deg:
            coeffs = list(_reduce_exponents(order, coeffs))
        coeffs += [Fraction(0)] * (deg - len(coeffs))
        self.order = order
        self.coefficients = tuple(coeffs)
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def rational(cls, order: int, value: RationalLike) -> "CyclotomicNumber":
        return cls(order, [value])

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "CyclotomicNumber":
        return cls(order, _reduction_table(order)[power % order])

    @classmethod
    def from_exponents(
        cls, order: int, weights: Mapping[int, RationalLike] | Sequence[RationalLike]
    ) -> "CyclotomicNumber":
        """Sum of ``w_j * zeta**j``; ``weights`` indexed by exponent j (taken mod n)."""
        items = weights.items() if isinstance(weights, Mapping) else enumerate(weights)
        buckets = [Fraction(0)] * order
        for j, w in items:
            if w:
                buckets[j % order] += w
        return cls(order, _reduce_exponents(order, buckets))

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "CyclotomicNumber") -> None:
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def _coerce(self, other) -> "CyclotomicNumber":
        if isinstance(other, CyclotomicNumber):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber.rational(self.order, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicNumber(
            self.order, [a + b for a, b in zip(self.coefficients, other.coefficients)]
        )

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, [-a for a in self.coefficients])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.order, [a * other for a in self.coefficients])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coefficients, other.coefficients
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return CyclotomicNumber(self.order, _reduce_exponents(self.order, prod))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = CyclotomicNumber.rational(self.order, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coefficients[0] == other
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self.order == other.order and self.coefficients == other.coefficients

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.coefficients))
        return self._hash

    def __repr__(self):
        terms = [f"({c})*z^{i}" for i, c in enumerate(self.coefficients) if c]
        return f"Cyclo[{self.order}](" + (" + ".join(terms) or "0") + ")"

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def is_rational(self) -> bool:
        return not any(self.coefficients[1:])

    def galois(self, a: int) -> "CyclotomicNumber":
        """Image under zeta -> zeta**a, gcd(a, n) = 1."""
        if math.gcd(a, self.order) != 1:
            raise ValueError(f"{a} is not a unit mod {self.order}")
        return CyclotomicNumber.from_exponents(
            self.order, {i * a: c for i, c in enumerate(self.coefficients) if c}
        )


def _reduce_exponents(order: int, weights: Sequence[Fraction]) -> tuple[Fraction, ...]:
    table = _reduction_table(order)
    deg = euler_phi(order)
    out = [Fraction(0)] * deg
    for j, w in enumerate(weights):
        if not w:
            continue
        row = table[j % order]
        for i in range(deg):
            r = row[i]
            if r:
                out[i] += r * w
    return tuple(out)


def cyclo_to_rational(z: CyclotomicNumber) -> Fraction:
    if not z.is_rational():
        raise NotRational(f"non-constant part in {z!r}")
    return z.coefficients[0]


# ---------------------------------------------------------------------------
# sign certification


@dataclass(frozen=True)
class IntervalApprox:
    low: Fraction
    high: Fraction

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    def contains_zero(self) -> bool:
        return self.low <= 0 <= self.high


def _endpoints(x) -> tuple[Fraction, Fraction]:
    out = []
    for sign, man, exp, _ in x._mpi_:
        v = Fraction(int(man)) * Fraction(2) ** exp
        out.append(-v if sign else v)
    return out[0], out[1]


def embed_interval(z: CyclotomicNumber, embedding: int, bits: int) -> tuple[IntervalApprox, IntervalApprox]:
    """Real and imaginary parts of z under zeta -> exp(2 pi i embedding / n)."""
    n = z.order
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            re, im = _embed(z, embedding, n)
        finally:
            iv.prec = saved
    return IntervalApprox(*_endpoints(re)), IntervalApprox(*_endpoints(im))


def _embed(z: CyclotomicNumber, embedding: int, n: int):
    re = iv.mpf(0)
    im = iv.mpf(0)
    for i, c in enumerate(z.coefficients):
        if not c:
            continue
        theta = 2 * iv.pi * ((i * embedding) % n) / n
        coef = iv.mpf(c.numerator) / c.denominator
        re += coef * iv.cos(theta)
        im += coef * iv.sin(theta)
    return re, im


def certify_sign(z: CyclotomicNumber, embedding: int) -> int:
    """Sign (+1 or -1) of the real number z under the given embedding.

    Precision starts at 64 bits and doubles until zero is excluded; past
    2**14 bits the value is taken to be zero and :class:`ZeroSuspected` raised.
    """
    if math.gcd(embedding, z.order) != 1:
        raise ValueError("embedding index must be a unit")
    if z.is_rational():
        c = z.coefficients[0]
        if c == 0:
            raise ZeroSuspected("exact zero")
        return 1 if c > 0 else -1
    bits = START_BITS
    while bits <= MAX_BITS:
        re, _ = embed_interval(z, embedding, bits)
        if re.low > 0:
            return 1
        if re.high < 0:
            return -1
        bits *= 2
    raise ZeroSuspected(f"could not separate {z!r} from 0 at {MAX_BITS} bits")


def lcm_all(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out
