"""Exact zero tests for sums of cosines at rational angles.

A sum sum_i cos(pi n_i / p_i) is an algebraic number living in the cyclotomic
field Q(zeta_{2P}) with P = prod p_i: each cosine is (zeta^k + zeta^{-k})/2
with k = n_i P / p_i.  Representing elements as rational-coefficient
polynomials reduced modulo the cyclotomic polynomial Phi_{2P} makes "is this
sum exactly zero?" a finite, float-free question.  That is the whole point of
this module: the scans it runs certify non-vanishing exactly, with big-integer
rationals everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CombinatorialLimitError, EmbeddingError

MODULUS_CAP = 10_000
TUPLE_CAP = 100_000

_PHI_CACHE: dict[int, tuple[int, ...]] = {}
_POWER_TABLES: dict[int, list[tuple[int, ...]]] = {}


def totient(m: int) -> int:
    """Euler phi by trial-division factorization (elementary on purpose)."""
    if m < 1:
        raise ValueError(f"totient needs m >= 1, got {m}")
    result = m
    k = m
    p = 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


def _divisors(m: int) -> list[int]:
    small, large = [], []
    k = 1
    while k * k <= m:
        if m % k == 0:
            small.append(k)
            if k != m // k:
                large.append(m // k)
        k += 1
    return small + large[::-1]


def cyclotomic_polynomial(m: int) -> list[int]:
    """Integer coefficients of Phi_m, constant term first.

    Built by dividing x^m - 1 by the product of Phi_d over proper divisors d
    (memoized, so the recursion shares work across calls).  The division is
    exact; a nonzero remainder would mean an arithmetic fault and raises.
    """
    if not 1 <= m <= MODULUS_CAP:
        raise ValueError(f"m must be in 1..{MODULUS_CAP}, got {m}")
    cached = _PHI_CACHE.get(m)
    if cached is not None:
        return list(cached)
    if m == 1:
        _PHI_CACHE[1] = (-1, 1)
        return [-1, 1]

    divisor_product = np.array([1], dtype=np.int64)
    for d in _divisors(m)[:-1]:
        phi_d = np.array(cyclotomic_polynomial(d), dtype=np.int64)
        divisor_product = np.convolve(divisor_product, phi_d)

    numerator = np.zeros(m + 1, dtype=np.int64)
    numerator[0] = -1
    numerator[m] = 1
    g = divisor_product.size - 1  # degree of the (monic) divisor product
    quotient = np.zeros(m + 1 - g, dtype=np.int64)
    work = numerator.copy()
    for k in range(m, g - 1, -1):
        c = work[k]
        if c != 0:
            quotient[k - g] = c
            work[k - g : k] -= c * divisor_product[:g]
            work[k] = 0
    if np.any(work[:g] != 0):
        raise ArithmeticError(f"cyclotomic division left a remainder at m={m}")
    coeffs = tuple(int(c) for c in quotient)
    _PHI_CACHE[m] = coeffs
    return list(coeffs)


def _power_mod(m: int, k: int) -> tuple[int, ...]:
    """Coefficients of x^k reduced modulo Phi_m (length phi(m), exact ints)."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    table = _POWER_TABLES.setdefault(m, [tuple(1 if i == 0 else 0 for i in range(deg))])
    while len(table) <= k:
        prev = table[-1]
        lead = prev[deg - 1] if deg >= 1 else 0
        shifted = [0] + list(prev[: deg - 1])
        if lead:
            # x^deg = -(phi_0 + phi_1 x + ... ) for the monic modulus
            shifted = [s - lead * phi[i] for i, s in enumerate(shifted)]
        table.append(tuple(shifted))
    return table[k]


@dataclass(frozen=True)
class CyclotomicElement:
    """A rational polynomial of degree < phi(m) modulo Phi_m."""

    modulus: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        expected = totient(self.modulus)
        if len(self.coeffs) != expected:
            raise ValueError(
                f"need {expected} coefficients for modulus {self.modulus}, got {len(self.coeffs)}"
            )

    @classmethod
    def zero(cls, modulus: int) -> "CyclotomicElement":
        return cls(modulus, tuple(Fraction(0) for _ in range(totient(modulus))))

    @classmethod
    def rational(cls, modulus: int, value) -> "CyclotomicElement":
        c = [Fraction(0)] * totient(modulus)
        c[0] = Fraction(value)
        return cls(modulus, tuple(c))

    def _check(self, other: "CyclotomicElement"):
        if self.modulus != other.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")

    def __add__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        self._check(other)
        return CyclotomicElement(
            self.modulus, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        self._check(other)
        return CyclotomicElement(
            self.modulus, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self) -> "CyclotomicElement":
        return CyclotomicElement(self.modulus, tuple(-a for a in self.coeffs))

    def scaled(self, factor) -> "CyclotomicElement":
        q = Fraction(factor)
        return CyclotomicElement(self.modulus, tuple(a * q for a in self.coeffs))

    def __mul__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        self._check(other)
        n = len(self.coeffs)
        conv = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        conv[i + j] += a * b
        reduced = list(conv[:n])
        for i in range(n, 2 * n - 1):
            c = conv[i]
            if c:
                row = _power_mod(self.modulus, i)
                for j, t in enumerate(row):
                    if t:
                        reduced[j] += c * t
        return CyclotomicElement(self.modulus, tuple(reduced))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def evaluate(self) -> complex:
        """Numeric value at the primitive root exp(2*pi*i/modulus)."""
        zeta = complex(math.cos(2 * math.pi / self.modulus), math.sin(2 * math.pi / self.modulus))
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * zeta + complex(c)
        return acc


def cos_as_element(n: int, p: int, big_p: int) -> CyclotomicElement:
    """cos(pi*n/p) as an element of Q(zeta_{2*big_p}); requires p | big_p.

    The cosine is (zeta^k + zeta^(2P-k))/2 with k = n*(big_p/p), zeta the
    primitive 2*big_p-th root of unity.
    """
    if big_p % p != 0:
        raise EmbeddingError(f"{p} does not divide the ambient product {big_p}")
    if not 1 <= n < p:
        raise ValueError(f"need 1 <= n < p, got n={n}, p={p}")
    m = 2 * big_p
    if m > MODULUS_CAP:
        raise CombinatorialLimitError(f"modulus 2P={m} exceeds cap {MODULUS_CAP}")
    k = n * (big_p // p)
    half = Fraction(1, 2)
    fwd = _power_mod(m, k)
    bwd = _power_mod(m, m - k)
    return CyclotomicElement(m, tuple((Fraction(a + b)) * half for a, b in zip(fwd, bwd)))


def cos_sum_is_zero(ps, ns) -> bool:
    """Exact zero test of sum_i cos(pi*ns[i]/ps[i]); no floating point anywhere."""
    ps = [int(p) for p in ps]
    ns = [int(n) for n in ns]
    if len(ps) != len(ns) or not ps:
        raise ValueError("ps and ns must be same nonzero length")
    big_p = math.prod(ps)
    if 2 * big_p > MODULUS_CAP:
        raise CombinatorialLimitError(f"modulus 2P={2 * big_p} exceeds cap {MODULUS_CAP}")
    total = CyclotomicElement.zero(2 * big_p)
    for p, n in zip(ps, ns):
        total = total + cos_as_element(n, p, big_p)
    return total.is_zero()


@dataclass(frozen=True)
class NonvanishingReport:
    """Outcome of an exhaustive cosine-sum scan."""

    ps: tuple[int, ...]
    admissible: bool
    reasons: tuple[str, ...]
    tuples: int
    zeros: int
    witnesses: tuple[tuple[int, ...], ...]


def verify_nonvanishing(ps) -> NonvanishingReport:
    """Scan every tuple (n_1..n_d), 1 <= n_i < p_i, for a vanishing cosine sum.

    Admissibility (pairwise-coprime p_i, each p_i odd, not divisible by 3 and
    not 1) is checked and reported; violations do not stop the scan, they only
    flag the input, since the inadmissible outcomes are informative controls.
    """
    ps = tuple(int(p) for p in ps)
    reasons = []
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if math.gcd(ps[i], ps[j]) != 1:
                reasons.append(f"gcd({ps[i]},{ps[j]}) = {math.gcd(ps[i], ps[j])} != 1")
    for p in ps:
        if p == 1 or p % 2 == 0 or p % 3 == 0:
            reasons.append(f"{p} is 1 or divisible by 2 or 3")
    count = math.prod(p - 1 for p in ps)
    if count > TUPLE_CAP:
        raise CombinatorialLimitError(f"{count} tuples exceed cap {TUPLE_CAP}")
    big_p = math.prod(ps)
    if 2 * big_p > MODULUS_CAP:
        raise CombinatorialLimitError(f"modulus 2P={2 * big_p} exceeds cap {MODULUS_CAP}")

    per_coordinate = [
        [cos_as_element(n, p, big_p) for n in range(1, p)] for p in ps
    ]
    witnesses: list[tuple[int, ...]] = []

    def scan(level: int, prefix: CyclotomicElement, chosen: tuple[int, ...]):
        if level == len(ps):
            if prefix.is_zero():
                witnesses.append(chosen)
            return
        for n, element in enumerate(per_coordinate[level], start=1):
            scan(level + 1, prefix + element, chosen + (n,))

    scan(0, CyclotomicElement.zero(2 * big_p), ())
    return NonvanishingReport(
        ps=ps,
        admissible=not reasons,
        reasons=tuple(reasons),
        tuples=count,
        zeros=len(witnesses),
        witnesses=tuple(witnesses),
    )
