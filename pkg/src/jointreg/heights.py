"""Exact logarithmic Weil heights on P^n(Q) and A^n(Q).

Heights are kept as integer magnitudes ``M`` with ``h = log M``.  Any
rational combination of logarithms of integers is a :class:`LogLinear`,
whose sign is decided exactly by comparing integer powers.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, Mapping, Sequence

from .maps.points import AffPoint, ProjPoint


@dataclass(frozen=True, order=True)
class HeightValue:
    magnitude: int

    def __post_init__(self):
        if self.magnitude < 1:
            raise ValueError("height magnitude must be a positive integer")

    @property
    def h(self) -> float:
        return math.log(self.magnitude)

    def as_log(self) -> LogLinear:
        return LogLinear.log(self.magnitude)


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    return out + ([n] if n > 1 else [])


def _exact_root(x: int, q: int) -> int | None:
    """The integer ``q``-th root of ``x`` if it exists."""
    if x < 2:
        return x
    lo, hi = 1, 1 << (x.bit_length() // q + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid**q
        if p == x:
            return mid
        lo, hi = (mid + 1, hi) if p < x else (lo, mid - 1)
    return None


class LogLinear:
    """``sum c_i * log(m_i)`` with rational ``c_i`` and integers ``m_i > 1``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, Fraction] | None = None):
        clean: dict[int, Fraction] = {}
        for m, c in (coeffs or {}).items():
            if m < 1:
                raise ValueError("logarithm of a non-positive number")
            c = Fraction(c)
            if m == 1 or not c:
                continue
            clean[m] = clean.get(m, Fraction(0)) + c
            if not clean[m]:
                del clean[m]
        self.coeffs = clean

    @classmethod
    def log(cls, x, coeff=1) -> LogLinear:
        """``coeff * log(x)`` for a positive rational ``x``."""
        x = Fraction(x)
        if x <= 0:
            raise ValueError("logarithm of a non-positive number")
        c = Fraction(coeff)
        return cls({x.numerator: c}) + cls({x.denominator: -c})

    @classmethod
    def zero(cls) -> LogLinear:
        return cls()

    def __add__(self, other: LogLinear) -> LogLinear:
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, Fraction(0)) + c
        return LogLinear(out)

    def __neg__(self) -> LogLinear:
        return LogLinear({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: LogLinear) -> LogLinear:
        return self + (-other)

    def __mul__(self, k) -> LogLinear:
        k = Fraction(k)
        return LogLinear({m: c * k for m, c in self.coeffs.items()})

    __rmul__ = __mul__

    def as_ratio(self) -> tuple[int, int, int]:
        """``(A, B, s)`` with the value equal to ``log(A / B) / s``."""
        s = reduce(math.lcm, (c.denominator for c in self.coeffs.values()), 1)
        A = B = 1
        for m, c in self.coeffs.items():
            e = int(c * s)
            if e > 0:
                A *= m**e
            else:
                B *= m ** (-e)
        g = math.gcd(A, B)
        A, B = A // g, B // g
        for q in _prime_factors(s):
            while s % q == 0:
                a, b = _exact_root(A, q), _exact_root(B, q)
                if a is None or b is None:
                    break
                A, B, s = a, b, s // q
        return A, B, s

    def sign(self) -> int:
        A, B, _ = self.as_ratio()
        return (A > B) - (A < B)

    def __eq__(self, other) -> bool:
        if isinstance(other, LogLinear):
            return (self - other).sign() == 0
        if other == 0:
            return self.sign() == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __lt__(self, other: LogLinear) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: LogLinear) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: LogLinear) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: LogLinear) -> bool:
        return (self - other).sign() >= 0

    def __float__(self) -> float:
        return float(sum(float(c) * math.log(m) for m, c in self.coeffs.items()))

    def decimal(self) -> str:
        return "0" if self.sign() == 0 else format_decimal(float(self))

    def __repr__(self) -> str:
        if not self.coeffs or self.sign() == 0:
            return "0"
        return " + ".join(f"{c}*log({m})" for m, c in sorted(self.coeffs.items()))


def format_decimal(x: float) -> str:
    return f"{x:.12g}"


def height_proj(P: ProjPoint) -> HeightValue:
    return HeightValue(P.magnitude())


def height_aff(P: Sequence) -> HeightValue:
    """Height of ``[x_1 : ... : x_n : 1]`` after clearing denominators."""
    q = [Fraction(x) for x in P]
    den = reduce(math.lcm, (x.denominator for x in q), 1)
    ints = [int(x * den) for x in q] + [den]
    g = reduce(math.gcd, ints)
    return HeightValue(max(abs(x) for x in ints) // g)


def magnitude(P) -> int:
    if isinstance(P, ProjPoint):
        return P.magnitude()
    return height_aff(P).magnitude


def enumerate_points(n: int, m_max: int) -> Iterator[AffPoint]:
    """All points of A^n(Q) with height magnitude at most ``m_max``, each once.

    Order: common denominator ``q = 1, ..., m_max``; for each ``q`` the
    numerator vectors in ``[-m_max, m_max]^n`` in lexicographic order, kept
    when ``gcd(q, p_1, ..., p_n) = 1``.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    rng = range(-m_max, m_max + 1)
    for q in range(1, m_max + 1):
        for nums in itertools.product(rng, repeat=n):
            if math.gcd(q, *nums) == 1:
                yield tuple(Fraction(p, q) for p in nums)


def sample_points(n: int, m_min: int, m_max: int, count: int, seed: int) -> list[AffPoint]:
    """Seeded pseudo-random affine points with ``m_min <= M(P) <= m_max``.

    The target magnitude is drawn log-uniformly; the coordinate realizing
    it (denominator or one numerator) is chosen uniformly, the others are
    uniform below it, and vectors with a common factor are redrawn.
    """
    if m_min < 1 or m_min > m_max:
        raise ValueError("empty magnitude range")
    rng = random.Random(seed)
    lo, hi = math.log(m_min), math.log(m_max + 1)
    out: list[AffPoint] = []
    while len(out) < count:
        B = min(m_max, max(m_min, int(math.exp(rng.uniform(lo, hi)))))
        slot = rng.randrange(n + 1)  # n means the denominator carries B
        q = B if slot == n else rng.randint(1, B)
        nums = [rng.randint(-B, B) for _ in range(n)]
        if slot < n:
            nums[slot] = B if rng.random() < 0.5 else -B
        if math.gcd(q, *nums) != 1:
            continue
        out.append(tuple(Fraction(p, q) for p in nums))
    return out
