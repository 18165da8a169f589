from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

AffPoint = tuple[Fraction, ...]


@dataclass(frozen=True, order=True)
class ProjPoint:
    """A point of P^n(Q): coprime integers, first nonzero coordinate positive."""

    coords: tuple[int, ...]

    def __post_init__(self):
        c = self.coords
        if not any(c):
            raise ValueError("all coordinates are zero")
        if reduce(math.gcd, c) != 1:
            raise ValueError(f"coordinates {c} are not coprime; use ProjPoint.of")
        if next(x for x in c if x) < 0:
            raise ValueError(f"first nonzero coordinate of {c} is negative; use ProjPoint.of")

    @classmethod
    def of(cls, coords: Iterable) -> ProjPoint:
        """Canonical representative of an arbitrary nonzero rational vector."""
        q = [Fraction(x) for x in coords]
        if not any(q):
            raise ValueError("all coordinates are zero")
        den = reduce(math.lcm, (x.denominator for x in q), 1)
        ints = [int(x * den) for x in q]
        g = reduce(math.gcd, ints)
        if next(x for x in ints if x) < 0:
            g = -g
        return cls(tuple(x // g for x in ints))

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def magnitude(self) -> int:
        return max(abs(x) for x in self.coords)

    def to_affine(self) -> AffPoint:
        """Dehomogenize by the last coordinate."""
        w = self.coords[-1]
        if w == 0:
            raise ValueError("point lies on the hyperplane at infinity")
        return tuple(Fraction(x, w) for x in self.coords[:-1])

    def __str__(self) -> str:
        return "[" + ":".join(str(x) for x in self.coords) + "]"


def aff(*coords) -> AffPoint:
    return tuple(Fraction(x) for x in coords)


def affine_to_proj(P: Sequence) -> ProjPoint:
    """``(x_1, ..., x_n) -> [x_1 : ... : x_n : 1]``."""
    return ProjPoint.of(list(P) + [1])


def format_point(P) -> str:
    if isinstance(P, ProjPoint):
        return str(P)
    return "(" + ", ".join(str(Fraction(x)) for x in P) + ")"


def parse_point(text: str) -> AffPoint:
    s = text.strip().strip("()[]")
    if not s:
        return ()
    return tuple(Fraction(t.strip()) for t in s.split(","))
