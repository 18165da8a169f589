"""Rational self-maps of P^n and polynomial maps of A^n.

Projective coordinates are ordered ``[X_1 : ... : X_n : w]``; the
hyperplane at infinity ``H`` is ``{w = 0}``, the last coordinate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

from ..algebra import MultiPoly, poly_gcd_many
from .points import AffPoint, ProjPoint


def _compile(p: MultiPoly) -> tuple[tuple[int, tuple[int, ...]], ...]:
    return tuple(p.integer_terms())


def _eval_int(terms, x: Sequence[int]) -> int:
    total = 0
    for c, e in terms:
        t = c
        for xi, k in zip(x, e):
            if k:
                t *= xi**k
        total += t
    return total


class RationalMapP:
    """A rational map ``P^n --> P^n`` in reduced homogeneous form.

    Construction divides out the polynomial gcd of the components, scales to
    coprime integer coefficients and makes the first nonzero component's
    leading coefficient positive, so equal maps compare equal.
    """

    __slots__ = ("n", "components", "degree", "_compiled")

    def __init__(self, components: Sequence[MultiPoly]):
        comps = list(components)
        if len(comps) < 2:
            raise ValueError("a map of P^n needs at least two components")
        nv = comps[0].nvars
        if any(c.nvars != nv for c in comps) or nv != len(comps):
            raise ValueError("components must be polynomials in n+1 variables")
        nonzero = [c for c in comps if c]
        if not nonzero:
            raise ValueError("all components are zero")
        d = nonzero[0].degree()
        if any(not c.is_homogeneous() or c.degree() != d for c in nonzero):
            raise ValueError("components must be homogeneous of a common degree")
        g = poly_gcd_many(nonzero)
        if not g.is_constant():
            comps = [c.exact_div(g) if c else c for c in comps]
        # joint integer normalization
        num = reduce(math.gcd, (x.numerator for c in comps for x in c.terms.values()))
        den = reduce(math.lcm, (x.denominator for c in comps for x in c.terms.values()))
        s = Fraction(den, num)
        lead = next(c for c in comps if c).leading_term()[1]
        if lead < 0:
            s = -s
        comps = [c.scale(s) for c in comps]
        self.n = len(comps) - 1
        self.components = tuple(comps)
        self.degree = next(c for c in comps if c).degree()
        self._compiled = tuple(_compile(c) for c in comps)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMapP) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def is_monomial(self) -> bool:
        return all(len(c) <= 1 for c in self.components)

    def evaluate_ints(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(_eval_int(t, x) for t in self._compiled)

    def evaluate(self, P: ProjPoint) -> ProjPoint | None:
        """Image of ``P``, or ``None`` when ``P`` lies in the indeterminacy locus."""
        if P.n != self.n:
            raise ValueError("dimension mismatch")
        vals = self.evaluate_ints(P.coords)
        if not any(vals):
            return None
        return ProjPoint.of(vals)

    def to_strings(self, names: Sequence[str]) -> list[str]:
        return [c.to_string(names) for c in self.components]

    def __repr__(self) -> str:
        names = [f"X{i}" for i in range(self.n)] + ["w"]
        return "[" + " : ".join(self.to_strings(names)) + "]"


def compose(f: RationalMapP, g: RationalMapP) -> RationalMapP:
    """``f o g`` in reduced form."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    comps = [c.substitute(g.components) for c in f.components]
    if not any(comps):
        raise ValueError("composition is identically zero (g maps into the indeterminacy of f)")
    return RationalMapP(comps)


def power_map(n: int, d: int) -> RationalMapP:
    return RationalMapP([MultiPoly.monomial(tuple(d * (i == j) for j in range(n + 1))) for i in range(n + 1)])


@dataclass(frozen=True)
class AffineMap:
    n: int
    components: tuple[MultiPoly, ...]
    _hom: RationalMapP | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.components) != self.n or any(c.nvars != self.n for c in self.components):
            raise ValueError("an affine map of A^n needs n components in n variables")

    @classmethod
    def of(cls, components: Sequence[MultiPoly]) -> AffineMap:
        comps = tuple(components)
        return cls(len(comps), comps)

    @property
    def homogenized(self) -> RationalMapP:
        if self._hom is None:
            object.__setattr__(self, "_hom", homogenize_affine(self))
        return self._hom

    def total_degree(self) -> int:
        return max(c.degree() for c in self.components)

    def compose(self, other: AffineMap) -> AffineMap:
        """``self o other``."""
        return AffineMap.of([c.substitute(other.components) for c in self.components])

    def is_identity(self) -> bool:
        return all(c == MultiPoly.var(self.n, i) for i, c in enumerate(self.components))


def homogenize_affine(g: AffineMap) -> RationalMapP:
    """Meromorphic extension ``[w^d g_1(x/w) : ... : w^d g_n(x/w) : w^d]``."""
    n = g.n
    if all(not c for c in g.components):
        raise ValueError("zero map")
    d = max(g.total_degree(), 0)
    comps = []
    for c in g.components:
        terms = {e + (d - sum(e),): v for e, v in c.terms.items()}
        comps.append(MultiPoly(n + 1, terms))
    comps.append(MultiPoly.monomial((0,) * n + (d,)))
    return RationalMapP(comps)


def evaluate_affine(g: AffineMap, P: Sequence) -> AffPoint:
    """Exact image of an affine point; computed through integer coordinates."""
    if len(P) != g.n:
        raise ValueError("dimension mismatch")
    q = [Fraction(x) for x in P]
    den = reduce(math.lcm, (x.denominator for x in q), 1)
    ints = [int(x * den) for x in q] + [den]
    vals = g.homogenized.evaluate_ints(ints)
    w = vals[-1]
    return tuple(Fraction(v, w) for v in vals[:-1])


def indeterminacy_monomial(f: RationalMapP) -> list[frozenset[int]]:
    """Indeterminacy locus of a monomial map as coordinate subspaces.

    Each returned set ``T`` stands for ``{X_i = 0 for i in T}``; the union is
    irredundant (only minimal ``T`` are kept).
    """
    if not f.is_monomial():
        raise ValueError("map is not monomial")
    supports = []
    for c in f.components:
        if not c:
            continue  # vanishes everywhere
        e = c.leading_term()[0]
        supports.append(frozenset(i for i, k in enumerate(e) if k))
    if any(not s for s in supports):
        return []  # a nonzero constant component never vanishes
    coords = range(f.n + 1)
    found: list[frozenset[int]] = []
    for size in range(1, f.n + 1):
        for T in itertools.combinations(coords, size):
            T = frozenset(T)
            if any(t <= T for t in found):
                continue
            if all(s & T for s in supports):
                found.append(T)
    return sorted(found, key=lambda t: (len(t), sorted(t)))


def subspace_witness(T: frozenset[int], n: int) -> ProjPoint:
    """The point with zeros exactly on ``T`` and ones elsewhere."""
    return ProjPoint(tuple(0 if i in T else 1 for i in range(n + 1)))
