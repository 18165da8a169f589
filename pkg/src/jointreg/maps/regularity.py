"""Deciding joint regularity: is the common indeterminacy locus empty?

Three independent certificates are used:

* monomial maps: the locus is a union of coordinate subspaces and is
  intersected combinatorially;
* a verified rational point in every locus proves non-emptiness;
* the ideal generated by all components contains every form of degree N
  (checked by the rank of the degree-N Macaulay matrix) proves emptiness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ..algebra import MultiPoly, QMatrix, mat_rank, rank_mod_p
from .points import ProjPoint
from .rational_map import RationalMapP, indeterminacy_monomial, subspace_witness

WITNESS_PRIMES = (101, 103, 107)
RANK_PRIME = 2_147_483_629  # largest prime below 2**31
EXACT_RANK_MAX_COLS = 160


@dataclass(frozen=True)
class RegularityVerdict:
    status: str  # "empty", "nonempty" or "unknown"
    saturation_degree: int | None = None
    witness: ProjPoint | None = None
    reason: str = ""
    bound_used: int | None = None

    @property
    def is_empty(self) -> bool:
        return self.status == "empty"

    def __str__(self) -> str:
        if self.status == "empty":
            how = f"saturation degree {self.saturation_degree}" if self.saturation_degree else self.reason
            return f"Empty ({how})"
        if self.status == "nonempty":
            return f"NonEmpty (witness {self.witness})" if self.witness else f"NonEmpty ({self.reason})"
        return f"Unknown (saturation not reached by N = {self.bound_used})"


# -- Macaulay matrices ----------------------------------------------------------


@lru_cache(maxsize=None)
def _monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def _column_index(nvars: int, degree: int) -> dict[tuple[int, ...], int]:
    return {e: i for i, e in enumerate(_monomials(nvars, degree))}


@lru_cache(maxsize=200_000)
def _multiples_mask(g: tuple[int, ...], degree: int) -> int:
    mask = 0
    for i, e in enumerate(_monomials(len(g), degree)):
        if all(a >= b for a, b in zip(e, g)):
            mask |= 1 << i
    return mask


def _monomial_span_full(gens: Sequence[tuple[int, ...]], nvars: int, N: int) -> bool:
    # rows with one nonzero entry each: rank = number of distinct columns hit
    full = (1 << len(_monomials(nvars, N))) - 1
    mask = 0
    for g in gens:
        if sum(g) <= N:
            mask |= _multiples_mask(g, N)
            if mask == full:
                return True
    return False


def macaulay_rows(polys: Sequence[MultiPoly], N: int) -> list[list[int]]:
    """Integer rows spanning the degree-N part of the ideal."""
    nvars = polys[0].nvars
    col = _column_index(nvars, N)
    rows = []
    for p in polys:
        d = p.degree()
        if d > N:
            continue
        den = math.lcm(*(c.denominator for c in p.terms.values()))
        ip = [(int(c * den), e) for e, c in p.terms.items()]
        for m in _monomials(nvars, N - d):
            row = [0] * len(col)
            for c, e in ip:
                row[col[tuple(a + b for a, b in zip(e, m))]] = c
            rows.append(row)
    return rows


def degree_piece_is_full(polys: Sequence[MultiPoly], N: int) -> bool:
    nvars = polys[0].nvars
    ncols = len(_monomials(nvars, N))
    if all(p.is_monomial() for p in polys):
        return _monomial_span_full([p.leading_term()[0] for p in polys], nvars, N)
    rows = macaulay_rows(polys, N)
    if len(rows) < ncols:
        return False
    reduced = np.array([[x % RANK_PRIME for x in r] for r in rows], dtype=np.int64)
    if rank_mod_p(reduced, RANK_PRIME) == ncols:
        return True
    if ncols <= EXACT_RANK_MAX_COLS:
        return mat_rank(QMatrix.from_rows(rows)) == ncols
    return False


def saturation_degree(polys: Sequence[MultiPoly], n_max: int) -> int | None:
    """Least ``N <= n_max`` whose graded piece of the ideal is everything, else ``None``.

    A returned ``N`` certifies that the polynomials have no common zero in
    projective space over the algebraic closure.
    """
    polys = [p for p in polys if p]
    if not polys:
        return None
    if any(p.is_constant() for p in polys):
        return 0
    for N in range(1, n_max + 1):
        if degree_piece_is_full(polys, N):
            return N
    return None


def default_cap(maps: Sequence[RationalMapP]) -> int:
    """Product of max(d, 3) over the n+1 largest component degrees."""
    n = maps[0].n
    degs = sorted((c.degree() for f in maps for c in f.components if c), reverse=True)
    return math.prod(max(d, 3) for d in degs[: n + 1])


# -- witnesses ------------------------------------------------------------------


def _vanishes(maps: Sequence[RationalMapP], coords: Sequence[int]) -> bool:
    return all(not any(f.evaluate_ints(coords)) for f in maps)


def _low_height_points(n: int, bound: int) -> Iterable[tuple[int, ...]]:
    rng = range(-bound, bound + 1)
    for c in itertools.product(rng, repeat=n + 1):
        if not any(c):
            continue
        if next(x for x in c if x) < 0 or math.gcd(*c) != 1:
            continue
        yield c


def _rational_reconstruct(a: int, p: int) -> tuple[int, int] | None:
    bound = math.isqrt(p // 2)
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return (r1, s1) if s1 > 0 else (-r1, -s1)


def _eval_mod_p(p_terms, cols: list[np.ndarray], prime: int) -> np.ndarray:
    out = np.zeros_like(cols[0])
    for c, e in p_terms:
        t = np.full_like(cols[0], c % prime)
        for x, k in zip(cols, e):
            for _ in range(k):
                t = (t * x) % prime
        out = (out + t) % prime
    return out


def _finite_field_zeros(maps: Sequence[RationalMapP], prime: int, limit: int) -> list[tuple[int, ...]]:
    n = maps[0].n
    polys = [c.integer_terms() for f in maps for c in f.components if c]
    found: list[tuple[int, ...]] = []
    for lead in range(n + 1):
        free = n - lead
        size = prime**free
        if size > 4_000_000:
            continue
        idx = np.arange(size, dtype=np.int64)
        cols = []
        for i in range(n + 1):
            if i < lead:
                cols.append(np.zeros(size, dtype=np.int64))
            elif i == lead:
                cols.append(np.ones(size, dtype=np.int64))
            else:
                cols.append((idx // prime ** (n - i)) % prime)
        mask = np.ones(size, dtype=bool)
        for pt in polys:
            mask &= _eval_mod_p(pt, cols, prime) == 0
            if not mask.any():
                break
        for j in np.nonzero(mask)[0][: limit - len(found)]:
            found.append(tuple(int(c[j]) for c in cols))
        if len(found) >= limit:
            break
    return found


def find_witness(maps: Sequence[RationalMapP], height_bound: int | None = None) -> ProjPoint | None:
    """A rational point where every component of every map vanishes, verified exactly."""
    n = maps[0].n
    if height_bound is None:
        height_bound = 3 if n <= 2 else 2 if n <= 4 else 1
    for c in _low_height_points(n, height_bound):
        if _vanishes(maps, c):
            return ProjPoint(c)
    for prime in WITNESS_PRIMES:
        for pt in _finite_field_zeros(maps, prime, limit=2000):
            fracs = [_rational_reconstruct(x, prime) for x in pt]
            if any(f is None for f in fracs):
                continue
            den = math.lcm(*(b for _, b in fracs))
            cand = ProjPoint.of([a * (den // b) for a, b in fracs])
            if _vanishes(maps, cand.coords):
                return cand
    return None


# -- verdicts -------------------------------------------------------------------


def monomial_common_locus(maps: Sequence[RationalMapP]) -> list[frozenset[int]]:
    """Intersection of the monomial loci, as minimal coordinate-zero sets."""
    n = maps[0].n
    current = [frozenset()]
    for f in maps:
        z = indeterminacy_monomial(f)
        current = [a | b for a in current for b in z if len(a | b) <= n]
        current = [t for t in set(current) if not any(s < t for s in current)]
        if not current:
            return []
    return sorted(current, key=lambda t: (len(t), sorted(t)))


def is_morphism(f: RationalMapP, degree_cap: int | None = None) -> RegularityVerdict:
    """Verdict on ``Z(f)`` alone; ``empty`` means ``f`` is a morphism."""
    return _decide([f], degree_cap, allow_morphism_shortcut=False)


def _decide(maps, degree_cap, allow_morphism_shortcut=True) -> RegularityVerdict:
    n = maps[0].n
    if any(f.n != n for f in maps):
        raise ValueError("maps of different dimensions")
    if all(f.is_monomial() for f in maps):
        common = monomial_common_locus(maps)
        if not common:
            return RegularityVerdict("empty", reason="monomial loci are disjoint")
        return RegularityVerdict("nonempty", witness=subspace_witness(common[0], n))
    if allow_morphism_shortcut:
        for f in maps:
            if is_morphism(f, degree_cap).is_empty:
                return RegularityVerdict("empty", reason="family contains a morphism")
    w = find_witness(maps)
    if w is not None:
        return RegularityVerdict("nonempty", witness=w)
    cap = degree_cap if degree_cap is not None else default_cap(maps)
    N = saturation_degree([c for f in maps for c in f.components], cap)
    if N is not None:
        return RegularityVerdict("empty", saturation_degree=N)
    return RegularityVerdict("unknown", bound_used=cap)


def joint_regularity(family, degree_cap: int | None = None) -> RegularityVerdict:
    """Decide whether the indeterminacy loci of the family have empty intersection.

    ``family`` is a :class:`MapFamily` or a sequence of :class:`RationalMapP`.
    """
    maps = list(family.maps) if hasattr(family, "maps") else list(family)
    if not maps:
        raise ValueError("empty family")
    return _decide(maps, degree_cap)
