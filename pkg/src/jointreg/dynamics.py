"""Words in the generators, monoid orbits and the bounded-height preperiodic search."""

from __future__ import annotations

import csv
import itertools
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from .heights import HeightValue, LogLinear, enumerate_points, height_aff
from .maps.family import INF, MapFamily
from .maps.points import AffPoint, format_point
from .maps.rational_map import evaluate_affine

FINITE = "Finite"
SIZE_CAPPED = "SizeCapped"
HEIGHT_CAPPED = "HeightCapped"

Word = tuple[int, ...]  # 1-based generator indices, applied right to left


def words(k: int, m: int) -> Iterator[Word]:
    """``W_m``: all ordered ``m``-tuples over ``1..k``."""
    return itertools.product(range(1, k + 1), repeat=m)


def _affine_maps(family: MapFamily):
    if not family.is_affine():
        raise ValueError("orbits need affine generators")
    return [g.affine for g in family.generators]


def apply_word(family: MapFamily, w: Sequence[int], P: Sequence) -> AffPoint:
    """``f_{i_1}(f_{i_2}(...f_{i_m}(P)))`` by repeated exact evaluation."""
    maps = _affine_maps(family)
    if len(P) != family.n:
        raise ValueError("dimension mismatch")
    Q = tuple(Fraction(x) for x in P)
    for i in reversed(w):
        if not 1 <= i <= len(maps):
            raise ValueError(f"word index {i} out of range")
        Q = evaluate_affine(maps[i - 1], Q)
    return Q


def mu(family: MapFamily | Sequence[int], w: Sequence[int]) -> Fraction:
    degs = family.degrees if isinstance(family, MapFamily) else list(family)
    out = Fraction(1)
    for i in w:
        out /= degs[i - 1]
    return out


# -- orbits ---------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitRecord:
    start: AffPoint
    visited: frozenset[AffPoint]
    status: str
    max_magnitude: HeightValue

    @property
    def size(self) -> int:
        return len(self.visited)

    @property
    def is_finite(self) -> bool:
        return self.status == FINITE


def _closed(maps, visited: frozenset[AffPoint]) -> bool:
    return all(evaluate_affine(g, Q) in visited for Q in visited for g in maps)


def orbit_explore(family: MapFamily, P: Sequence, size_cap: int = 1000, magnitude_cap: int = 10**12) -> OrbitRecord:
    """Breadth-first closure of ``{P}`` under the generators, within the caps.

    ``Finite`` is only returned after re-checking that every generator maps
    the visited set into itself.
    """
    if size_cap < 1 or magnitude_cap < 1:
        raise ValueError("caps must be >= 1")
    maps = _affine_maps(family)
    start = tuple(Fraction(x) for x in P)
    visited = {start}
    best = height_aff(start).magnitude
    queue = deque([start])
    status = FINITE
    while queue and status == FINITE:
        Q = queue.popleft()
        for g in maps:
            R = evaluate_affine(g, Q)
            if R in visited:
                continue
            m = height_aff(R).magnitude
            if m > magnitude_cap:
                status = HEIGHT_CAPPED
                break
            visited.add(R)
            best = max(best, m)
            if len(visited) > size_cap:
                status = SIZE_CAPPED
                break
            queue.append(R)
    frozen = frozenset(visited)
    if status == FINITE and not _closed(maps, frozen):
        raise AssertionError("orbit closure check failed")
    return OrbitRecord(start, frozen, status, HeightValue(best))


# -- telescoping ----------------------------------------------------------------


def telescoping_bound(delta: Fraction, C: Fraction) -> Fraction:
    """``C / (1 - delta)``."""
    delta, C = Fraction(delta), Fraction(C)
    if delta >= 1:
        raise ValueError("delta must be < 1")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return C / (1 - delta)


@dataclass(frozen=True)
class TelescopeResult:
    depth: int
    rho: Fraction
    direct: LogLinear  # weighted sum of the per-point inequalities, term by term
    closed: LogLinear  # the telescoped form
    words_used: int

    @property
    def margin(self) -> LogLinear:
        return self.direct

    @property
    def agrees(self) -> bool:
        return self.direct == self.closed

    @property
    def sign(self) -> int:
        return self.direct.sign()


def telescoping_verify(
    family: MapFamily, r, P: Sequence, M: int, C: LogLinear | None = None, word_cap: int = 200_000
) -> TelescopeResult:
    """Evaluate both sides of the telescoped inequality at ``P`` for depth ``M``.

    With ``rho = r/(r+1)`` and ``g(Q) = rho * sum_l h(f_l Q)/d_l - h(Q) + C``,
    ``direct = sum_{m<=M} sum_{I in W_m} rho^m mu_I g(f_I P)`` and
    ``closed = rho^(M+1) sum_{J in W_(M+1)} mu_J h(f_J P) - h(P) + C sum_{m<=M} delta^m``.
    The two agree exactly; ``C`` is an exact log-linear constant.
    """
    k = family.k
    if M < 0:
        raise ValueError("depth must be >= 0")
    if k ** (M + 1) > word_cap:
        raise OverflowError(f"{k}^{M + 1} words exceed the cap {word_cap}")
    C = C if C is not None else LogLinear()
    rho = Fraction(1) if r == INF else Fraction(r) / (Fraction(r) + 1)
    degs = family.degrees
    delta = rho * sum((Fraction(1, d) for d in degs), Fraction(0))
    P = tuple(Fraction(x) for x in P)

    def h(Q: AffPoint) -> LogLinear:
        return height_aff(Q).as_log()

    level: dict[Word, AffPoint] = {(): P}
    direct = LogLinear()
    used = 1
    for m in range(M + 1):
        nxt: dict[Word, AffPoint] = {}
        for I, Q in level.items():
            g = C - h(Q)
            for l in range(1, k + 1):
                R = apply_word(family, (l,), Q)
                nxt[(l,) + I] = R
                g = g + h(R) * (rho / degs[l - 1])
            direct = direct + g * (rho**m * mu(degs, I))
        used += len(nxt)
        level = nxt
    closed = C * sum((delta**m for m in range(M + 1)), Fraction(0)) - h(P)
    for J, R in level.items():
        closed = closed + h(R) * (rho ** (M + 1) * mu(degs, J))
    return TelescopeResult(M, rho, direct, closed, used)


# -- search ---------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    delta: Fraction
    c_est: Fraction
    margin: Fraction
    magnitude_bound: int
    examined: int
    finite: tuple[tuple[AffPoint, OrbitRecord], ...]
    capped: tuple[tuple[AffPoint, OrbitRecord], ...]

    @property
    def points(self) -> list[AffPoint]:
        return [P for P, _ in self.finite]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            write_search_csv(fh, self)


def write_search_csv(fh, result: SearchResult) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["point", "verdict", "orbit_size", "max_magnitude", "bound_used"])
    rows = sorted(result.finite + result.capped, key=lambda t: _point_key(t[0]))
    for P, rec in rows:
        w.writerow([format_point(P), rec.status, rec.size, rec.max_magnitude.magnitude, result.magnitude_bound])


def _point_key(P: AffPoint):
    return (height_aff(P).magnitude, P)


def search_magnitude_bound(delta: Fraction, c_est, margin) -> int:
    """``ceil(exp(C/(1 - delta) + margin))``."""
    B = telescoping_bound(delta, Fraction(c_est)) + Fraction(margin)
    return max(1, math.ceil(math.exp(B)))


def _explore_chunk(args) -> list[tuple[AffPoint, OrbitRecord]]:
    family, points, size_cap, magnitude_cap = args
    return [(P, orbit_explore(family, P, size_cap, magnitude_cap)) for P in points]


def preperiodic_search(
    family: MapFamily,
    r,
    c_est=0,
    margin=0,
    size_cap: int = 1000,
    magnitude_cap: int = 10**12,
    workers: int = 1,
    chunk: int = 256,
) -> SearchResult:
    """Every point of magnitude within the telescoping bound, with its orbit verdict."""
    from .picard import delta as family_delta

    if Fraction(c_est) < 0:
        raise ValueError("C_est must be >= 0")
    d = family_delta(family, r)
    if d >= 1:
        raise ValueError(f"delta = {d} is not < 1")
    bound = search_magnitude_bound(d, c_est, margin)
    pts = list(enumerate_points(family.n, bound))
    jobs = [(family, pts[i : i + chunk], size_cap, magnitude_cap) for i in range(0, len(pts), chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_explore_chunk, jobs))
    else:
        parts = [_explore_chunk(j) for j in jobs]
    found = [t for part in parts for t in part]
    found.sort(key=lambda t: _point_key(t[0]))
    finite = tuple(t for t in found if t[1].is_finite)
    capped = tuple(t for t in found if not t[1].is_finite)
    return SearchResult(d, Fraction(c_est), Fraction(margin), bound, len(pts), finite, capped)
