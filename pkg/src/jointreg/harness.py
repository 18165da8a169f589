"""Empirical checks of the height inequalities on sampled points.

Every margin is a :class:`LogLinear` and is compared exactly; decimals are
only for display.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .heights import LogLinear, format_decimal, height_aff, sample_points
from .maps.family import INF, MapFamily, format_ratio
from .maps.points import AffPoint, ProjPoint, format_point
from .maps.rational_map import AffineMap, RationalMapP
from .maps.regularity import is_morphism, joint_regularity

DEFAULT_LADDER = (10, 10**2, 10**3, 10**4, 10**5, 10**6)
DEFAULT_PER_BAND = 2000


class NotAMorphism(ValueError):
    pass


def discrepancy(claim: str, computed: str, action: str) -> str:
    return "\n".join(["DISCREPANCY", f"  expected: {claim}", f"  computed: {computed}", f"  action:   {action}"])


# -- exact point evaluation -----------------------------------------------------


def _ints(P) -> tuple[int, ...]:
    if isinstance(P, ProjPoint):
        return P.coords
    q = [Fraction(x) for x in P]
    den = math.lcm(*(x.denominator for x in q)) if q else 1
    return tuple(int(x * den) for x in q) + (den,)


def _magnitude(vals: Sequence[int]) -> int | None:
    g = math.gcd(*vals)
    if g == 0:
        return None
    return max(abs(v) for v in vals) // g


def _point_magnitude(P) -> int:
    return P.magnitude() if isinstance(P, ProjPoint) else height_aff(P).magnitude


def image_magnitudes(maps: Sequence[RationalMapP], P) -> tuple[int, ...] | None:
    """``M(f_l(P))`` for every map, or ``None`` if some ``f_l`` is undefined at ``P``."""
    x = _ints(P)
    out = []
    for f in maps:
        m = _magnitude(f.evaluate_ints(x))
        if m is None:
            return None
        out.append(m)
    return tuple(out)


class _MinTracker:
    """Exact minimum of log-linear values, with float prefiltering."""

    def __init__(self):
        self.value: LogLinear | None = None
        self.approx = math.inf
        self.where = None

    def offer(self, v: LogLinear, where) -> None:
        a = float(v)
        if self.value is not None:
            if a > self.approx + 1e-9 * (1 + abs(a)):
                return
            if a >= self.approx - 1e-9 * (1 + abs(a)) and v >= self.value:
                return
        self.value, self.approx, self.where = v, a, where


def _chunks(items: Sequence, n: int) -> list[Sequence]:
    size = max(1, math.ceil(len(items) / max(1, n)))
    return [items[i : i + size] for i in range(0, len(items), size)]


def _pmap(func: Callable, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(func, jobs))
    return [func(j) for j in jobs]


def band_of(m: int, ladder: Sequence[int]) -> int | None:
    """Index ``i`` with ``ladder[i] <= m < ladder[i+1]`` (last band closed)."""
    for i in range(len(ladder) - 1):
        if ladder[i] <= m < ladder[i + 1] or (i == len(ladder) - 2 and m == ladder[-1]):
            return i
    return None


def band_label(i: int, ladder: Sequence[int]) -> str:
    return f"[{ladder[i]},{ladder[i + 1]}]"


# -- the inequality -------------------------------------------------------------


@dataclass(frozen=True)
class MarginRow:
    point: AffPoint | ProjPoint
    magnitude: int
    images: tuple[int, ...]
    margin: LogLinear


@dataclass
class InequalityReport:
    family_id: str
    r: Fraction | float
    r_provenance: str
    form: str  # "main" or "jointly"
    coefficient: Fraction
    sample_spec: dict
    count: int
    skipped: int
    min_margin: LogLinear
    extremal_point: object
    violations_strict: int
    violations_fitted: int
    band_minima: list[tuple[str, LogLinear]]
    notices: list[str] = field(default_factory=list)
    rows: list[MarginRow] = field(default_factory=list, repr=False)

    @property
    def fitted_c(self) -> LogLinear:
        return -self.min_margin

    @property
    def fitted_c_exact(self) -> tuple[int, int, int]:
        """``(A, B, s)`` with ``C = log(A/B)/s``."""
        return self.fitted_c.as_ratio()

    def format(self) -> str:
        A, B, s = self.fitted_c_exact
        lines = list(self.notices)
        lines += [
            f"family: {self.family_id}",
            f"form: {'sum h(f_l P)/d_l >= (1 + 1/r) h(P) - C' if self.form == 'main' else 'sum h(f_l P)/d_l >= h(P) - C'}",
            f"r = {format_ratio(self.r)} [{self.r_provenance}], coefficient {self.coefficient}",
            "samples: " + ", ".join(f"{k}={v}" for k, v in self.sample_spec.items()) + f", used {self.count}, skipped {self.skipped}",
            f"minimal margin = {self.min_margin.decimal()} at {format_point(self.extremal_point)}",
            f"fitted C = {self.fitted_c.decimal()}"
            + ("" if A == B else f" = log({_short(A)}/{_short(B)})" + (f"/{s}" if s != 1 else "")),
            f"violations without constant: {self.violations_strict}",
            f"violations of the fitted inequality: {self.violations_fitted}",
            "band minima:",
        ]
        lines += [f"  {b}: {v.decimal()}" for b, v in self.band_minima]
        return "\n".join(lines)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        k = len(self.rows[0].images) if self.rows else 0
        w.writerow(["point", "M(P)"] + [f"M(f{l}P)" for l in range(1, k + 1)] + ["sign", "margin"])
        for row in self.rows:
            w.writerow(
                [format_point(row.point), row.magnitude, *row.images, row.margin.sign(), row.margin.decimal()]
            )


def _short(x: int) -> str:
    s = str(x)
    return s if len(s) <= 40 else f"{s[:12]}...({len(s)} digits)"


def _margin_chunk(args):
    maps, degs, coef, points = args
    out = []
    for P in points:
        imgs = image_magnitudes(maps, P)
        if imgs is None:
            out.append((P, None, None))
            continue
        m = _point_magnitude(P)
        v = LogLinear()
        for d, M in zip(degs, imgs):
            v = v + LogLinear.log(M, Fraction(1, d))
        v = v - LogLinear.log(m, coef)
        out.append((P, imgs, v))
    return out


def verify_inequality(
    family: MapFamily,
    r,
    samples: Sequence,
    r_provenance: str = "supplied",
    family_id: str = "family",
    sample_spec: dict | None = None,
    ladder: Sequence[int] = (1, 10, 10**2, 10**3, 10**4, 10**5, 10**6),
    workers: int = 1,
    override_regularity: bool = False,
    keep_rows: bool = False,
) -> InequalityReport:
    """Exact margins of ``sum h(f_l P)/d_l - (1 + 1/r) h(P)`` over the samples."""
    notices: list[str] = []
    verdict = joint_regularity(family.maps)
    if not verdict.is_empty:
        if not override_regularity:
            raise ValueError(f"family is not known to be jointly regular: {verdict}")
        notices.append(f"WARNING: regularity overridden by the user (verdict {verdict})")
    form = "main"
    if family.k < 2:
        form = "jointly"
        notices.append("NOTICE: a single generator; using the form h(P) - C with coefficient 1")
    coef = Fraction(1) if form == "jointly" or r == INF else 1 + 1 / Fraction(r)
    maps, degs = family.maps, family.degrees
    jobs = [(maps, degs, coef, list(c)) for c in _chunks(list(samples), workers * 4 if workers > 1 else 1)]
    results = [t for part in _pmap(_margin_chunk, jobs, workers) for t in part]

    tracker = _MinTracker()
    bands: dict[int, _MinTracker] = {}
    rows: list[MarginRow] = []
    skipped = strict = 0
    for P, imgs, v in results:
        if v is None:
            skipped += 1
            continue
        tracker.offer(v, P)
        m = _point_magnitude(P)
        b = band_of(m, ladder)
        if b is not None:
            bands.setdefault(b, _MinTracker()).offer(v, P)
        if v.sign() < 0:
            strict += 1
        if keep_rows:
            rows.append(MarginRow(P, m, imgs, v))
    if tracker.value is None:
        raise ValueError("no usable sample points")
    C = -tracker.value
    fitted = sum(1 for _, _, v in results if v is not None and (v + C).sign() < 0)
    return InequalityReport(
        family_id,
        r,
        r_provenance,
        form,
        coef,
        dict(sample_spec or {}),
        len(results) - skipped,
        skipped,
        tracker.value,
        tracker.where,
        strict,
        fitted,
        [(band_label(i, ladder), bands[i].value) for i in sorted(bands)],
        notices,
        rows,
    )


def seeded_samples(n: int, seed: int, count: int, m_min: int, m_max: int) -> tuple[list[AffPoint], dict]:
    pts = sample_points(n, m_min, m_max, count, seed)
    return pts, {"seed": seed, "count": count, "m_min": m_min, "m_max": m_max}


def relative_change(a: LogLinear, b: LogLinear) -> float:
    x, y = float(a), float(b)
    scale = max(abs(x), abs(y))
    return 0.0 if scale == 0 else abs(x - y) / scale


# -- Northcott ------------------------------------------------------------------


@dataclass(frozen=True)
class NorthcottReport:
    degree: int
    count: int
    c1: LogLinear  # sup of h(P) - h(fP)/d
    c2: LogLinear  # sup of h(fP)/d - h(P)
    c1_point: object
    c2_point: object

    def format(self) -> str:
        return "\n".join(
            [
                f"degree {self.degree}, {self.count} points",
                f"C1 = {self.c1.decimal()}  (h(P) < h(f(P))/d + C1; extremal at {format_point(self.c1_point)})",
                f"C2 = {self.c2.decimal()}  (h(P) > h(f(P))/d - C2; extremal at {format_point(self.c2_point)})",
                f"C1 exact: {self.c1!r}",
                f"C2 exact: {self.c2!r}",
            ]
        )


def northcott_check(f: AffineMap | RationalMapP, samples: Sequence, degree_cap: int | None = None) -> NorthcottReport:
    """Fit the two constants comparing ``h(f(P))/d`` with ``h(P)``."""
    F = f.homogenized if isinstance(f, AffineMap) else f
    v = is_morphism(F, degree_cap)
    if not v.is_empty:
        raise NotAMorphism(f"not a morphism: indeterminacy locus {v}")
    d = F.degree
    lo, hi = _MinTracker(), _MinTracker()
    count = 0
    for P in samples:
        (M,) = image_magnitudes([F], P)
        t = LogLinear.log(M, Fraction(1, d)) - LogLinear.log(_point_magnitude(P))
        lo.offer(t, P)
        hi.offer(-t, P)
        count += 1
    if not count:
        raise ValueError("no sample points")
    return NorthcottReport(d, count, -lo.value, -hi.value, lo.where, hi.where)


# -- kappa ----------------------------------------------------------------------


@dataclass(frozen=True)
class KappaBand:
    lo: int
    hi: int
    count: int
    min_ratio: float
    exact: Fraction | None  # set when the minimum is a verified rational
    point: object

    @property
    def label(self) -> str:
        return f"[{self.lo},{self.hi}]"

    def render(self) -> str:
        return str(self.exact) if self.exact is not None else format_decimal(self.min_ratio)


def _exact_ratio(num: LogLinear, den_magnitude: int) -> Fraction | None:
    x = float(num) / math.log(den_magnitude)
    q = Fraction(x).limit_denominator(1000)
    return q if num == LogLinear.log(den_magnitude, q) else None


def _kappa_chunk(args):
    maps, degs, points = args
    best = None
    for P in points:
        imgs = image_magnitudes(maps, P)
        m = _point_magnitude(P)
        if imgs is None or m <= 1:
            continue
        num = LogLinear()
        for d, M in zip(degs, imgs):
            num = num + LogLinear.log(M, Fraction(1, d))
        x = float(num) / math.log(m)
        if best is None or x < best[0]:
            best = (x, num, m, P)
    return best


def kappa_estimate(
    family: MapFamily,
    ladder: Sequence[int] = DEFAULT_LADDER,
    per_band: int = DEFAULT_PER_BAND,
    seed: int = 0,
    workers: int = 1,
) -> list[KappaBand]:
    """Per band, the least ``sum h(f_l P)/d_l / h(P)`` over seeded samples."""
    if any(b <= 1 for b in ladder[:1]) or list(ladder) != sorted(ladder):
        raise ValueError("bands need increasing magnitudes above 1")
    out = []
    for i in range(len(ladder) - 1):
        lo, hi = ladder[i], ladder[i + 1]
        pts = sample_points(family.n, lo, hi, per_band, seed * 1009 + i)
        jobs = [(family.maps, family.degrees, list(c)) for c in _chunks(pts, workers * 4 if workers > 1 else 1)]
        parts = [p for p in _pmap(_kappa_chunk, jobs, workers) if p is not None]
        if not parts:
            continue
        x, num, m, P = min(parts, key=lambda t: (t[0], _point_magnitude(t[3]), str(t[3])))
        out.append(KappaBand(lo, hi, len(pts), x, _exact_ratio(num, m), P))
    return out


def write_kappa_csv(fh, trace: Sequence[KappaBand]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["band", "count", "min_ratio"])
    for b in trace:
        w.writerow([b.label, b.count, b.render()])
