"""Resolutions, pullback classes and D-ratios."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..maps.family import INF, Generator, MapFamily, format_ratio
from ..maps.points import ProjPoint
from ..maps.rational_map import RationalMapP
from ..maps.regularity import is_morphism, joint_regularity
from .blowup import HLINE, BlowupScript, Center, ScriptError, Surface, locus_inside_h, toric_script
from .lattice import TOTAL, DivisorClass, PicLattice, afe_member


class DratioUnavailable(ValueError):
    """No computation route applies and nothing was declared."""


@dataclass(frozen=True)
class ResolvedSystem:
    map: RationalMapP
    script: BlowupScript
    multiplicities: tuple[int, ...]
    images: tuple[ProjPoint, ...]
    lattice: PicLattice
    pi_star_h: DivisorClass
    phi_star_h: DivisorClass
    dratio: Fraction | float

    @property
    def r(self) -> int:
        return self.lattice.r

    def report(self, names: Sequence[str] | None = None) -> str:
        L = self.lattice
        shown = "[" + " : ".join(self.map.to_strings(names)) + "]" if names else repr(self.map)
        lines = [f"map: {shown}", f"blowups: {L.r}"]
        for j, (c, m, img) in enumerate(zip(self.script.steps, self.multiplicities, self.images), start=1):
            prox = ",".join(f"E{i}" for i in sorted(c.proximity or ())) or "-"
            lines.append(
                f"  E{j}: chart {c.chart} point ({c.point[0]}, {c.point[1]}) over {img}  "
                f"m={m} proximate to {prox} on H#={'yes' if c.on_strict_h else 'no'}"
            )
        names = ", ".join(L.names)
        for label, c in (("pi*H", self.pi_star_h), ("phi*H", self.phi_star_h)):
            lines.append(f"{label} proper [{names}] = {c}")
            lines.append(f"{label} total  [H, E1..] = {L.to_total(c)}")
        lines.append("intersection matrix (proper basis):")
        lines.append(L.format_matrix())
        lines.append(f"D-ratio: {format_ratio(self.dratio)}")
        return "\n".join(lines)


def dratio_from_classes(pi_star_h: DivisorClass, phi_star_h: DivisorClass, d: int) -> Fraction | float:
    """``d * max a_i / b_i`` over indices with ``a_i != 0``, index 0 included."""
    if pi_star_h.basis != phi_star_h.basis or len(pi_star_h) != len(phi_star_h):
        raise ValueError("classes must share basis and length")
    a, b = pi_star_h.coeffs, phi_star_h.coeffs
    if a[0] != 1 or b[0] != d:
        raise ValueError(f"malformed classes: H-coefficients must be 1 and {d}")
    if any(x < 0 for x in a) or any(x < 0 for x in b):
        raise ValueError("malformed classes: negative coefficient")
    best = Fraction(0)
    for ai, bi in zip(a, b):
        if ai == 0:
            continue
        if bi == 0:
            return INF
        best = max(best, Fraction(ai) / bi)
    return d * best


def _resolve(f: RationalMapP, script: BlowupScript, require_h: bool) -> tuple[ResolvedSystem | None, Surface]:
    s = Surface.of_map(f)
    for c in script.steps:
        s.blow_up(c)
    left = s.residual_base_points()
    if left:
        chart, pt = left[0]
        raise ScriptError(f"residual base point at ({pt[0]}, {pt[1]}) in chart {chart}: script insufficient")
    recs = s.steps
    if require_h:
        bad = [r.image for r in recs if r.multiplicity > 0 and r.image.coords[HLINE] != 0]
        if bad:
            raise ScriptError(f"indeterminacy point {bad[0]} is not on H; the D-ratio needs Z(f) inside H")
    lattice = PicLattice.from_steps([r.proximity for r in recs], [r.on_strict_h for r in recs])
    lattice.verify()
    pi = lattice.to_proper(lattice.hyperplane_class())
    phi = lattice.to_proper(DivisorClass(TOTAL, (f.degree,) + tuple(-r.multiplicity for r in recs)))
    if pi[0] != 1 or phi[0] != f.degree:
        raise AssertionError("pullback H-coefficients are off")
    ok = all(x >= 0 and x.denominator == 1 for x in pi.coeffs + phi.coeffs)
    if not ok and require_h:
        raise AssertionError(f"pullback coefficients are not nonnegative integers: {pi}, {phi}")
    r = dratio_from_classes(pi, phi, f.degree) if require_h else None
    rs = ResolvedSystem(
        f,
        BlowupScript(tuple(rec.center for rec in recs)),
        tuple(rec.multiplicity for rec in recs),
        tuple(rec.image for rec in recs),
        lattice,
        pi,
        phi,
        r,
    )
    return rs, s


def resolve_scripted(f: RationalMapP, script: BlowupScript) -> ResolvedSystem:
    """Resolve ``f`` with user-supplied centers and compute its D-ratio."""
    return _resolve(f, script, True)[0]


def resolve_toric(f: RationalMapP, max_steps: int = 64) -> ResolvedSystem:
    """Resolve a monomial map by blowing up torus-fixed base points."""
    if f.n != 2:
        raise ValueError("blowups are implemented on P^2 only")
    if not f.is_monomial():
        raise ValueError("resolve_toric needs a monomial map")
    if not locus_inside_h(f):
        raise ScriptError("the indeterminacy locus is not contained in H (the last coordinate hyperplane); the D-ratio is undefined")
    script, _ = toric_script(f, max_steps)
    return resolve_scripted(f, script)


# -- dispatch -------------------------------------------------------------------


@dataclass(frozen=True)
class DRatio:
    value: Fraction | float
    provenance: str
    resolved: ResolvedSystem | None = None
    notes: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{format_ratio(self.value)} [{self.provenance}]"


def dratio(entry: Generator | RationalMapP, degree_cap: int | None = None) -> DRatio:
    """D-ratio by the first applicable route.

    Routes: morphism (1); affine map whose homogenization and that of its
    verified inverse have disjoint indeterminacy loci (``deg f * deg f^-1``);
    monomial map of P^2 (toric blowups); declared registry value.
    """
    gen = entry if isinstance(entry, Generator) else Generator("f", entry)
    f = gen.map
    notes: list[str] = []
    if is_morphism(f, degree_cap).is_empty:
        return DRatio(Fraction(1), "morphism")
    if gen.affine is not None and gen.inverse is not None:
        finv = gen.inverse.homogenized
        v = joint_regularity([f, finv], degree_cap)
        if v.is_empty:
            return DRatio(Fraction(f.degree * finv.degree), f"regular-automorphism ({f.degree} x {finv.degree})")
        notes.append(f"regular-automorphism route failed: Z(f) and Z(f^-1) meet ({v})")
    if f.n == 2 and f.is_monomial():
        try:
            rs = resolve_toric(f)
            return DRatio(rs.dratio, f"blowup ({rs.r} toric blowups)", rs, tuple(notes))
        except ScriptError as e:
            notes.append(f"blowup route failed: {e}")
    if gen.declared is not None:
        return DRatio(gen.declared.value, f"declared: {gen.declared.provenance}", None, tuple(notes))
    raise DratioUnavailable(f"no D-ratio route for {gen.name}" + ("; " + "; ".join(notes) if notes else ""))


def family_dratio(family: MapFamily, degree_cap: int | None = None) -> tuple[Fraction | float, list[DRatio]]:
    """``r = max r(f_l)`` together with the per-generator results."""
    rs = [dratio(g, degree_cap) for g in family.generators]
    return max(x.value for x in rs), rs


def delta(family: MapFamily | Sequence[int], r: Fraction | float) -> Fraction:
    """``delta_S = sum(1/d_l) / (1 + 1/r)``."""
    degs = family.degrees if isinstance(family, MapFamily) else list(family)
    if not degs:
        raise ValueError("empty family")
    if r != INF and r < 1:
        raise ValueError("r must be >= 1")
    s = sum((Fraction(1, d) for d in degs), Fraction(0))
    if r == INF:
        return s
    r = Fraction(r)
    return r / (r + 1) * s


# -- family check ---------------------------------------------------------------


@dataclass(frozen=True)
class FamilyDivisorReport:
    holds: bool
    divisor: DivisorClass
    lattice: PicLattice
    script: BlowupScript
    alpha: DivisorClass
    betas: tuple[DivisorClass, ...]
    index_sets: tuple[frozenset[int], ...]  # I_l: centers lying over Z(f_l), 1-based
    coefficient_identity: bool
    index_cover: bool
    outside_h: tuple[int, ...] = field(default=())  # generators with Z(f) not inside H

    def report(self) -> str:
        names = ", ".join(self.lattice.names)
        lines = [f"common resolution: {self.lattice.r} blowups", f"basis [{names}]", f"alpha = pi_W*H = {self.alpha}"]
        for l, (b, I) in enumerate(zip(self.betas, self.index_sets), start=1):
            lines.append(f"beta_{l} = phi_{l}*H = {b}   I_{l} = {sorted(I)}")
        lines.append(f"D = {self.divisor}")
        lines.append(f"D is AFE-effective: {self.holds}")
        lines.append(f"coefficient identity on I_l^c: {self.coefficient_identity}")
        lines.append(f"every index in some I_l and some I_l^c: {self.index_cover}")
        if self.outside_h:
            lines.append("generators whose indeterminacy leaves H: " + ", ".join(f"f{i}" for i in self.outside_h))
        return "\n".join(lines)


def merged_script(maps: Sequence[RationalMapP], max_steps: int = 64) -> BlowupScript:
    paths: set[str] = set()
    for f in maps:
        script, _ = toric_script(f, max_steps)
        paths.update(c.chart for c in script.steps)
    return BlowupScript(tuple(Center(p) for p in sorted(paths, key=lambda p: (p.count("/"), p))))


def family_divisor_check(family: MapFamily | Sequence[RationalMapP], r: Fraction | float) -> FamilyDivisorReport:
    """Build the common toric resolution and test the class ``D`` for AFE-effectivity."""
    maps = list(family.maps) if isinstance(family, MapFamily) else list(family)
    if len(maps) < 2:
        raise ValueError("the family check needs at least two generators")
    if any(f.n != 2 or not f.is_monomial() for f in maps):
        raise ValueError("the family check needs monomial maps of P^2")
    if not joint_regularity(maps).is_empty:
        raise ValueError("family is not jointly regular")
    script = merged_script(maps)
    resolved = []
    for f in maps:
        try:
            rs, _ = _resolve(f, script, require_h=False)
        except ScriptError as e:
            raise ScriptError(f"merge failure: {e}") from e
        resolved.append(rs)
    lattice = resolved[0].lattice
    if any(rs.lattice != lattice for rs in resolved):
        raise ScriptError("merge failure: generators disagree on the common surface")
    alpha = resolved[0].pi_star_h
    betas = tuple(rs.phi_star_h for rs in resolved)
    images = resolved[0].images
    index_sets = tuple(frozenset(j for j, P in enumerate(images, start=1) if f.evaluate(P) is None) for f in maps)
    coeff_ok = all(
        f.degree * alpha[j] == beta[j]
        for f, beta, I in zip(maps, betas, index_sets)
        for j in range(1, lattice.r + 1)
        if j not in I
    )
    everything = set(range(1, lattice.r + 1))
    indices_ok = set().union(*index_sets) == everything and set().union(*(everything - I for I in index_sets)) == everything
    coeff = Fraction(1) if r == INF else 1 + 1 / Fraction(r)
    D = DivisorClass.proper(*([0] * (lattice.r + 1)))
    for f, beta in zip(maps, betas):
        D = D + beta * Fraction(1, f.degree)
    D = D - alpha * coeff
    outside = tuple(l for l, f in enumerate(maps, start=1) if not locus_inside_h(f))
    return FamilyDivisorReport(afe_member(D), D, lattice, script, alpha, betas, index_sets, coeff_ok, indices_ok, outside)
