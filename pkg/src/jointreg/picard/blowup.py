"""Iterated point blowups of P^2 in affine charts.

The surface is covered by charts named by paths.  The root charts ``U0``,
``U1``, ``U2`` are ``{X_k != 0}`` with coordinates ``(u, v)`` = the other two
projective coordinates, in order, divided by ``X_k``.  Blowing up the point
``p`` of chart ``c`` replaces ``c`` by two children (after translating ``p``
to the origin):

* ``c/1``: ``(u, v) = (u1, u1 * v1)``, exceptional curve ``u1 = 0``;
* ``c/2``: ``(u, v) = (u2 * v2, v2)``, exceptional curve ``v2 = 0``.

Every chart carries the strict transform of a linear system and the local
equations of the tracked curves ``H`` (strict transform of the line
``{X_2 = 0}``) and ``E1, E2, ...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..algebra import MultiPoly
from ..maps.points import ProjPoint
from ..maps.rational_map import RationalMapP, indeterminacy_monomial

ROOTS = ("U0", "U1", "U2")
HLINE = 2  # H = {X_2 = 0}


class ScriptError(ValueError):
    """A blowup script that does not fit the surface or does not resolve the map."""


@dataclass(frozen=True)
class Center:
    chart: str
    point: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))
    proximity: frozenset[int] | None = None
    on_strict_h: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(Fraction(x) for x in self.point))
        if len(self.point) != 2:
            raise ValueError("a center needs two chart coordinates")
        if self.proximity is not None:
            object.__setattr__(self, "proximity", frozenset(self.proximity))

    def to_json(self) -> dict:
        out: dict = {"chart": self.chart, "point": [str(x) for x in self.point]}
        if self.proximity is not None:
            out["proximity"] = sorted(self.proximity)
        if self.on_strict_h is not None:
            out["on_strict_h"] = self.on_strict_h
        return out

    @classmethod
    def from_json(cls, d: dict) -> Center:
        prox = d.get("proximity")
        return cls(
            d["chart"],
            tuple(Fraction(x) for x in d.get("point", ("0", "0"))),
            None if prox is None else frozenset(int(i) for i in prox),
            d.get("on_strict_h"),
        )


@dataclass(frozen=True)
class BlowupScript:
    steps: tuple[Center, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for j, c in enumerate(self.steps, start=1):
            if c.proximity is not None and any(not 1 <= i < j for i in c.proximity):
                raise ValueError(f"step {j}: proximity must reference earlier steps")

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, *centers: Center) -> BlowupScript:
        return BlowupScript(self.steps + tuple(centers))

    def to_json(self) -> list:
        return [c.to_json() for c in self.steps]

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> BlowupScript:
        if isinstance(data, dict):
            data = data["steps"]
        return cls(tuple(Center.from_json(d) for d in data))

    @classmethod
    def loads(cls, text: str) -> BlowupScript:
        return cls.from_json(json.loads(text))


# -- chart algebra --------------------------------------------------------------


def _u_valuation(p: MultiPoly, i: int) -> int:
    return min(e[i] for e in p.terms)


def _divide_var(p: MultiPoly, i: int, k: int) -> MultiPoly:
    if k == 0:
        return p
    return MultiPoly._raw(2, {e[:i] + (e[i] - k,) + e[i + 1 :]: c for e, c in p.terms.items()})


def _order(p: MultiPoly) -> int:
    return p.min_degree()


U = MultiPoly.var(2, 0)
V = MultiPoly.var(2, 1)
_CHILD_SUBS = {1: (U, U * V), 2: (U * V, V)}
_CHILD_EXC = {1: 0, 2: 1}  # index of the coordinate cutting out the new curve


@dataclass
class _Chart:
    system: list[MultiPoly]
    curves: dict[str, MultiPoly]
    root: int
    down: tuple[MultiPoly, MultiPoly] = (U, V)  # chart coordinates -> root chart coordinates


@dataclass(frozen=True)
class StepRecord:
    center: Center
    multiplicity: int
    proximity: frozenset[int]
    on_strict_h: bool
    image: ProjPoint


def _root_point(k: int, point: Sequence[Fraction]) -> ProjPoint:
    coords: list[Fraction] = list(point)
    coords.insert(k, Fraction(1))
    return ProjPoint.of(coords)


def _dehomogenize(p: MultiPoly, k: int) -> MultiPoly:
    images = []
    it = iter((U, V))
    for i in range(3):
        images.append(MultiPoly.constant(2, 1) if i == k else next(it))
    return p.substitute(images)


@dataclass
class Surface:
    """Mutable chart atlas of a blowup of P^2 together with one linear system."""

    charts: dict[str, _Chart] = field(default_factory=dict)
    steps: list[StepRecord] = field(default_factory=list)

    @classmethod
    def of_map(cls, f: RationalMapP | None) -> Surface:
        if f is not None and f.n != 2:
            raise ValueError("blowups are implemented on P^2 only")
        comps = list(f.components) if f is not None else []
        s = cls()
        for k, name in enumerate(ROOTS):
            system = [q for q in (_dehomogenize(c, k) for c in comps) if q]
            curves = {}
            h = _dehomogenize(MultiPoly.var(3, HLINE), k)
            if not h.is_constant():
                curves["H"] = h
            s.charts[name] = _Chart(system, curves, k)
        return s

    @property
    def r(self) -> int:
        return len(self.steps)

    def leaves(self) -> list[str]:
        return sorted(self.charts, key=lambda p: (p.count("/"), p))

    def is_base_point(self, chart: str, point: Sequence[Fraction] = (0, 0)) -> bool:
        ch = self.charts[chart]
        if not ch.system:
            return False
        return all(p.evaluate(point) == 0 for p in ch.system)

    def residual_base_points(self) -> list[tuple[str, tuple[Fraction, Fraction]]]:
        """Base points among the tracked candidates: chart origins and curve crossings."""
        out = []
        for name in self.leaves():
            for pt in self._candidates(name):
                if self.is_base_point(name, pt):
                    out.append((name, pt))
        return out

    def _candidates(self, name: str) -> list[tuple[Fraction, Fraction]]:
        pts = {(Fraction(0), Fraction(0))}
        curves = list(self.charts[name].curves.values())
        # crossings of tracked curves that are lines in this chart
        for a in range(len(curves)):
            for b in range(a + 1, len(curves)):
                p = _line_crossing(curves[a], curves[b])
                if p is not None:
                    pts.add(p)
        return sorted(pts)

    def multiplicity_at(self, chart: str, point: Sequence[Fraction]) -> int:
        ch = self.charts[chart]
        if not ch.system:
            return 0
        return min(_order(p.translate(point)) for p in ch.system)

    def blow_up(self, center: Center) -> StepRecord:
        if center.chart not in self.charts:
            raise ScriptError(f"chart {center.chart!r} is not a chart of the current surface")
        ch = self.charts[center.chart]
        pt = center.point
        system = [p.translate(pt) for p in ch.system]
        curves = {k: c.translate(pt) for k, c in ch.curves.items()}
        m = min((_order(p) for p in system), default=0)
        through = {k for k, c in curves.items() if c.constant_term() == 0}
        prox = frozenset(int(k[1:]) for k in through if k.startswith("E"))
        on_h = "H" in through
        if center.proximity is not None and center.proximity != prox:
            raise ScriptError(
                f"center {len(self.steps) + 1}: declared proximity {sorted(center.proximity)} "
                f"but the surface gives {sorted(prox)}"
            )
        if center.on_strict_h is not None and center.on_strict_h != on_h:
            raise ScriptError(f"center {len(self.steps) + 1}: declared on_strict_h disagrees with the surface")
        image = _root_point(ch.root, [p.evaluate(pt) for p in ch.down])
        shifted = tuple(p.translate(pt) for p in ch.down)
        j = len(self.steps) + 1
        del self.charts[center.chart]
        for child, (su, sv) in _CHILD_SUBS.items():
            i = _CHILD_EXC[child]
            new_sys = [_divide_var(p.substitute((su, sv)), i, m) for p in system]
            new_curves = {}
            for k, c in curves.items():
                t = c.substitute((su, sv))
                t = _divide_var(t, i, _u_valuation(t, i))
                if not t.is_constant():
                    new_curves[k] = t
            new_curves[f"E{j}"] = MultiPoly.var(2, i)
            down = tuple(p.substitute((su, sv)) for p in shifted)
            self.charts[f"{center.chart}/{child}"] = _Chart(new_sys, new_curves, ch.root, down)
        rec = StepRecord(Center(center.chart, pt, prox, on_h), m, prox, on_h, image)
        self.steps.append(rec)
        return rec


def _line_crossing(a: MultiPoly, b: MultiPoly) -> tuple[Fraction, Fraction] | None:
    if a.degree() != 1 or b.degree() != 1:
        return None
    (a1, a2, a0), (b1, b2, b0) = (
        (p.terms.get((1, 0), Fraction(0)), p.terms.get((0, 1), Fraction(0)), p.constant_term()) for p in (a, b)
    )
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    return ((-a0 * b2 + a2 * b0) / det, (-a1 * b0 + a0 * b1) / det)


def toric_script(f: RationalMapP, max_steps: int = 64) -> tuple[BlowupScript, Surface]:
    """Blow up base points at chart origins until none remain."""
    if not f.is_monomial():
        raise ValueError("toric resolution needs a monomial map")
    s = Surface.of_map(f)
    while True:
        todo = [c for c in s.leaves() if s.is_base_point(c)]
        if not todo:
            break
        if s.r >= max_steps:
            raise ScriptError(f"no resolution within {max_steps} blowups")
        s.blow_up(Center(todo[0]))
    return BlowupScript(tuple(rec.center for rec in s.steps)), s


def locus_inside_h(f: RationalMapP) -> bool:
    """Whether the indeterminacy locus lies in ``H = {X_2 = 0}``."""
    if f.is_monomial():
        return all(HLINE in T for T in indeterminacy_monomial(f))
    raise ValueError("only decided for monomial maps")
