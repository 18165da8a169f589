"""Families of maps and their JSON file format.

A family file looks like::

    {"n": 3, "variables": ["x", "y", "z"],
     "maps": [{"name": "henon", "affine": ["z", "x + z^2", "y + x^2"],
               "inverse": ["y - x^2", "z - (y - x^2)^2", "x"],
               "dratio": {"value": "8", "provenance": "declared-regular-automorphism"}}]}

A map may instead give ``"projective"`` components, written in the affine
variables plus the homogenizing variable (``"homogenizing_variable"``,
default ``"w"``), which is the last projective coordinate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from ..algebra import parse_poly, split_tuple
from .rational_map import AffineMap, RationalMapP

INF = math.inf


def parse_ratio(value) -> Fraction | float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    if value == INF:
        return INF
    return Fraction(value)


def format_ratio(r) -> str:
    return "inf" if r == INF else str(r)


@dataclass(frozen=True)
class DeclaredRatio:
    value: Fraction | float
    provenance: str

    def __post_init__(self):
        if self.value != INF and self.value < 1:
            raise ValueError("a declared D-ratio must be >= 1")


@dataclass(frozen=True)
class Generator:
    name: str
    map: RationalMapP
    affine: AffineMap | None = None
    inverse: AffineMap | None = None
    declared: DeclaredRatio | None = None

    @property
    def degree(self) -> int:
        return self.map.degree


@dataclass
class MapFamily:
    n: int
    generators: list[Generator]
    variables: list[str] = field(default_factory=list)
    hvar: str = "w"

    def __post_init__(self):
        if not self.variables:
            self.variables = [f"x{i}" for i in range(1, self.n + 1)]
        for g in self.generators:
            if g.map.n != self.n:
                raise ValueError(f"generator {g.name} has dimension {g.map.n}, expected {self.n}")
            if g.inverse is not None:
                if g.affine is None:
                    raise ValueError(f"generator {g.name}: an inverse needs an affine map")
                if not (g.affine.compose(g.inverse).is_identity() and g.inverse.compose(g.affine).is_identity()):
                    raise ValueError(f"generator {g.name}: declared inverse does not compose to the identity")

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def degrees(self) -> list[int]:
        return [g.degree for g in self.generators]

    @property
    def maps(self) -> list[RationalMapP]:
        return [g.map for g in self.generators]

    @property
    def proj_variables(self) -> list[str]:
        return list(self.variables) + [self.hvar]

    def is_affine(self) -> bool:
        return all(g.affine is not None for g in self.generators)

    @classmethod
    def from_affine(cls, maps: Sequence[AffineMap], names: Sequence[str] | None = None, **kw) -> MapFamily:
        names = names or [f"f{i + 1}" for i in range(len(maps))]
        gens = [Generator(nm, m.homogenized, affine=m) for nm, m in zip(names, maps)]
        return cls(maps[0].n, gens, **kw)

    @classmethod
    def from_projective(cls, maps: Sequence[RationalMapP], names: Sequence[str] | None = None, **kw) -> MapFamily:
        names = names or [f"f{i + 1}" for i in range(len(maps))]
        return cls(maps[0].n, [Generator(nm, m) for nm, m in zip(names, maps)], **kw)

    def to_json(self) -> dict:
        pv = self.proj_variables
        out = []
        for g in self.generators:
            entry: dict = {"name": g.name}
            if g.affine is not None:
                entry["affine"] = [c.to_string(self.variables) for c in g.affine.components]
            else:
                entry["projective"] = g.map.to_strings(pv)
            if g.inverse is not None:
                entry["inverse"] = [c.to_string(self.variables) for c in g.inverse.components]
            if g.declared is not None:
                entry["dratio"] = {"value": format_ratio(g.declared.value), "provenance": g.declared.provenance}
            out.append(entry)
        return {"n": self.n, "variables": self.variables, "homogenizing_variable": self.hvar, "maps": out}


def _affine_from(texts: Sequence[str], variables: Sequence[str]) -> AffineMap:
    if len(texts) != len(variables):
        raise ValueError(f"expected {len(variables)} components, got {len(texts)}")
    return AffineMap.of([parse_poly(t, variables) for t in texts])


def family_from_json(data: dict) -> MapFamily:
    n = int(data["n"])
    variables = list(data.get("variables") or [f"x{i}" for i in range(1, n + 1)])
    if len(variables) != n:
        raise ValueError(f"'variables' must list {n} names")
    hvar = data.get("homogenizing_variable", "w")
    gens = []
    for i, entry in enumerate(data["maps"]):
        name = entry.get("name", f"f{i + 1}")
        affine = inverse = None
        if "affine" in entry:
            affine = _affine_from(entry["affine"], variables)
            fmap = affine.homogenized
        elif "projective" in entry:
            comps = entry["projective"]
            if isinstance(comps, str):
                comps = split_tuple(comps)
            fmap = RationalMapP([parse_poly(t, variables + [hvar]) for t in comps])
        else:
            raise ValueError(f"map {name!r} needs 'affine' or 'projective' components")
        if "inverse" in entry:
            inverse = _affine_from(entry["inverse"], variables)
        declared = None
        if "dratio" in entry:
            d = entry["dratio"]
            if isinstance(d, dict):
                declared = DeclaredRatio(parse_ratio(d["value"]), d.get("provenance", "declared"))
            else:
                declared = DeclaredRatio(parse_ratio(d), "declared")
        gens.append(Generator(name, fmap, affine, inverse, declared))
    return MapFamily(n, gens, variables, hvar)


def load_family(path: str | Path) -> MapFamily:
    return family_from_json(json.loads(Path(path).read_text()))
