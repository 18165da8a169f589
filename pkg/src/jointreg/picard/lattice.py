"""Picard lattices of iterated point blowups of P^2.

Two bases are used.  The *total* basis is ``H, E_1^tot, ..., E_r^tot``
(pullbacks of the line class and of each exceptional curve to the final
surface), where the intersection form is ``diag(1, -1, ..., -1)``.  The
*proper* basis is ``H#, E_1, ..., E_r`` (strict transforms of the fixed
line ``H`` and of the exceptional curves).  They are related by::

    E_i^tot = E_i + sum(E_j^tot for j proximate to i)
    H#      = H - sum(hmult_i * E_i^tot)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from ..algebra import QMatrix, mat_solve

TOTAL = "total"
PROPER = "proper"


@dataclass(frozen=True)
class DivisorClass:
    basis: str
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.basis not in (TOTAL, PROPER):
            raise ValueError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def proper(cls, *coeffs) -> DivisorClass:
        return cls(PROPER, tuple(coeffs))

    @classmethod
    def total(cls, *coeffs) -> DivisorClass:
        return cls(TOTAL, tuple(coeffs))

    def _same(self, other: DivisorClass) -> None:
        if self.basis != other.basis or len(self.coeffs) != len(other.coeffs):
            raise ValueError("classes live in different bases or lattices")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._same(other)
        return DivisorClass(self.basis, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        self._same(other)
        return DivisorClass(self.basis, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, k) -> DivisorClass:
        k = Fraction(k)
        return DivisorClass(self.basis, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def format(self, names: Sequence[str] | None = None) -> str:
        return "(" + str(self.coeffs[0]) + "; " + ", ".join(str(c) for c in self.coeffs[1:]) + ")"

    def __str__(self) -> str:
        return self.format()


def zero_class(r: int, basis: str = PROPER) -> DivisorClass:
    return DivisorClass(basis, (0,) * (r + 1))


@dataclass(frozen=True)
class PicLattice:
    """Lattice of a blowup sequence.

    ``proximity[j][i] == 1`` when the center of blowup ``j`` lies on the
    strict transform of exceptional curve ``i`` (``i < j``, zero-based).
    ``h_mult[j]`` is the multiplicity of the strict transform of ``H`` at
    center ``j``.
    """

    proximity: tuple[tuple[int, ...], ...]
    h_mult: tuple[int, ...]

    def __post_init__(self):
        r = len(self.h_mult)
        if len(self.proximity) != r or any(len(row) != r for row in self.proximity):
            raise ValueError("proximity must be an r x r matrix")
        for j, row in enumerate(self.proximity):
            if any(row[i] for i in range(j, r)):
                raise ValueError("proximity may only reference strictly earlier blowups")

    @classmethod
    def trivial(cls) -> PicLattice:
        return cls((), ())

    @classmethod
    def from_steps(cls, proximity_sets: Sequence[Sequence[int]], on_h: Sequence[bool]) -> PicLattice:
        """Build from per-step sets of (1-based) earlier exceptional indices."""
        r = len(on_h)
        prox = [[0] * r for _ in range(r)]
        for j, s in enumerate(proximity_sets):
            for i in s:
                prox[j][i - 1] = 1
        return cls(tuple(tuple(row) for row in prox), tuple(int(b) for b in on_h))

    @property
    def r(self) -> int:
        return len(self.h_mult)

    @property
    def names(self) -> list[str]:
        return ["H#"] + [f"E{i}" for i in range(1, self.r + 1)]

    @cached_property
    def basis_change(self) -> QMatrix:
        """Rows: proper basis elements written in the total basis."""
        r = self.r
        rows = [[0] * (r + 1) for _ in range(r + 1)]
        rows[0][0] = 1
        for i in range(r):
            rows[0][i + 1] = -self.h_mult[i]
        for i in range(r):
            rows[i + 1][i + 1] = 1
            for j in range(r):
                if self.proximity[j][i]:
                    rows[i + 1][j + 1] = -1
        return QMatrix.from_rows(rows)

    @cached_property
    def intersection_matrix(self) -> QMatrix:
        """Intersection form in the proper basis: ``P diag(1,-1,..) P^T``."""
        P = self.basis_change
        Q = QMatrix.from_rows([[(1 if i == 0 else -1) if i == j else 0 for j in range(self.r + 1)] for i in range(self.r + 1)])
        return P @ Q @ P.transpose()

    def intersection_matrix_direct(self) -> QMatrix:
        """The same form from closed formulas in the proximity data."""
        r = self.r
        prox = self.proximity
        M = [[0] * (r + 1) for _ in range(r + 1)]
        M[0][0] = 1 - sum(h * h for h in self.h_mult)
        for i in range(r):
            # H# . E_i
            M[0][i + 1] = M[i + 1][0] = self.h_mult[i] - sum(self.h_mult[j] for j in range(r) if prox[j][i])
            M[i + 1][i + 1] = -1 - sum(prox[j][i] for j in range(r))
            for k in range(i + 1, r):
                v = prox[k][i] - sum(1 for a in range(r) if prox[a][i] and prox[a][k])
                M[i + 1][k + 1] = M[k + 1][i + 1] = v
        return QMatrix.from_rows(M)

    def verify(self) -> None:
        M = self.intersection_matrix
        if M != M.transpose():
            raise AssertionError("intersection matrix is not symmetric")
        if M != self.intersection_matrix_direct():
            raise AssertionError("intersection matrix disagrees with the proximity formulas")

    def to_total(self, c: DivisorClass) -> DivisorClass:
        if c.basis != PROPER:
            raise ValueError("class is not in the proper basis")
        if len(c) != self.r + 1:
            raise ValueError("class length does not match the lattice")
        return DivisorClass(TOTAL, self.basis_change.transpose().apply(c.coeffs))

    def to_proper(self, c: DivisorClass) -> DivisorClass:
        if c.basis != TOTAL:
            raise ValueError("class is not in the total basis")
        if len(c) != self.r + 1:
            raise ValueError("class length does not match the lattice")
        x = mat_solve(self.basis_change.transpose(), c.coeffs)
        assert x is not None  # unitriangular
        return DivisorClass(PROPER, x)

    def intersect(self, a: DivisorClass, b: DivisorClass) -> Fraction:
        a = a if a.basis == PROPER else self.to_proper(a)
        b = b if b.basis == PROPER else self.to_proper(b)
        return sum((x * y for x, y in zip(a.coeffs, self.intersection_matrix.apply(b.coeffs))), Fraction(0))

    def hyperplane_class(self) -> DivisorClass:
        """Pullback of the line class, ``pi^* H``, in the total basis."""
        return DivisorClass(TOTAL, (1,) + (0,) * self.r)

    def format_matrix(self) -> str:
        names = self.names
        w = max(4, *(len(n) for n in names)) + 1
        lines = [" " * w + "".join(n.rjust(w) for n in names)]
        for n, row in zip(names, self.intersection_matrix.entries):
            lines.append(n.rjust(w) + "".join(str(x).rjust(w) for x in row))
        return "\n".join(lines)


def afe_member(c: DivisorClass) -> bool:
    """Membership in the cone spanned by ``H#`` and the proper exceptional curves."""
    if c.basis != PROPER:
        raise ValueError("AFE membership is defined in the proper basis")
    return all(x >= 0 for x in c.coeffs)


def afe_dominates(c1: DivisorClass, c2: DivisorClass) -> bool:
    """``c1 - c2`` is AFE-effective."""
    return afe_member(c1 - c2)
