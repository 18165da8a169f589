"""Exact linear algebra over Q, plus a modular rank used as a rank certificate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class QMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> QMatrix:
        ent = tuple(tuple(Fraction(x) for x in r) for r in rows)
        ncols = len(ent[0]) if ent else 0
        return cls(len(ent), ncols, ent)

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> QMatrix:
        return QMatrix.from_rows([list(c) for c in zip(*self.entries)] if self.rows else [])

    def __matmul__(self, other: QMatrix) -> QMatrix:
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other.entries))
        return QMatrix.from_rows(
            [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.entries]
        )

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(sum((a * Fraction(b) for a, b in zip(r, v)), Fraction(0)) for r in self.entries)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]


def _integer_rows(M: QMatrix) -> list[list[int]]:
    out = []
    for r in M.entries:
        den = reduce(math.lcm, (x.denominator for x in r), 1)
        out.append([int(x * den) for x in r])
    return out


def mat_rank(M: QMatrix) -> int:
    """Exact rank by Bareiss fraction-free elimination."""
    A = _integer_rows(M)
    nrows, ncols = M.rows, M.cols
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if A[i][col]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        p = A[rank][col]
        for i in range(rank + 1, nrows):
            a = A[i][col]
            row_i, row_r = A[i], A[rank]
            A[i] = [(p * row_i[j] - a * row_r[j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def mat_solve(M: QMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """A solution of ``M x = b`` (free variables set to 0), or ``None``."""
    if len(b) != M.rows:
        raise ValueError("right-hand side length does not match row count")
    A = [list(r) + [Fraction(x)] for r, x in zip(M.entries, b)]
    n = M.cols
    pivots = []
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, M.rows) if A[i][col]), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = 1 / A[row][col]
        A[row] = [x * inv for x in A[row]]
        for i in range(M.rows):
            if i != row and A[i][col]:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[row])]
        pivots.append(col)
        row += 1
    if any(A[i][n] for i in range(row, M.rows)):
        return None
    x = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        x[col] = A[i][n]
    return tuple(x)


def rank_mod_p(rows: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p.

    ``p`` must be below 2**31 so products fit in int64.  Full rank mod p
    certifies full rank over Q; a deficient rank proves nothing.
    """
    A = np.array(rows, dtype=np.int64) % p
    nrows, ncols = A.shape
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(A[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, col]), p - 2, p)
        A[rank] = (A[rank] * inv) % p
        below = A[rank + 1:, col]
        idx = np.nonzero(below)[0] + rank + 1
        if idx.size:
            A[idx] = (A[idx] - np.outer(A[idx, col], A[rank])) % p
        rank += 1
    return rank
