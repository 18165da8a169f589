from fractions import Fraction as Rat

from .linalg import QMatrix, mat_rank, mat_solve, rank_mod_p
from .parse import ParseError, parse_poly, split_tuple
from .poly import MultiPoly, grlex_key, monomial_gcd, poly_gcd, poly_gcd_many


def add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def pow(p: MultiPoly, k: int) -> MultiPoly:  # noqa: A001
    return p**k


def substitute(p: MultiPoly, images) -> MultiPoly:
    return p.substitute(images)


__all__ = [
    "Rat",
    "MultiPoly",
    "QMatrix",
    "ParseError",
    "add",
    "grlex_key",
    "mat_rank",
    "mat_solve",
    "monomial_gcd",
    "mul",
    "parse_poly",
    "poly_gcd",
    "poly_gcd_many",
    "pow",
    "rank_mod_p",
    "split_tuple",
    "substitute",
]
