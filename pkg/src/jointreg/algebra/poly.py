"""Sparse multivariate polynomials over Q.

A :class:`MultiPoly` is an immutable map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients.  Every operation returns a new
normalized polynomial; the monomial order used for printing, leading terms
and gcd normalization is graded lexicographic with ``x0 > x1 > ...``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Mapping, Sequence

Exps = tuple[int, ...]


def grlex_key(exps: Exps) -> tuple[int, Exps]:
    return (sum(exps), exps)


class MultiPoly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exps, object] | None = None):
        if nvars < 0:
            raise ValueError("variable count must be nonnegative")
        clean: dict[Exps, Fraction] = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise ValueError(f"monomial {exps} has wrong length for {nvars} variables")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = Fraction(c)
                if c:
                    clean[exps] = clean.get(exps, Fraction(0)) + c
                    if not clean[exps]:
                        del clean[exps]
        self.nvars = nvars
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> MultiPoly:
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> MultiPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> MultiPoly:
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> MultiPoly:
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exps, Fraction]) -> MultiPoly:
        # caller guarantees normalized terms
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Exps, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True))

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        """Order of vanishing at the origin; -1 for the zero polynomial."""
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def leading_term(self) -> tuple[Exps, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=grlex_key)
        return exps, self.terms[exps]

    def homogeneous_part(self, d: int) -> MultiPoly:
        return MultiPoly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    # -- ring operations ----------------------------------------------------

    def _check(self, other: MultiPoly) -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.nvars, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> MultiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> MultiPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c) -> MultiPoly:
        c = Fraction(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k: int) -> MultiPoly:
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, exps: Exps, c=1) -> MultiPoly:
        c = Fraction(c)
        return MultiPoly._raw(
            self.nvars,
            {tuple(a + b for a, b in zip(e, exps)): v * c for e, v in self.terms.items()},
        )

    # -- division -----------------------------------------------------------

    def divmod(self, divisor: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
        """Multivariate division by a single divisor under grlex."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lt_e, lt_c = divisor.leading_term()
        quot: dict[Exps, Fraction] = {}
        rem: dict[Exps, Fraction] = {}
        p = dict(self.terms)
        while p:
            e = max(p, key=grlex_key)
            c = p[e]
            if all(a >= b for a, b in zip(e, lt_e)):
                qe = tuple(a - b for a, b in zip(e, lt_e))
                qc = c / lt_c
                quot[qe] = quot.get(qe, 0) + qc
                for de, dc in divisor.terms.items():
                    te = tuple(a + b for a, b in zip(de, qe))
                    s = p.get(te, 0) - qc * dc
                    if s:
                        p[te] = s
                    else:
                        p.pop(te, None)
            else:
                rem[e] = c
                del p[e]
        return MultiPoly(self.nvars, quot), MultiPoly._raw(self.nvars, rem)

    def divides(self, other: MultiPoly) -> bool:
        if self.is_zero():
            return other.is_zero()
        return other.divmod(self)[1].is_zero()

    def exact_div(self, divisor: MultiPoly) -> MultiPoly:
        q, r = self.divmod(divisor)
        if r:
            raise ArithmeticError("division is not exact")
        return q

    # -- evaluation and substitution ---------------------------------------

    def evaluate(self, point: Sequence) -> Fraction | int:
        if len(point) != self.nvars:
            raise ValueError("point has wrong dimension")
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x**k
            total += t
        return total

    def substitute(self, images: Sequence[MultiPoly]) -> MultiPoly:
        """Replace variable ``i`` by ``images[i]`` and expand."""
        if len(images) != self.nvars:
            raise ValueError(f"expected {self.nvars} images, got {len(images)}")
        if not images:
            return self
        m = images[0].nvars
        for g in images:
            if g.nvars != m:
                raise ValueError("images must share one variable count")
        powers: list[dict[int, MultiPoly]] = [dict() for _ in images]

        def power(i: int, k: int) -> MultiPoly:
            cache = powers[i]
            if k not in cache:
                cache[k] = images[i] ** k
            return cache[k]

        out = MultiPoly.zero(m)
        for e, c in self.terms.items():
            t = MultiPoly.constant(m, c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def translate(self, shift: Sequence) -> MultiPoly:
        """``p(x + shift)``."""
        n = self.nvars
        if not any(shift):
            return self
        images = [MultiPoly.var(n, i) + Fraction(s) for i, s in enumerate(shift)]
        return self.substitute(images)

    # -- content / normalization -------------------------------------------

    def integer_content(self) -> Fraction:
        """Positive rational ``c`` such that ``self / c`` has coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        nums = [c.numerator for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        return Fraction(reduce(math.gcd, nums), reduce(math.lcm, dens))

    def primitive(self) -> MultiPoly:
        """Coprime integer coefficients, positive grlex-leading coefficient."""
        if not self.terms:
            return self
        c = self.integer_content()
        if self.leading_term()[1] < 0:
            c = -c
        return self.scale(1 / c)

    def monic(self) -> MultiPoly:
        return self.scale(1 / self.leading_term()[1])

    def integer_terms(self) -> list[tuple[int, Exps]]:
        """Coefficients as Python ints; requires integral coefficients."""
        out = []
        for e, c in self.terms.items():
            if c.denominator != 1:
                raise ValueError("polynomial has non-integral coefficients")
            out.append((c.numerator, e))
        return out

    # -- printing -------------------------------------------------------------

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        if len(names) != self.nvars:
            raise ValueError("wrong number of variable names")
        if not self.terms:
            return "0"
        parts = []
        for e, c in self:
            mono = "*".join(
                name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k
            )
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.to_string()!r})"


def monomial_gcd(exps: Iterable[Exps]) -> Exps:
    exps = list(exps)
    return tuple(min(col) for col in zip(*exps))


# -- gcd ----------------------------------------------------------------------


def _coeffs_in(p: MultiPoly, v: int) -> dict[int, MultiPoly]:
    """Coefficients of ``p`` viewed as a polynomial in variable ``v``."""
    buckets: dict[int, dict[Exps, Fraction]] = {}
    for e, c in p.terms.items():
        k = e[v]
        e2 = e[:v] + (0,) + e[v + 1:]
        buckets.setdefault(k, {})[e2] = c
    return {k: MultiPoly._raw(p.nvars, t) for k, t in buckets.items()}


def _shift_var(p: MultiPoly, v: int, k: int) -> MultiPoly:
    if k == 0:
        return p
    exps = [0] * p.nvars
    exps[v] = k
    return p.mul_monomial(tuple(exps))


def _lc_in(p: MultiPoly, v: int) -> tuple[int, MultiPoly]:
    cs = _coeffs_in(p, v)
    d = max(cs)
    return d, cs[d]


def _prem(a: MultiPoly, b: MultiPoly, v: int) -> MultiPoly:
    db, lcb = _lc_in(b, v)
    r = a
    e = a.degree_in(v) - db + 1
    while r and r.degree_in(v) >= db:
        dr, lcr = _lc_in(r, v)
        r = r * lcb - _shift_var(lcr * b, v, dr - db)
        e -= 1
    if e > 0:
        r = r * (lcb**e)
    return r


def _content_in(p: MultiPoly, v: int) -> MultiPoly:
    g = MultiPoly.zero(p.nvars)
    for c in _coeffs_in(p, v).values():
        g = _gcd(g, c, v + 1)
        if g.is_constant():
            return MultiPoly.constant(p.nvars, 1)
    return g


def _primitive_in(p: MultiPoly, v: int) -> MultiPoly:
    if not p:
        return p
    return p.exact_div(_content_in(p, v)).primitive()


def _gcd(p: MultiPoly, q: MultiPoly, v: int) -> MultiPoly:
    n = p.nvars
    if not p:
        return q.primitive() if q else q
    if not q:
        return p.primitive()
    if p.is_constant() or q.is_constant():
        return MultiPoly.constant(n, 1)
    if p.is_monomial() or q.is_monomial():
        mono = p if p.is_monomial() else q
        other = q if mono is p else p
        g = monomial_gcd([mono.leading_term()[0]] + list(other.terms))
        return MultiPoly.monomial(g)
    # recurse on the smallest variable present; coefficients then live in later ones
    v = min(p.variables() | q.variables())
    in_p = p.degree_in(v) > 0
    in_q = q.degree_in(v) > 0
    if not in_p:
        return _gcd(p, _content_in(q, v), v + 1)
    if not in_q:
        return _gcd(_content_in(p, v), q, v + 1)
    cp = _content_in(p, v)
    cq = _content_in(q, v)
    c = _gcd(cp, cq, v + 1)
    a = p.exact_div(cp).primitive()
    b = q.exact_div(cq).primitive()
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while b and b.degree_in(v) > 0:
        r = _prem(a, b, v)
        a, b = b, _primitive_in(r, v)
    g = a if not b else MultiPoly.constant(n, 1)
    g = _primitive_in(g, v)
    return (c * g).primitive()


def poly_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Greatest common divisor: primitive, positive grlex-leading coefficient."""
    p._check(q)
    if not p and not q:
        raise ValueError("gcd of two zero polynomials is undefined")
    return _gcd(p, q, 0)


def poly_gcd_many(polys: Iterable[MultiPoly]) -> MultiPoly:
    g = None
    for p in polys:
        if not p:
            continue
        g = p.primitive() if g is None else poly_gcd(g, p)
        if g.is_constant():
            return g
    if g is None:
        raise ValueError("gcd of zero polynomials is undefined")
    return g
