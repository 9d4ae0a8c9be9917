"""Sparse multivariate polynomials over F_p in the variables Y_1, ..., Y_k."""

from __future__ import annotations

import math
import re
from typing import Iterable, Mapping, Sequence

from .fp import require_prime
from ._expr import parse_expression

NEG_INF = -math.inf

Exponent = tuple[int, ...]


class MultiPoly:
    """Immutable polynomial with coefficients reduced mod p.

    ``terms`` maps exponent vectors (length ``nvars``) to non-zero residues.
    Variables are numbered from 1 in printed output (``Y1``, ``Y2``, ...).
    """

    __slots__ = ("p", "nvars", "terms", "_hash")

    def __init__(self, p: int, nvars: int, terms: Mapping[Exponent, int] | None = None):
        self.p = p
        self.nvars = nvars
        clean: dict[Exponent, int] = {}
        for exp, c in (terms or {}).items():
            c = int(c) % p
            if c:
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} has wrong length for {nvars} variables")
                clean[tuple(exp)] = c
        self.terms = clean
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, p, nvars):
        return cls(p, nvars)

    @classmethod
    def const(cls, p, nvars, c):
        return cls(p, nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, p, nvars, i):
        """The variable Y_i (1-based)."""
        if not 1 <= i <= nvars:
            raise ValueError(f"Y{i} not among {nvars} variables")
        exp = [0] * nvars
        exp[i - 1] = 1
        return cls(p, nvars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, p, exp: Sequence[int], c=1):
        return cls(p, len(exp), {tuple(exp): c})

    @classmethod
    def parse(cls, text: str, p: int, nvars: int, symbols: Mapping[str, MultiPoly] | None = None):
        """Parse e.g. ``"Y1^3 + Y1^2*Y2 + 1"``; extra named symbols may be supplied."""
        require_prime(p)
        symbols = dict(symbols or {})

        def symbol(name):
            if name in symbols:
                return symbols[name].extend(nvars)
            m = re.fullmatch(r"Y(\d+)", name)
            if not m:
                raise ValueError(f"unknown symbol {name!r}")
            return cls.var(p, nvars, int(m.group(1)))

        out = parse_expression(text, lambda k: cls.const(p, nvars, k), symbol)
        if not isinstance(out, MultiPoly):
            out = cls.const(p, nvars, out)
        return out

    # basic queries --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def total_degree(self):
        """Maximum total degree of a term; ``-inf`` for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def coeff(self, exp: Sequence[int]) -> int:
        return self.terms.get(tuple(exp), 0)

    def used_vars(self) -> int:
        """Index of the highest variable that actually occurs (0 if none)."""
        top = 0
        for e in self.terms:
            for j in range(self.nvars - 1, -1, -1):
                if e[j]:
                    top = max(top, j + 1)
                    break
        return top

    def extend(self, nvars: int) -> MultiPoly:
        """Same polynomial viewed in a ring with ``nvars`` variables."""
        if nvars == self.nvars:
            return self
        if nvars < self.used_vars():
            raise ValueError("cannot drop a variable that occurs")
        if nvars > self.nvars:
            pad = (0,) * (nvars - self.nvars)
            return MultiPoly(self.p, nvars, {e + pad: c for e, c in self.terms.items()})
        return MultiPoly(self.p, nvars, {e[:nvars]: c for e, c in self.terms.items()})

    # arithmetic -----------------------------------------------------------
    def _lift(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            if other.nvars != self.nvars:
                n = max(other.nvars, self.nvars)
                return other.extend(n)
            return other
        if isinstance(other, int) or hasattr(other, "__index__"):
            return MultiPoly.const(self.p, self.nvars, int(other))
        return NotImplemented

    def _align(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return self, o
        n = max(self.nvars, o.nvars)
        return self.extend(n), o.extend(n)

    def __add__(self, other):
        a, b = self._align(other)
        if b is NotImplemented:
            return b
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = (terms.get(e, 0) + c) % a.p
        return MultiPoly(a.p, a.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.p, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._align(other)
        if b is NotImplemented:
            return b
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._align(other)
        if b is NotImplemented:
            return b
        p = a.p
        out: dict[Exponent, int] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return MultiPoly(p, a.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.const(self.p, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius(self, k: int = 1) -> MultiPoly:
        """Return self^(p^k); coefficients lie in F_p so only exponents scale."""
        if k < 0:
            raise ValueError("k must be non-negative")
        q = self.p ** k
        return MultiPoly(self.p, self.nvars, {tuple(x * q for x in e): c for e, c in self.terms.items()})

    def wp(self) -> MultiPoly:
        """The Artin-Schreier operator f -> f^p - f."""
        return self.frobenius(1) - self

    def substitute(self, images: Sequence[MultiPoly], nvars: int | None = None) -> MultiPoly:
        """Replace Y_j by ``images[j-1]``; the result lives in ``nvars`` variables.

        ``nvars`` defaults to the ring of the images (needed only when there
        are no images).
        """
        if len(images) < self.nvars:
            raise ValueError("not enough images for substitution")
        target = nvars if nvars is not None else (images[0].nvars if images else self.nvars)
        images = [im.extend(target) for im in images]
        if not self.terms:
            return MultiPoly.zero(self.p, target)
        cache: dict[tuple[int, int], MultiPoly] = {}

        def pw(j, k):
            key = (j, k)
            if key not in cache:
                cache[key] = images[j] ** k
            return cache[key]

        out = MultiPoly.zero(self.p, target)
        for e, c in self.terms.items():
            term = MultiPoly.const(self.p, target, c)
            for j, k in enumerate(e):
                if k:
                    term = term * pw(j, k)
            out = out + term
        return out

    def evaluate(self, values: Sequence, one=1):
        """Evaluate at arbitrary ring elements supporting + and *."""
        total = None
        for e, c in self.terms.items():
            term = one * c
            for v, k in zip(values, e):
                if k:
                    term = term * (v ** k)
            total = term if total is None else total + term
        return one * 0 if total is None else total

    # comparison / display -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = MultiPoly.const(self.p, self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if self.p != other.p:
            return False
        n = max(self.nvars, other.nvars, self.used_vars(), other.used_vars())
        try:
            return self.extend(n).terms == other.extend(n).terms
        except ValueError:
            return False

    def __hash__(self):
        if self._hash is None:
            n = self.used_vars()
            self._hash = hash((self.p, frozenset((e[:n], c) for e, c in self.terms.items())))
        return self._hash

    def sorted_terms(self) -> list[tuple[Exponent, int]]:
        """Terms in decreasing significance: degree, then later variables first."""
        return sorted(self.terms.items(), key=lambda t: monomial_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for j, k in enumerate(e):
                if k == 1:
                    factors.append(f"Y{j + 1}")
                elif k > 1:
                    factors.append(f"Y{j + 1}^{k}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self}, p={self.p}, nvars={self.nvars})"

    def to_json(self) -> list[list]:
        return [[c, list(e)] for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Iterable, p: int, nvars: int) -> MultiPoly:
        return cls(p, nvars, {tuple(e): c for c, e in data})


def monomial_key(exp: Sequence[int]) -> tuple:
    """Significance order on monomials: total degree, then reversed exponents."""
    return (sum(exp), tuple(reversed(tuple(exp))))


def monomials_up_to(nvars: int, degree: int) -> list[Exponent]:
    """All exponent vectors of total degree <= ``degree``, least significant first."""
    out: list[Exponent] = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    if degree < 0:
        return []
    rec([], degree, nvars)
    out.sort(key=monomial_key)
    return out
