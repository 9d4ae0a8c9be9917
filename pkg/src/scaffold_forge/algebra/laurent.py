"""Exact elements of F_p((pi)) represented as ratios of polynomials in pi.

A non-zero value is stored as ``pi^shift * N(pi) / D(pi)`` where N and D are
polynomials with non-zero constant terms and D has constant term 1. The
valuation is then simply ``shift``. Fractions are *not* reduced by a gcd on
construction: the display form keeps whatever numerator and denominator the
computation produced (e.g. a cofactor divided by a cofactor). Equality and
hashing are nonetheless by value.
"""

from __future__ import annotations

import numpy as np

from .fp import require_prime
from ._expr import parse_expression

Poly = tuple[int, ...]


# --- dense univariate helpers; index = power of pi ---------------------------

def _trim(a) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(int(x) for x in a)


def poly_mul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return ()
    return _trim(np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p)


def poly_add(a: Poly, b: Poly, p: int) -> Poly:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return _trim(out)


def poly_scale(a: Poly, c: int, p: int) -> Poly:
    return _trim([(x * c) % p for x in a])


def poly_shift(a: Poly, k: int) -> Poly:
    return (0,) * k + tuple(a) if a else ()


def poly_divmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(q) - 1, -1, -1):
        c = (r[k + len(b) - 1] * inv) % p
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                r[k + j] = (r[k + j] - c * bj) % p
    return _trim(q), _trim(r[: len(b) - 1])


def poly_gcd(a: Poly, b: Poly, p: int) -> Poly:
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if not a:
        return a
    return poly_scale(a, pow(a[-1], -1, p), p)


def _low_order(a: Poly) -> int:
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("zero polynomial has no low order term")


def _poly_str(a: Poly) -> str:
    parts = []
    for k, c in enumerate(a):
        if not c:
            continue
        if k == 0:
            parts.append(str(c))
        else:
            mono = "pi" if k == 1 else f"pi^{k}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)


def _is_one(a: Poly) -> bool:
    return a == (1,)


class LaurentFrac:
    __slots__ = ("p", "shift", "num", "den")

    def __init__(self, p: int, shift: int, num: Poly, den: Poly = (1,)):
        # trusted constructor; use from_parts for normalization
        self.p = p
        self.shift = shift
        self.num = num
        self.den = den

    # construction -----------------------------------------------------------
    @classmethod
    def from_parts(cls, p: int, shift: int, num, den=(1,)) -> LaurentFrac:
        """Normalize ``pi^shift * num / den`` (num, den coefficient sequences)."""
        num = _trim([int(c) % p for c in num])
        den = _trim([int(c) % p for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return cls(p, 0, (), (1,))
        ln, ld = _low_order(num), _low_order(den)
        num, den = num[ln:], den[ld:]
        inv = pow(den[0], -1, p)
        if inv != 1:
            num, den = poly_scale(num, inv, p), poly_scale(den, inv, p)
        return cls(p, shift + ln - ld, num, den)

    @classmethod
    def zero(cls, p: int) -> LaurentFrac:
        return cls(require_prime(p), 0, (), (1,))

    @classmethod
    def const(cls, p: int, c: int) -> LaurentFrac:
        return cls.from_parts(require_prime(p), 0, (c,))

    @classmethod
    def pi_power(cls, p: int, k: int, c: int = 1) -> LaurentFrac:
        return cls.from_parts(require_prime(p), k, (c,))

    @classmethod
    def parse(cls, text: str, p: int) -> LaurentFrac:
        """Parse expressions such as ``"(1+pi^20)/(pi^42*(1+pi^2))"``."""
        p = require_prime(p)

        def symbol(name):
            if name != "pi":
                raise ValueError(f"unknown symbol {name!r}; only 'pi' is allowed")
            return cls.pi_power(p, 1)

        return parse_expression(text, lambda k: cls.const(p, k), symbol)

    # queries ------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    @property
    def valuation(self) -> int:
        if not self.num:
            raise ValueError("the zero element has infinite valuation")
        return self.shift

    def reduced(self) -> LaurentFrac:
        """Same value with numerator and denominator made coprime."""
        if not self.num or _is_one(self.den):
            return self
        g = poly_gcd(self.num, self.den, self.p)
        if len(g) <= 1:
            return self
        n = poly_divmod(self.num, g, self.p)[0]
        d = poly_divmod(self.den, g, self.p)[0]
        return LaurentFrac.from_parts(self.p, self.shift, n, d)

    def is_laurent_polynomial(self) -> bool:
        return _is_one(self.reduced().den)

    # arithmetic -----------------------------------------------------------------
    def _coerce(self, other) -> LaurentFrac:
        if isinstance(other, LaurentFrac):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other
        if isinstance(other, (int, np.integer)):
            return LaurentFrac.const(self.p, int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            return self
        if not self.num:
            return o
        p = self.p
        s = min(self.shift, o.shift)
        a = poly_shift(self.num, self.shift - s)
        b = poly_shift(o.num, o.shift - s)
        if self.den == o.den:
            return LaurentFrac.from_parts(p, s, poly_add(a, b, p), self.den)
        num = poly_add(poly_mul(a, o.den, p), poly_mul(b, self.den, p), p)
        return LaurentFrac.from_parts(p, s, num, poly_mul(self.den, o.den, p))

    __radd__ = __add__

    def __neg__(self):
        return LaurentFrac(self.p, self.shift, poly_scale(self.num, -1, self.p), self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return LaurentFrac.zero(self.p)
        p = self.p
        if _is_one(o.den) or _is_one(self.den):
            den = self.den if _is_one(o.den) else o.den
        else:
            den = poly_mul(self.den, o.den, p)
        return LaurentFrac.from_parts(p, self.shift + o.shift, poly_mul(self.num, o.num, p), den)

    __rmul__ = __mul__

    def inverse(self) -> LaurentFrac:
        if not self.num:
            raise ZeroDivisionError("zero is not invertible")
        return LaurentFrac.from_parts(self.p, -self.shift, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentFrac.const(self.p, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius(self, k: int = 1) -> LaurentFrac:
        """Return self^(p^k) by spreading coefficients (exact in characteristic p)."""
        if k < 0:
            raise ValueError("k must be non-negative")
        q = self.p ** k

        def spread(a):
            out = [0] * ((len(a) - 1) * q + 1) if a else []
            for i, c in enumerate(a):
                out[i * q] = c
            return tuple(out)

        if not self.num:
            return self
        return LaurentFrac(self.p, self.shift * q, spread(self.num), spread(self.den))

    # comparison -------------------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, LaurentFrac) else other
        if o is NotImplemented:
            return NotImplemented
        if self.p != o.p:
            return False
        if not self.num or not o.num:
            return not self.num and not o.num
        if self.shift != o.shift:
            return False
        return poly_mul(self.num, o.den, self.p) == poly_mul(o.num, self.den, self.p)

    def __hash__(self):
        r = self.reduced()
        return hash((r.p, r.shift, r.num, r.den))

    # display ----------------------------------------------------------------------
    def __str__(self):
        if not self.num:
            return "0"
        k = self.shift
        n_str = _poly_str(self.num)
        num_const = len(self.num) == 1
        n_wrapped = n_str if num_const else f"({n_str})"
        if _is_one(self.den):
            if k == 0:
                return n_str
            mono = "pi" if abs(k) == 1 else f"pi^{abs(k)}"
            if k > 0:
                if num_const:
                    return mono if self.num[0] == 1 else f"{n_str}*{mono}"
                return f"{mono}*{n_wrapped}"
            return f"{n_wrapped}/{mono}"
        d_str = f"({_poly_str(self.den)})"
        if k == 0:
            return f"{n_wrapped}/{d_str}"
        mono = "pi" if abs(k) == 1 else f"pi^{abs(k)}"
        if k > 0:
            return f"{mono}*{n_wrapped}/{d_str}"
        return f"{n_wrapped}/({mono}*{d_str})"

    def __repr__(self):
        return f"LaurentFrac({self}, p={self.p})"


def frobenius_pow(x, k: int):
    """x^(p^k) for a :class:`LaurentFrac` or a :class:`MultiPoly`."""
    return x.frobenius(k)


def laurent_series(x: LaurentFrac, prec: int) -> list[int]:
    """Coefficients of pi^v(x), ..., pi^prec in the expansion of ``x``."""
    if not x.num:
        raise ValueError("no leading term: cannot expand zero")
    v = x.shift
    if prec < v:
        raise ValueError(f"precision {prec} is below the valuation {v}")
    count = prec - v + 1
    p = x.p
    num = list(x.num[:count]) + [0] * max(0, count - len(x.num))
    den = x.den
    out = []
    # den[0] == 1 so each step is a subtraction
    for i in range(count):
        c = num[i] % p
        out.append(c)
        if c:
            for j in range(1, min(len(den), count - i)):
                num[i + j] = (num[i + j] - c * den[j]) % p
    return out

