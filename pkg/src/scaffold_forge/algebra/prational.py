"""Rationals whose denominators are powers of a fixed prime.

Valuations of the elements we track are of the form k / p^j, so
:class:`fractions.Fraction` already gives exact arithmetic; this module only
adds the denominator check and a couple of conveniences.
"""

from __future__ import annotations

from fractions import Fraction


def is_p_power(n: int, p: int) -> bool:
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1


def prational(value, p: int, den: int = 1) -> Fraction:
    """Build ``value / den`` and check that its reduced denominator is a power of p."""
    x = Fraction(value) / den
    if not is_p_power(x.denominator, p):
        raise ValueError(f"{x} does not have a power-of-{p} denominator")
    return x


def fmt_rational(x) -> str:
    """Format an int, Fraction or infinity for reports ("inf", "-5/2", "14")."""
    if x == float("inf"):
        return "inf"
    if x == float("-inf"):
        return "-inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
