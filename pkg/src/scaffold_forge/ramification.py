"""Upper/lower ramification breaks, Hasse-Herbrand maps and the break
conditions that make a specialization of the generic tower realize a
prescribed ramification filtration.

All quantities are exact: integers or :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra.poly import MultiPoly
from .algebra.prational import fmt_rational
from .saltman import GenericTower


class BreakError(ValueError):
    """Invalid break sequence."""


def _check_increasing(seq: Sequence[int], what: str):
    if not seq:
        raise BreakError(f"empty {what} sequence")
    if any(int(x) != x for x in seq):
        raise BreakError(f"{what} breaks must be integers")
    if seq[0] <= 0:
        raise BreakError(f"{what} breaks must be positive")
    for a, b in zip(seq, seq[1:]):
        if b <= a:
            raise BreakError(f"{what} breaks must be strictly increasing: {list(seq)}")


@dataclass(frozen=True)
class BreakData:
    p: int
    u: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.u)

    def check_known_inequalities(self) -> bool:
        """b_j - b_i <= p^(j-1) (u_j - u_i) and b_j <= p^(j-1) u_j (1-based j)."""
        p, u, b = self.p, self.u, self.b
        for j in range(self.n):
            if b[j] > p ** j * u[j]:
                return False
            for i in range(j):
                if b[j] - b[i] > p ** j * (u[j] - u[i]):
                    return False
        return True

    def to_json(self) -> dict:
        return {"u": list(self.u), "b": list(self.b)}


def lower_from_upper(u: Sequence[int], p: int) -> BreakData:
    u = tuple(int(x) for x in u)
    _check_increasing(u, "upper")
    b = [u[0]]
    for i in range(1, len(u)):
        b.append(b[-1] + p ** i * (u[i] - u[i - 1]))
    data = BreakData(p, u, tuple(b))
    assert data.check_known_inequalities()
    return data


def upper_from_lower(b: Sequence[int], p: int) -> BreakData:
    b = tuple(int(x) for x in b)
    _check_increasing(b, "lower")
    u = [b[0]]
    for i in range(1, len(b)):
        step, rem = divmod(b[i] - b[i - 1], p ** i)
        if rem:
            raise BreakError(f"p^{i} does not divide b_{i + 1} - b_{i} = {b[i] - b[i - 1]}")
        u.append(u[-1] + step)
    data = BreakData(p, tuple(u), b)
    assert data.check_known_inequalities()
    return data


@dataclass(frozen=True)
class HerbrandMap:
    """phi and psi for a p-group whose lower filtration drops by p at each b_k.

    |G_0 : G_t| = p^k for b_k < t <= b_(k+1) (with b_0 = 0 below the first
    break), so phi has slope 1/p^k there and slope 1 on [-1, b_1].
    """

    p: int
    lower: tuple[int, ...]
    upper: tuple[int, ...]

    @classmethod
    def from_breaks(cls, data: BreakData) -> HerbrandMap:
        return cls(data.p, data.b, data.u)

    def phi(self, x) -> Fraction:
        x = Fraction(x)
        if x < -1:
            raise ValueError("Herbrand functions are defined on [-1, oo)")
        if x <= self.lower[0]:
            return x
        k = max(j for j in range(len(self.lower)) if self.lower[j] <= x)
        return self.upper[k] + (x - self.lower[k]) / self.p ** (k + 1)

    def psi(self, y) -> Fraction:
        y = Fraction(y)
        if y < -1:
            raise ValueError("Herbrand functions are defined on [-1, oo)")
        if y <= self.upper[0]:
            return y
        k = max(j for j in range(len(self.upper)) if self.upper[j] <= y)
        return self.lower[k] + (y - self.upper[k]) * self.p ** (k + 1)

    @property
    def knots(self) -> list[tuple[int, int]]:
        return list(zip(self.lower, self.upper))


def herbrand_eval(hmap: HerbrandMap, x, direction: str = "phi") -> Fraction:
    if direction == "phi":
        return hmap.phi(x)
    if direction == "psi":
        return hmap.psi(x)
    raise ValueError("direction must be 'phi' or 'psi'")


# --- valuations of d_i ------------------------------------------------------------

@dataclass(frozen=True)
class DValuation:
    """Valuation data for d_i = D_i(alpha_1, ..., alpha_(i-1)) in K_(i-1).

    Each alpha_h has v_K(alpha_h) = -u_h / p, so each monomial of D_i has a
    known valuation. ``monomial_min`` is always a lower bound for v_K(d_i); it
    is the exact value when a single monomial attains it.
    """

    level: int
    monomial_min: Fraction
    degree_bound: Fraction
    unique_min: bool
    minimizers: tuple[tuple[int, ...], ...] = ()

    @property
    def exact(self) -> Fraction | None:
        return self.monomial_min if self.unique_min else None

    @property
    def lower_bound(self) -> Fraction:
        return self.monomial_min


def monomial_valuation(exp: Sequence[int], u: Sequence[int], p: int) -> Fraction:
    return Fraction(-sum(e * uh for e, uh in zip(exp, u)), p)


def d_valuation(tower: GenericTower, i: int, u: Sequence[int]) -> DValuation:
    if i in tower.sigma:
        raise ValueError(f"D_{i} vanishes for split level {i}")
    D: MultiPoly = tower.D(i)
    p = tower.p
    if len(u) < i - 1:
        raise ValueError(f"need u_1..u_{i - 1} to evaluate level {i}")
    vals = {e: monomial_valuation(e, u, p) for e in D.terms}
    vmin = min(vals.values())
    mins = tuple(sorted(e for e, v in vals.items() if v == vmin))
    bound = Fraction(-tower.degrees[i] * u[i - 2], p)
    return DValuation(i, vmin, bound, len(mins) == 1, mins)


# --- realizability checks -----------------------------------------------------------

def validate_upper(u: Sequence[int], p: int) -> tuple[int, ...]:
    u = tuple(int(x) for x in u)
    _check_increasing(u, "upper")
    for k, x in enumerate(u, 1):
        if x % p == 0:
            raise BreakError(f"p divides u_{k} = {x}")
    return u


def m_constant(tower: GenericTower) -> int:
    vals = [tower.p ** (i - 2) * l for i, l in tower.degrees.items()]
    return max(vals) if vals else 1


def _report(tower, u, rows, warnings, extra=None) -> dict:
    data = lower_from_upper(u, tower.p)
    ok = all(r["margin"] > 0 for r in rows)
    out = {
        "pass": ok,
        "per_level": rows,
        "breaks": data.to_json(),
        "M": m_constant(tower),
        "warnings": warnings,
    }
    if ok:
        out["conclusions"] = [
            f"a G-extension with upper breaks {list(u)} and lower breaks {list(data.b)} exists",
            "its ramification subgroups are exactly the members G_(i) of the filtration",
        ]
    out.update(extra or {})
    return out


def check_ramfilt(tower: GenericTower, u: Sequence[int]) -> dict:
    """Test b_i > -p^(i-1) v_K(d_i) for every non-split level covered by ``u``.

    ``u`` may be a prefix (levels 1..len(u)). The monomial minimum is used for
    v_K(d_i): exact when unique, otherwise still a valid lower bound.
    """
    p = tower.p
    u = validate_upper(u, p)
    if len(u) > tower.n:
        raise BreakError(f"{len(u)} breaks given for a tower with {tower.n} levels")
    b = lower_from_upper(u, p).b
    rows, warnings = [], []
    for i in range(2, len(u) + 1):
        if i in tower.sigma:
            continue
        dv = d_valuation(tower, i, u)
        rhs = -(p ** (i - 1)) * dv.lower_bound
        rows.append({
            "i": i,
            "lhs": b[i - 1],
            "rhs": rhs,
            "margin": b[i - 1] - rhs,
            "v_d": dv.lower_bound,
            "exact": dv.unique_min,
        })
        if not dv.unique_min:
            warnings.append(f"level {i}: monomial minimum attained {len(dv.minimizers)} times; "
                            f"used as a lower bound for v_K(d_{i})")
    return _report(tower, u, rows, warnings)


def check_ramfiltcor(tower: GenericTower, u: Sequence[int]) -> dict:
    """Degree-only variant: b_i > p^(i-2) l_i u_(i-1) for every non-split level."""
    p = tower.p
    u = validate_upper(u, p)
    if len(u) > tower.n:
        raise BreakError(f"{len(u)} breaks given for a tower with {tower.n} levels")
    b = lower_from_upper(u, p).b
    rows = []
    for i in range(2, len(u) + 1):
        if i in tower.sigma:
            continue
        rhs = Fraction(p ** i * tower.degrees[i] * u[i - 2], p ** 2)
        rows.append({"i": i, "lhs": b[i - 1], "rhs": rhs, "margin": b[i - 1] - rhs})
    return _report(tower, u, rows, [])


def format_row(row: dict) -> dict:
    return {k: (fmt_rational(v) if isinstance(v, Fraction) else v) for k, v in row.items()}


def random_upper_sequence(rng: random.Random, p: int, n: int, ratio: int, start_max: int = 20) -> list[int]:
    """p-coprime sequence with u_(i+1) = ratio * u_i + (a random offset >= 1)."""
    u = [rng.randrange(1, start_max)]
    if u[0] % p == 0:
        u[0] += 1
    for _ in range(n - 1):
        nxt = ratio * u[-1] + rng.randrange(1, 2 * p + 1)
        if nxt % p == 0:
            nxt += 1
        u.append(nxt)
    return u


@dataclass
class GrowthScan:
    ratio: Fraction
    tried: int = 0
    passed: int = 0
    failures: list[list[int]] = field(default_factory=list)


def scan_growth_ratio(tower: GenericTower, ratios: Sequence, samples: int = 50, seed: int = 0) -> list[GrowthScan]:
    """Experiment on growth ratios below M: how often does check_ramfilt pass
    for u_(i+1) roughly ratio * u_i? Purely exploratory; proves nothing."""
    rng = random.Random(seed)
    p, n = tower.p, tower.n
    out = []
    for r in ratios:
        r = Fraction(r)
        scan = GrowthScan(r)
        for _ in range(samples):
            u = [rng.randrange(1, 4 * p)]
            if u[0] % p == 0:
                u[0] += 1
            for _ in range(n - 1):
                nxt = math.floor(r * u[-1]) + 1
                while nxt % p == 0 or nxt <= u[-1]:
                    nxt += 1
                u.append(nxt)
            scan.tried += 1
            if check_ramfilt(tower, u)["pass"]:
                scan.passed += 1
            elif len(scan.failures) < 5:
                scan.failures.append(u)
        out.append(scan)
    return out
