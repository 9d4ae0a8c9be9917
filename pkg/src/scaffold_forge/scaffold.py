"""Base-field data of a Galois scaffold for a specialized generic tower.

With a_i = a * omega_i^(p^(n-1)) the extension K_n/K has upper breaks
u_i = -v(a) + p^(n-1) m_i (m_i = -v(omega_i)). Everything here lives in K or
K[G]: the cofactors t_ij of the Frobenius-power determinant, the ratios
mu_ij = t_ij / t_jj, the precision of the scaffold, the freeness / Hopf order
certificates and the elements Theta_i built from truncated exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra.laurent import LaurentFrac
from .algebra.prational import fmt_rational
from .pgroup import PFilteredGroup
from .ramification import BreakData, d_valuation, lower_from_upper, validate_upper
from .saltman import GenericTower

INF = math.inf


class HypothesesFailed(ValueError):
    """Some scaffold inequality does not hold; ``report`` lists the margins."""

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


class NotIntegral(ValueError):
    """(b_i + 1) / p^i is not an integer, so no generator display is produced."""

    def __init__(self, level: int, value: Fraction):
        super().__init__(f"M_{level} = {fmt_rational(value)} is not an integer")
        self.level = level
        self.value = value


# --- inputs -------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaffoldInput:
    tower: GenericTower
    a: LaurentFrac
    omegas: tuple[LaurentFrac, ...]

    def __post_init__(self):
        p, n = self.tower.p, self.tower.n
        if len(self.omegas) != n:
            raise ValueError(f"need {n} omegas, got {len(self.omegas)}")
        if self.a.is_zero() or any(w.is_zero() for w in self.omegas):
            raise ValueError("a and the omegas must be non-zero")
        if any(x.p != p for x in (self.a, *self.omegas)):
            raise ValueError("field characteristic does not match the group")
        if self.a.valuation % p == 0:
            raise ValueError(f"p divides v(a) = {self.a.valuation}")
        u = self.u
        if u[0] <= 0 or any(y <= x for x, y in zip(u, u[1:])):
            raise ValueError(f"upper breaks {list(u)} are not positive and strictly increasing")

    @property
    def p(self) -> int:
        return self.tower.p

    @property
    def n(self) -> int:
        return self.tower.n

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(-w.valuation for w in self.omegas)

    @property
    def u(self) -> tuple[int, ...]:
        q = self.p ** (self.n - 1)
        return tuple(-self.a.valuation + q * mi for mi in self.m)

    @property
    def a_values(self) -> tuple[LaurentFrac, ...]:
        q = self.p ** (self.n - 1)
        return tuple(self.a * w ** q for w in self.omegas)

    @property
    def breaks(self) -> BreakData:
        return lower_from_upper(self.u, self.p)

    @classmethod
    def parse(cls, tower: GenericTower, a: str, omegas: Sequence[str]) -> ScaffoldInput:
        p = tower.p
        return cls(tower, LaurentFrac.parse(a, p), tuple(LaurentFrac.parse(w, p) for w in omegas))

    @classmethod
    def from_upper(cls, tower: GenericTower, u: Sequence[int]) -> ScaffoldInput:
        """Monomial realization a = pi^(-u_1), omega_i = pi^(-(u_i - u_1) / p^(n-1))."""
        p, n = tower.p, tower.n
        q = p ** (n - 1)
        if any((x - u[0]) % q for x in u):
            raise ValueError(f"breaks {list(u)} are not congruent modulo p^(n-1) = {q}")
        a = LaurentFrac.pi_power(p, -u[0])
        omegas = tuple(LaurentFrac.pi_power(p, -((x - u[0]) // q)) for x in u)
        return cls(tower, a, omegas)


# --- cofactors and mu ------------------------------------------------------------------

def _det(mat: list[list[LaurentFrac]], p: int) -> LaurentFrac:
    """Determinant by cofactor expansion along the first column (no division)."""
    k = len(mat)
    if k == 0:
        return LaurentFrac.const(p, 1)
    if k == 1:
        return mat[0][0]
    total = LaurentFrac.zero(p)
    for r in range(k):
        if mat[r][0].is_zero():
            continue
        minor = [row[1:] for idx, row in enumerate(mat) if idx != r]
        term = mat[r][0] * _det(minor, p)
        total = total + term if r % 2 == 0 else total - term
    return total


def cofactors(inp: ScaffoldInput, j: int) -> tuple[LaurentFrac, ...]:
    """t_1j, ..., t_jj: signed minors of the Frobenius-power matrix along its
    first column. Row r holds omega_r^(p^(n-j)), ..., omega_r^(p^(n-2))."""
    p, n = inp.p, inp.n
    if not 1 <= j <= n:
        raise ValueError(f"j = {j} outside 1..{n}")
    rows = [[w.frobenius(n - j + c) for c in range(j - 1)] for w in inp.omegas[:j]]
    out = []
    for i in range(1, j + 1):
        minor = [row for idx, row in enumerate(rows, 1) if idx != i]
        t = _det(minor, p)
        if i % 2 == 0:
            t = -t
        if t.is_zero():
            raise ValueError(f"cofactor t_{i}{j} vanishes")
        out.append(t)
    return tuple(out)


def cofactor_table(inp: ScaffoldInput) -> dict[tuple[int, int], LaurentFrac]:
    table = {}
    for j in range(1, inp.n + 1):
        for i, t in enumerate(cofactors(inp, j), 1):
            table[(i, j)] = t
    return table


def cofactor_valuation_formula(m: Sequence[int], p: int, n: int, i: int, j: int) -> int:
    """Closed form for v_K(t_ij): -p^(n-j) * sum of m_r (r <= j, r != i)
    weighted by 1, p, p^2, ... in increasing order of r."""
    others = [m[r - 1] for r in range(1, j + 1) if r != i]
    return -(p ** (n - j)) * sum(p ** k * x for k, x in enumerate(others))


def mu_matrix(inp: ScaffoldInput, table=None) -> dict[tuple[int, int], LaurentFrac]:
    table = table or cofactor_table(inp)
    return {(i, j): table[(i, j)] / table[(j, j)] for (i, j) in table if i < j}


# --- precision -----------------------------------------------------------------------

def _gap_rows(tower: GenericTower, u: Sequence[int], b: Sequence[int]) -> tuple[list[dict], list[str]]:
    p, n = tower.p, tower.n
    q = p ** (n - 1)
    rows, warnings = [], []
    for i in range(2, n + 1):
        if i in tower.sigma:
            continue
        dv = d_valuation(tower, i, u)
        if not dv.unique_min:
            warnings.append(f"level {i}: tied monomial minimum used as a lower bound for v_K(d_{i})")
        w1 = q * dv.lower_bound + p ** (n - i) * b[i - 2] + b[i - 1] - q * u[i - 2]
        w2 = b[i - 1] - q * u[i - 2]
        rows.append({"i": i, "kind": "weak1", "gap": _as_int(w1), "v_d": dv.lower_bound, "exact": dv.unique_min})
        rows.append({"i": i, "kind": "weak2", "gap": _as_int(w2)})
    return rows, warnings


def precision_c(tower: GenericTower, inp: ScaffoldInput | Sequence[int]):
    """Scaffold precision: the least gap in the two families of inequalities.

    Returns an int, or ``math.inf`` when no level imposes a condition. Raises
    :class:`HypothesesFailed` if some gap is not positive.
    """
    u = inp.u if isinstance(inp, ScaffoldInput) else validate_upper(inp, tower.p)
    b = lower_from_upper(u, tower.p).b
    rows, warnings = _gap_rows(tower, u, b)
    if not rows:
        return INF
    value = min(r["gap"] for r in rows)
    if value <= 0:
        bad = [r for r in rows if r["gap"] <= 0]
        raise HypothesesFailed(
            "scaffold inequalities fail at level(s) " + ", ".join(str(r["i"]) for r in bad),
            {"rows": rows, "warnings": warnings, "raw_min": value},
        )
    return _as_int(value)


def precision_rows(tower: GenericTower, u: Sequence[int]) -> tuple[list[dict], list[str]]:
    b = lower_from_upper(u, tower.p).b
    return _gap_rows(tower, u, b)


def precision_cprime(tower: GenericTower, u: Sequence[int]):
    """Degree-only precision; never exceeds :func:`precision_c` when both exist."""
    p, n = tower.p, tower.n
    u = validate_upper(u, p)
    q = p ** (n - 1)
    if any((x - u[0]) % q for x in u):
        raise ValueError(f"breaks must be congruent modulo p^(n-1) = {q}")
    b = lower_from_upper(u, p).b
    rows = []
    for i in range(2, n + 1):
        if i in tower.sigma:
            continue
        gap = (p ** (n - i) * b[i - 2] - Fraction(p ** n * tower.degrees[i] * u[i - 2], p ** 2)
               + b[i - 1] - q * u[i - 2])
        rows.append({"i": i, "gap": _as_int(gap)})
    if not rows:
        return INF
    value = min(r["gap"] for r in rows)
    if value <= 0:
        bad = [r["i"] for r in rows if r["gap"] <= 0]
        raise HypothesesFailed(
            "degree-bound inequalities fail at level(s) " + ", ".join(map(str, bad)),
            {"rows": rows, "raw_min": value},
        )
    return _as_int(value)


def _as_int(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


# --- certificates ------------------------------------------------------------------------

def certify(u1: int, p: int, n: int, c) -> dict:
    """Freeness over the associated order and Hopf order criteria."""
    q = p ** n
    r = u1 % q
    witness = next((m for m in range(1, n + 1) if (p ** m - 1) % r == 0), None) if r else None
    gms = witness is not None and c >= r
    hopf = r == q - 1 and c >= q - 1
    return {"gms_free": bool(gms), "hopf": bool(hopf), "r_u1": r, "m_witness": witness}


# --- group algebra ---------------------------------------------------------------------

class GroupAlgebraElement:
    """Finite K-linear combination of group elements."""

    def __init__(self, group: PFilteredGroup, coeffs: Mapping[int, LaurentFrac]):
        self.group = group
        self.coeffs = {int(g): c for g, c in coeffs.items() if not c.is_zero()}

    @classmethod
    def basis(cls, group: PFilteredGroup, g: int, p: int | None = None) -> GroupAlgebraElement:
        return cls(group, {g: LaurentFrac.const(p or group.p, 1)})

    @classmethod
    def one(cls, group: PFilteredGroup) -> GroupAlgebraElement:
        return cls.basis(group, group.identity)

    def __add__(self, other: GroupAlgebraElement) -> GroupAlgebraElement:
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out[g] + c if g in out else c
        return GroupAlgebraElement(self.group, out)

    def __neg__(self):
        return GroupAlgebraElement(self.group, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, x: LaurentFrac) -> GroupAlgebraElement:
        return GroupAlgebraElement(self.group, {g: c * x for g, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, LaurentFrac):
            return self.scale(other)
        G = self.group
        out: dict[int, LaurentFrac] = {}
        for g, c in self.coeffs.items():
            for h, d in other.coeffs.items():
                k = G.mul(g, h)
                out[k] = out[k] + c * d if k in out else c * d
        return GroupAlgebraElement(G, out)

    def augmentation(self) -> LaurentFrac:
        total = LaurentFrac.zero(self.group.p)
        for c in self.coeffs.values():
            total = total + c
        return total.reduced()

    def support(self) -> frozenset[int]:
        return frozenset(self.coeffs)

    def truncated_exp(self, y: LaurentFrac) -> GroupAlgebraElement:
        """X^[Y] = 1 + Y (X - 1)."""
        one = GroupAlgebraElement.one(self.group)
        return one + (self - one).scale(y)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        zero = LaurentFrac.zero(self.group.p)
        return all(self.coeffs.get(k, zero) == other.coeffs.get(k, zero) for k in keys)

    def to_json(self) -> dict[str, str]:
        return {self.group.names[g]: str(c.reduced()) for g, c in sorted(self.coeffs.items())}

    def __str__(self):
        parts = [f"({c.reduced()})*{self.group.names[g]}" for g, c in sorted(self.coeffs.items())]
        return " + ".join(parts) if parts else "0"


def default_generators(G: PFilteredGroup) -> tuple[int, ...]:
    """g_i = least index element of G_(i-1) \\ G_(i)."""
    return G.level_generators


def resolve_generators(G: PFilteredGroup, generators: Sequence | None) -> tuple[int, ...]:
    if generators is None:
        return default_generators(G)
    out = tuple(G.index_of(g) if isinstance(g, str) else int(g) for g in generators)
    if len(out) != G.n:
        raise ValueError(f"need {G.n} generators, got {len(out)}")
    return out


def theta_ops(inp: ScaffoldInput, mu=None, generators: Sequence | None = None) -> tuple[GroupAlgebraElement, ...]:
    """Theta_n = g_n and Theta_i = g_i * prod_(j > i, ascending) Theta_j^[-mu_ij]."""
    G = inp.tower.group
    mu = mu or mu_matrix(inp)
    gens = resolve_generators(G, generators)
    n = inp.n
    thetas: list[GroupAlgebraElement | None] = [None] * (n + 1)
    for i in range(n, 0, -1):
        t = GroupAlgebraElement.basis(G, gens[i - 1])
        for j in range(i + 1, n + 1):
            t = t * thetas[j].truncated_exp(-mu[(i, j)])
        thetas[i] = t
    return tuple(thetas[1:])


def order_exponents(b: Sequence[int], p: int) -> list[int]:
    """M_i = (b_i + 1) / p^i, or :class:`NotIntegral` at the first failure."""
    M = []
    for i, bi in enumerate(b, 1):
        x = Fraction(bi + 1, p ** i)
        if x.denominator != 1:
            raise NotIntegral(i, x)
        M.append(int(x))
    return M


def associated_order(inp: ScaffoldInput, thetas: Sequence[GroupAlgebraElement]) -> dict:
    """M_i and the elements (Theta_i - 1) / pi^(M_i)."""
    p = inp.p
    M = order_exponents(inp.breaks.b, p)
    gens = []
    for i in range(inp.n, 0, -1):
        th = thetas[i - 1]
        one = GroupAlgebraElement.one(th.group)
        gens.append((i, (th - one).scale(LaurentFrac.pi_power(p, -M[i - 1]))))
    return {"M": M, "generators": gens}


# --- report ---------------------------------------------------------------------------

@dataclass
class ScaffoldReport:
    breaks: BreakData
    t: dict
    mu: dict
    precision_c: object
    precision_cprime: object
    generators: tuple[int, ...]
    thetas: tuple[GroupAlgebraElement, ...]
    M: list[int] | None
    not_integral_level: int | None
    gms_free: bool
    hopf: bool
    certificate: dict
    warnings: list[str] = field(default_factory=list)
    gap_rows: list[dict] = field(default_factory=list)
    cprime_rows: list[dict] = field(default_factory=list)
    failure: str | None = None


def build_report(inp: ScaffoldInput, generators: Sequence | None = None) -> ScaffoldReport:
    tower = inp.tower
    G = tower.group
    table = cofactor_table(inp)
    mu = mu_matrix(inp, table)
    rows, warnings = precision_rows(tower, inp.u)
    failure = None
    try:
        c = precision_c(tower, inp)
    except HypothesesFailed as exc:
        c, failure = None, str(exc)
    try:
        cp = precision_cprime(tower, inp.u)
        cp_rows = []
    except HypothesesFailed as exc:
        cp = None
        cp_rows = exc.report["rows"]
        warnings.append(f"degree-bound precision unavailable: {exc}")
    gens = resolve_generators(G, generators)
    thetas = theta_ops(inp, mu, gens)
    try:
        ao = associated_order(inp, thetas)
        M, bad = ao["M"], None
    except NotIntegral as exc:
        M, bad = None, exc.level
    cert = certify(inp.u[0], inp.p, inp.n, c) if c is not None else {
        "gms_free": False, "hopf": False, "r_u1": inp.u[0] % inp.p ** inp.n, "m_witness": None}
    return ScaffoldReport(
        breaks=inp.breaks, t=table, mu=mu, precision_c=c, precision_cprime=cp, generators=gens,
        thetas=thetas, M=M, not_integral_level=bad, gms_free=cert["gms_free"], hopf=cert["hopf"],
        certificate=cert, warnings=warnings, gap_rows=rows, cprime_rows=cp_rows, failure=failure,
    )


# --- break search -----------------------------------------------------------------------

def _level_gaps(tower: GenericTower, u: Sequence[int], i: int) -> list:
    p, n = tower.p, tower.n
    q = p ** (n - 1)
    b = lower_from_upper(u, p).b
    dv = d_valuation(tower, i, u)
    return [
        q * dv.lower_bound + p ** (n - i) * b[i - 2] + b[i - 1] - q * u[i - 2],
        b[i - 1] - q * u[i - 2],
    ]


def search_breaks(tower: GenericTower, mode: str = "scaffold", c_min: int = 1, u1: int | None = None,
                  max_steps: int = 100000) -> tuple[int, ...]:
    """Greedy least upper-break sequence meeting the scaffold gaps.

    ``scaffold`` mode starts at the least p-coprime u_1 (or ``u1``);
    ``hopf`` mode starts at p^n - 1 and requires gaps >= p^n - 1.
    """
    p, n = tower.p, tower.n
    q = p ** (n - 1)
    if mode == "hopf":
        c_min = max(c_min, p ** n - 1)
        start = p ** n - 1 if u1 is None else u1
        if (start + 1) % p ** n:
            raise ValueError("hopf mode needs u_1 = -1 mod p^n")
    elif mode == "scaffold":
        start = 1 if u1 is None else u1
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    if c_min < 1:
        raise ValueError("c_min must be at least 1")
    if start <= 0 or start % p == 0:
        raise ValueError(f"u_1 = {start} must be positive and prime to p")
    u = [start]
    for i in range(2, n + 1):
        cand = u[-1] + q
        for _ in range(max_steps):
            trial = u + [cand]
            if i in tower.sigma or min(_level_gaps(tower, trial, i)) >= c_min:
                break
            cand += q
        else:
            raise RuntimeError(f"no u_{i} found within {max_steps} steps")
        u.append(cand)
    return tuple(u)
