"""Generic Galois towers S_n / R_n for a p-filtered group, level by level.

At level i we have Q = G/G_(i-1) acting on S_{i-1} = F_p[Y_1..Y_{i-1}] and the
central extension E = G/G_(i) -> Q with kernel of order p. A section
u: Q -> E gives an F_p-valued 2-cocycle c. We find a cochain s over S_{i-1}
with c = delta(s), then D_i with (g - 1) D_i = wp(s_g), and let E act on
S_i = S_{i-1}[Y_i] through (g - 1) Y_i = s_gbar + chi(k) where g = u(gbar) k.

All unknowns are found by bounded-degree monomial ansatz plus linear algebra
over F_p. Unknowns are ordered least significant first (total degree, then
later variables, then lower coset index), so the solver returns the
lexicographically least solution with respect to that significance order; in
particular the result does not depend on the degree bound once it is large
enough.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra.fp import InconsistentSystem, LinearSystemFp, solve_fp
from .algebra.poly import MultiPoly, monomial_key, monomials_up_to
from .pgroup import GroupError, PFilteredGroup, QuotientGroup, is_trivial_coboundary, quotient

DEFAULT_DEGREE_CEILING = 64
MAX_MATRIX_CELLS = 30_000_000  # dense int64 systems beyond this would need gigabytes


class BoundTooSmall(RuntimeError):
    """No solution with the attempted degree bound (not a proof of non-existence)."""

    def __init__(self, what: str, bound: int):
        super().__init__(f"no {what} of total degree <= {bound}")
        self.what = what
        self.bound = bound


class SystemTooLarge(RuntimeError):
    """The dense linear system for a degree bound exceeds MAX_MATRIX_CELLS."""


def degree_ceiling() -> int:
    raw = os.environ.get("SCAFFOLD_FORGE_DEGREE_CEILING")
    return int(raw) if raw else DEFAULT_DEGREE_CEILING


# --- group actions on polynomial rings -------------------------------------------

class PolyAction:
    """A finite group Q acting on F_p[Y_1..Y_k] by ring automorphisms.

    ``images[q]`` lists q(Y_1), ..., q(Y_k).
    """

    def __init__(self, Q: PFilteredGroup, images: Sequence[Sequence[MultiPoly]], nvars: int):
        self.Q = Q
        self.p = Q.p
        self.nvars = nvars
        self.images = tuple(tuple(im.extend(nvars) for im in imgs) for imgs in images)
        self._mono_cache: dict[tuple[int, tuple], MultiPoly] = {}

    def apply_monomial(self, q: int, exp: tuple) -> MultiPoly:
        key = (q, exp)
        if key not in self._mono_cache:
            self._mono_cache[key] = MultiPoly.monomial(self.p, exp).substitute(self.images[q], self.nvars)
        return self._mono_cache[key]

    def apply(self, q: int, f: MultiPoly) -> MultiPoly:
        f = f.extend(self.nvars)
        out = MultiPoly.zero(self.p, self.nvars)
        for e, c in f.terms.items():
            out = out + self.apply_monomial(q, e) * c
        return out

    @property
    def generators(self) -> tuple[int, ...]:
        return self.Q.level_generators

    def is_homomorphism(self) -> bool:
        """(gh)(Y_j) == g(h(Y_j)) for all g, h and j."""
        Q = self.Q
        for g in range(Q.order):
            for h in range(Q.order):
                gh = Q.mul(g, h)
                for j in range(self.nvars):
                    if self.apply(g, self.images[h][j]) != self.images[gh][j]:
                        return False
        return True


# --- level data ------------------------------------------------------------------

@dataclass(frozen=True)
class CocycleData:
    Q: QuotientGroup  # G/G_(i-1)
    E: QuotientGroup  # G/G_(i)
    proj: tuple[int, ...]  # E index -> Q index
    section: tuple[int, ...]  # Q index -> E index
    kernel_gen: int
    chi: Mapping[int, int]  # kernel element (E index) -> F_p
    cocycle: np.ndarray  # |Q| x |Q| over F_p


@dataclass
class LevelData:
    level: int
    cocycle_data: CocycleData
    cochain: tuple[MultiPoly, ...]  # indexed by Q
    d: MultiPoly  # D_i in Y_1..Y_{i-1}
    parent_action: PolyAction  # Q on S_{i-1}
    action: PolyAction  # E on S_i
    cochain_bound: int = 0
    d_bound: int = 0

    @property
    def section(self):
        return self.cocycle_data.section

    @property
    def cocycle(self):
        return self.cocycle_data.cocycle

    @property
    def chi(self):
        return self.cocycle_data.chi

    def action_shift(self, e: int) -> MultiPoly:
        """(e - 1) Y_i for e in G/G_(i)."""
        i = self.level
        return self.action.images[e][i - 1] - MultiPoly.var(self.action.p, i, i)


@dataclass
class GenericTower:
    group: PFilteredGroup
    levels: list[LevelData]
    sigma: frozenset[int]
    degrees: dict[int, int] = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def n(self) -> int:
        return self.group.n

    def level(self, i: int) -> LevelData:
        return self.levels[i - 1]

    def D(self, i: int) -> MultiPoly:
        return self.levels[i - 1].d

    def to_json(self) -> dict:
        return tower_to_json(self)


def _projection(E: QuotientGroup, Q: QuotientGroup) -> tuple[int, ...]:
    return tuple(Q.coset_of[r] for r in E.reps)


def _resolve_section(section, G, Q, E, proj) -> tuple[int, ...]:
    if section is None:
        # least index preimage, except the identity maps to the identity
        out = [-1] * Q.order
        for e in range(E.order):
            q = proj[e]
            if out[q] < 0:
                out[q] = e
        out[Q.identity] = E.identity
        return tuple(out)
    if isinstance(section, Mapping):
        out = [-1] * Q.order
        for q, e in section.items():
            out[int(q)] = int(e)
    else:
        # image of the section, given by elements of G
        out = [-1] * Q.order
        for g in section:
            e = E.coset_of[int(g)]
            q = proj[e]
            if out[q] >= 0 and out[q] != e:
                raise GroupError(f"two section values given over the coset of {Q.names[q]}")
            out[q] = e
    if any(x < 0 for x in out):
        raise GroupError("explicit section map is not a section: some coset has no value")
    for q, e in enumerate(out):
        if proj[e] != q:
            raise GroupError(f"explicit section map is not a section at {Q.names[q]}")
    if out[Q.identity] != E.identity:
        raise GroupError("explicit section map must send 1 to 1")
    return tuple(out)


def central_cocycle(G: PFilteredGroup, i: int, section=None) -> CocycleData:
    """The 2-cocycle c(g, h) = chi(u(g) u(h) u(gh)^-1) of G/G_(i) -> G/G_(i-1).

    ``section`` may be None (least-index rule), a mapping from Q indices to E
    indices, or an iterable of elements of G forming the image of the section.
    """
    if not 1 <= i <= G.n:
        raise GroupError(f"level {i} outside 1..{G.n}")
    Q, E = quotient(G, i - 1), quotient(G, i)
    proj = _projection(E, Q)
    u = _resolve_section(section, G, Q, E, proj)
    kernel_gen = E.coset_of[G.level_generators[i - 1]]
    chi = {}
    x = E.identity
    for k in range(G.p):
        chi[x] = k
        x = E.mul(x, kernel_gen)
    c = np.zeros((Q.order, Q.order), dtype=np.int64)
    for g in range(Q.order):
        for h in range(Q.order):
            z = E.mul(E.mul(u[g], u[h]), E.inv(u[Q.mul(g, h)]))
            c[g, h] = chi[z]
    return CocycleData(Q, E, proj, u, kernel_gen, chi, c)


# --- linear solves ---------------------------------------------------------------

def _solve(p: int, rows: dict, ncols: int, rhs: dict):
    keys = list(rows.keys() | rhs.keys())
    if len(keys) * ncols > MAX_MATRIX_CELLS:
        raise SystemTooLarge(f"linear system with {len(keys)} equations and {ncols} unknowns is too large")
    mat = np.zeros((len(keys), ncols), dtype=np.int64)
    b = np.zeros(len(keys), dtype=np.int64)
    for r, key in enumerate(keys):
        for col, v in rows.get(key, {}).items():
            mat[r, col] = v % p
        b[r] = rhs.get(key, 0) % p
    return solve_fp(LinearSystemFp(p, tuple(map(tuple, mat.tolist())), tuple(b.tolist())))


def _accumulate(rows, key_prefix, poly: MultiPoly, col: int, sign: int):
    for e, c in poly.terms.items():
        row = rows.setdefault(key_prefix + (e,), {})
        row[col] = row.get(col, 0) + sign * c


def trivialize_cochain(cocycle: np.ndarray, action: PolyAction, degree_bound: int) -> tuple[MultiPoly, ...]:
    """Cochain s over S_{i-1} with c(g, h) = s_g + g(s_h) - s_gh and s_1 = 0."""
    Q, p, k = action.Q, action.p, action.nvars
    monos = monomials_up_to(k, degree_bound)
    others = [q for q in range(Q.order) if q != Q.identity]
    cols = sorted(((m, q) for q in others for m in monos), key=lambda t: (monomial_key(t[0]), -t[1]))
    col_of = {t: j for j, t in enumerate(cols)}
    const = (0,) * k
    rows: dict = {}
    rhs: dict = {}
    for g in range(Q.order):
        for h in action.generators:
            gh = Q.mul(g, h)
            pre = (g, h)
            for m in monos:
                mono = MultiPoly.monomial(p, m)
                if g != Q.identity:
                    _accumulate(rows, pre, mono, col_of[(m, g)], 1)
                if h != Q.identity:
                    _accumulate(rows, pre, action.apply_monomial(g, m), col_of[(m, h)], 1)
                if gh != Q.identity:
                    _accumulate(rows, pre, mono, col_of[(m, gh)], -1)
            if cocycle[g, h] % p:
                rhs[pre + (const,)] = int(cocycle[g, h])
    try:
        x = _solve(p, rows, len(cols), rhs)
    except InconsistentSystem:
        raise BoundTooSmall("trivializing cochain", degree_bound) from None
    terms: dict[int, dict] = {q: {} for q in range(Q.order)}
    for (m, q), v in zip(cols, x):
        if v:
            terms[q][m] = v
    return tuple(MultiPoly(p, k, terms[q]) for q in range(Q.order))


def cochain_defect(cocycle, action: PolyAction, s: Sequence[MultiPoly]) -> list[tuple[int, int]]:
    """Pairs (g, h) where c(g, h) != s_g + g(s_h) - s_gh."""
    Q, p, k = action.Q, action.p, action.nvars
    bad = []
    for g in range(Q.order):
        for h in range(Q.order):
            lhs = s[g] + action.apply(g, s[h]) - s[Q.mul(g, h)]
            if lhs != MultiPoly.const(p, k, int(cocycle[g, h])):
                bad.append((g, h))
    return bad


def is_one_cocycle(f: Sequence[MultiPoly], action: PolyAction) -> bool:
    """f(gh) == f(g) + g f(h) for all g, h."""
    Q = action.Q
    return all(
        f[Q.mul(g, h)] == f[g] + action.apply(g, f[h]) for g in range(Q.order) for h in range(Q.order)
    )


def solve_d(s: Sequence[MultiPoly], action: PolyAction, degree_bound: int) -> MultiPoly:
    """d over S_{i-1} with (g - 1) d = wp(s_g) for all g (constant term 0)."""
    Q, p, k = action.Q, action.p, action.nvars
    targets = [x.extend(k).wp() for x in s]
    if not is_one_cocycle(targets, action):
        raise ValueError("wp(s) is not a 1-cocycle; the cochain is not a trivialization")
    monos = [m for m in monomials_up_to(k, degree_bound) if sum(m)]
    rows: dict = {}
    rhs: dict = {}
    for g in action.generators:
        for j, m in enumerate(monos):
            _accumulate(rows, (g,), action.apply_monomial(g, m), j, 1)
            _accumulate(rows, (g,), MultiPoly.monomial(p, m), j, -1)
        for e, c in targets[g].terms.items():
            rhs[(g, e)] = c
    try:
        x = _solve(p, rows, len(monos), rhs)
    except InconsistentSystem:
        raise BoundTooSmall("polynomial D", degree_bound) from None
    d = MultiPoly(p, k, {m: v for m, v in zip(monos, x) if v})
    for g in range(Q.order):
        if action.apply(g, d) - d != targets[g]:
            raise AssertionError("solution of the generator equations fails for a group element")
    return d


def _escalate(fn, start: int, ceiling: int):
    bound = max(1, start)
    while True:
        try:
            return fn(bound), bound
        except BoundTooSmall as exc:
            if bound >= ceiling:
                raise BoundTooSmall(exc.what, bound) from None
            bound = min(2 * bound, ceiling)


def _degree(f: MultiPoly) -> int:
    d = f.total_degree()
    return 0 if d == -np.inf else int(d)


def build_level(G: PFilteredGroup, i: int, parent_action: PolyAction, prev_cochain_degree: int = 0,
                section=None, ceiling: int | None = None, d_override: MultiPoly | None = None) -> LevelData:
    """Solve level i. With ``d_override`` the given D_i replaces the solved one.

    An override must be congruent to the solved D_i modulo wp(S_{i-1}) + R_{i-1};
    the witness d_override = d + wp(e) + r is then used to replace s_g by
    s_g + (g - 1) e, which keeps every level identity intact.
    """
    ceiling = degree_ceiling() if ceiling is None else ceiling
    p = G.p
    data = central_cocycle(G, i, section)
    start = max(1, p * prev_cochain_degree)
    s, sb = _escalate(lambda B: trivialize_cochain(data.cocycle, parent_action, B), start, ceiling)
    sdeg = max((_degree(x) for x in s), default=0)
    d, db = _escalate(lambda B: solve_d(s, parent_action, B), max(1, p * sdeg), ceiling)
    if d_override is not None:
        d_override = d_override.extend(i - 1)
        eq = equivalent_d(d_override, d, parent_action)
        if not eq:
            raise ValueError(f"replacement for D_{i} is not equivalent to the solved one ({eq.reason})")
        s = tuple(x + parent_action.apply(q, eq.e) - eq.e for q, x in enumerate(s))
        d = d_override
        for q in range(parent_action.Q.order):
            if parent_action.apply(q, d) - d != s[q].wp():
                raise AssertionError("adjusted cochain does not match the replacement D")
    E = data.E
    images = []
    Yi = MultiPoly.var(p, i, i)
    for e in range(E.order):
        q = data.proj[e]
        k = E.mul(E.inv(data.section[q]), e)
        shift = s[q].extend(i) + data.chi[k]
        images.append(tuple(parent_action.images[q]) + (Yi + shift,))
    action = PolyAction(E, images, i)
    return LevelData(i, data, s, d, parent_action, action, sb, db)


def trivial_action(G: PFilteredGroup) -> PolyAction:
    Q = quotient(G, 0)
    return PolyAction(Q, [()], 0)


def build_generic(G: PFilteredGroup, up_to: int | None = None, ceiling: int | None = None,
                  d_overrides: Mapping[int, MultiPoly | str] | None = None) -> GenericTower:
    """Build levels 1..up_to (default n) of the generic tower.

    ``d_overrides`` maps levels to preferred representatives of D_i (see
    :func:`build_level`); strings are parsed in Y1.. and X1.. where
    X_j = Y_j^p - Y_j - D_j refers to the tower built so far.
    """
    up_to = G.n if up_to is None else up_to
    d_overrides = dict(d_overrides or {})
    levels: list[LevelData] = []
    action = trivial_action(G)
    prev_deg = 0
    sigma = set()
    degrees = {}
    for i in range(1, up_to + 1):
        override = d_overrides.get(i)
        if isinstance(override, str):
            override = parse_tower_poly(override, G.p, levels, i - 1)
        lev = build_level(G, i, action, prev_deg, ceiling=ceiling, d_override=override)
        levels.append(lev)
        split = i == 1 or is_trivial_coboundary(lev.cocycle_data.Q, lev.cocycle) is not None
        if split:
            sigma.add(i)
            if not lev.d.is_zero():
                raise AssertionError(f"D_{i} should vanish at a split level")
        else:
            if lev.d.is_constant():
                raise AssertionError(f"D_{i} should be non-constant at a non-split level")
            degrees[i] = _degree(lev.d)
        prev_deg = max((_degree(x) for x in lev.cochain), default=0)
        action = lev.action
    return GenericTower(G, levels, frozenset(sigma), degrees)


def x_symbols(levels: Sequence[LevelData], nvars: int) -> dict[str, MultiPoly]:
    """X_j = Y_j^p - Y_j - D_j for the levels built so far, as polynomials in Y."""
    out = {}
    for lev in levels:
        j = lev.level
        if j > nvars:
            break
        Y = MultiPoly.var(lev.action.p, nvars, j)
        out[f"X{j}"] = Y.wp() - lev.d.extend(nvars)
    return out


def parse_tower_poly(text: str, p: int, levels: Sequence[LevelData], nvars: int) -> MultiPoly:
    return MultiPoly.parse(text, p, nvars, x_symbols(levels, nvars))


# --- equivalence of D's -------------------------------------------------------------

@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    bound: int
    e: MultiPoly | None = None
    r: MultiPoly | None = None
    reason: str = ""

    def __bool__(self):
        return self.equivalent


def equivalent_d(d1: MultiPoly, d2: MultiPoly, action: PolyAction, degree_bound: int | None = None) -> Equivalence:
    """Decide d1 - d2 = wp(e) + r with r fixed by the group, deg e <= bound.

    A negative answer only means no witness exists within the bound.
    """
    p, k = action.p, action.nvars
    delta = d1.extend(k) - d2.extend(k)
    if delta.is_zero():
        return Equivalence(True, 0, MultiPoly.zero(p, k), MultiPoly.zero(p, k))
    B = degree_bound if degree_bound is not None else max(1, _degree(delta))
    R = max(p * B, _degree(delta))
    # r columns first (less significant): the witness uses e only when needed
    r_monos = monomials_up_to(k, R)
    e_monos = [m for m in monomials_up_to(k, B) if sum(m)]
    nr = len(r_monos)
    rows: dict = {}
    rhs: dict = {}
    for j, m in enumerate(r_monos):
        mono = MultiPoly.monomial(p, m)
        _accumulate(rows, ("eq",), mono, j, 1)
        for g in action.generators:
            _accumulate(rows, ("fix", g), action.apply_monomial(g, m), j, 1)
            _accumulate(rows, ("fix", g), mono, j, -1)
    for j, m in enumerate(e_monos):
        _accumulate(rows, ("eq",), MultiPoly.monomial(p, m).wp(), nr + j, 1)
    for e, c in delta.terms.items():
        rhs[("eq", e)] = c
    try:
        x = _solve(p, rows, nr + len(e_monos), rhs)
    except InconsistentSystem:
        return Equivalence(False, B, reason=f"no witness with deg e <= {B}, deg r <= {R}")
    r = MultiPoly(p, k, {m: v for m, v in zip(r_monos, x[:nr]) if v})
    e = MultiPoly(p, k, {m: v for m, v in zip(e_monos, x[nr:]) if v})
    if d1.extend(k) - d2.extend(k) != e.wp() + r:
        raise AssertionError("equivalence witness does not check out")
    return Equivalence(True, B, e, r)


# --- verification -------------------------------------------------------------------

def verify_level(G, i: int, section, s, d: MultiPoly) -> dict[str, bool]:
    """Check the defining identities of level i for user-supplied data.

    ``G`` is a group or an already built tower (which supplies the action of
    G/G_(i-1) on S_{i-1}); ``s`` maps cosets of G_(i-1) to polynomials, either
    as a sequence indexed by coset or as a mapping {coset index: poly}.
    """
    if isinstance(G, GenericTower):
        tower, G = G, G.group
        parent_action = tower.level(i - 1).action if i > 1 else trivial_action(G)
    else:
        parent_action = build_generic(G, up_to=i - 1).level(i - 1).action if i > 1 else trivial_action(G)
    data = central_cocycle(G, i, section)
    Q, E, p, k = data.Q, data.E, G.p, i - 1
    if isinstance(s, Mapping):
        s = [s.get(q, MultiPoly.zero(p, k)) for q in range(Q.order)]
    s = [x.extend(k) for x in s]
    c = data.cocycle
    cocycle_ok = all(
        (c[g, h] + c[Q.mul(g, h), l] - c[h, l] - c[g, Q.mul(h, l)]) % p == 0
        for g in range(Q.order) for h in range(Q.order) for l in range(Q.order)
    ) and all(c[Q.identity, g] == 0 and c[g, Q.identity] == 0 for g in range(Q.order))
    triv_ok = not cochain_defect(c, parent_action, s)
    wp_ok = all(parent_action.apply(g, d.extend(k)) - d.extend(k) == s[g].wp() for g in range(Q.order))
    Yi = MultiPoly.var(p, i, i)
    images = []
    for e in range(E.order):
        q = data.proj[e]
        kk = E.mul(E.inv(data.section[q]), e)
        images.append(tuple(parent_action.images[q]) + (Yi + s[q].extend(i) + data.chi[kk],))
    hom_ok = PolyAction(E, images, i).is_homomorphism()
    return {"cocycle": bool(cocycle_ok), "trivialization": triv_ok, "wp": wp_ok, "homomorphism": hom_ok}


# --- export -------------------------------------------------------------------------

def tower_to_json(tower: GenericTower) -> dict:
    levels = []
    for lev in tower.levels:
        Q, E = lev.cocycle_data.Q, lev.cocycle_data.E
        levels.append({
            "level": lev.level,
            "section": {Q.names[q]: E.names[e] for q, e in enumerate(lev.section)},
            "cocycle": lev.cocycle.tolist(),
            "cochain": {Q.names[q]: str(x) for q, x in enumerate(lev.cochain)},
            "D": str(lev.d),
            "D_terms": lev.d.to_json(),
            "action_shift": {E.names[e]: str(lev.action_shift(e)) for e in range(E.order)},
        })
    return {
        "group": tower.group.label,
        "p": tower.p,
        "n": tower.n,
        "sigma": sorted(tower.sigma),
        "degrees": {str(i): l for i, l in sorted(tower.degrees.items())},
        "levels": levels,
    }
