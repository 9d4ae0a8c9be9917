"""Finite p-groups given by Cayley tables, together with a filtration

    G = G_(0) > G_(1) > ... > G_(n) = {1}

by normal subgroups with |G_(i)| = p^(n-i).
"""

from __future__ import annotations

import json
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .algebra.fp import LinearSystemFp, nullspace_fp, require_prime, solve_fp, InconsistentSystem

FRATTINI_BUDGET = 4096
ASSOC_EXHAUSTIVE_LIMIT = 256


class GroupError(ValueError):
    """Invalid group data or filtration."""


class PFilteredGroup:
    """A p-group of order p^n with a chosen filtration by normal subgroups."""

    def __init__(self, p: int, n: int, cayley, series: Sequence[Iterable[int]],
                 names: Sequence[str] | None = None, label: str = "custom"):
        self.p = require_prime(p)
        self.n = int(n)
        table = np.asarray(cayley, dtype=np.int64)
        self.cayley = table
        self.series = tuple(frozenset(int(x) for x in s) for s in series)
        self.label = label
        size = table.shape[0] if table.ndim == 2 else -1
        self.names = tuple(names) if names is not None else tuple(f"g{k}" for k in range(max(size, 0)))
        self._validate()
        self.identity = self._find_identity()
        self.inverse = tuple(int(np.flatnonzero(table[a] == self.identity)[0]) for a in range(self.order))
        self._check_series()

    # validation ---------------------------------------------------------------
    def _validate(self):
        t = self.cayley
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise GroupError("Cayley table must be square")
        N = t.shape[0]
        if N != self.p ** self.n:
            raise GroupError(f"group has {N} elements, expected p^n = {self.p ** self.n}")
        if len(self.names) != N:
            raise GroupError("one name per element is required")
        if t.min() < 0 or t.max() >= N:
            raise GroupError("Cayley table entries out of range")
        ref = np.arange(N)
        for r in range(N):
            if not np.array_equal(np.sort(t[r]), ref) or not np.array_equal(np.sort(t[:, r]), ref):
                raise GroupError(f"Cayley table is not a Latin square (row/column {r})")
        if N <= ASSOC_EXHAUSTIVE_LIMIT:
            lhs = t[t]  # lhs[a, b, c] = (ab)c
            rhs = t[:, t]  # rhs[a, b, c] = a(bc)
            bad = np.argwhere(lhs != rhs)
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, N, size=(3, 20000))
            mask = t[t[a, b], c] != t[a, t[b, c]]
            bad = np.stack([a[mask], b[mask], c[mask]], axis=1)
        if len(bad):
            a, b, c = (int(x) for x in bad[0])
            raise GroupError(f"multiplication is not associative at ({a}, {b}, {c})")

    def _find_identity(self) -> int:
        t = self.cayley
        for e in range(self.order):
            if np.array_equal(t[e], np.arange(self.order)) and np.array_equal(t[:, e], np.arange(self.order)):
                return e
        raise GroupError("Cayley table has no identity element")

    def _check_series(self):
        if len(self.series) != self.n + 1:
            raise GroupError(f"series must have n+1 = {self.n + 1} members, got {len(self.series)}")
        if self.series[0] != frozenset(range(self.order)):
            raise GroupError("series member G_(0) must be the whole group")
        if self.series[-1] != frozenset({self.identity}):
            raise GroupError(f"series member G_({self.n}) must be the trivial subgroup")
        for i, H in enumerate(self.series):
            desc = f"series member G_({i}) = {self._describe(H)}"
            if len(H) != self.p ** (self.n - i):
                raise GroupError(f"{desc} has order {len(H)}, expected {self.p ** (self.n - i)}")
            if i and not H <= self.series[i - 1]:
                raise GroupError(f"{desc} is not contained in G_({i - 1})")
            if not self.is_subgroup(H):
                raise GroupError(f"{desc} is not a subgroup")
            if not self.is_normal(H):
                raise GroupError(f"{desc} is not normal")
        for i in range(1, self.n + 1):
            outside = sorted(self.series[i - 1] - self.series[i])
            g = outside[0]
            if self.power(g, self.p) not in self.series[i]:
                raise GroupError(f"G_({i - 1})/G_({i}) is not cyclic of order p")

    def _describe(self, H) -> str:
        elems = sorted(H)
        shown = ", ".join(self.names[e] for e in elems[:8])
        return "{" + shown + (", ..." if len(elems) > 8 else "") + "}"

    # basic group operations ------------------------------------------------------
    @property
    def order(self) -> int:
        return int(self.cayley.shape[0])

    def mul(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out = self.identity
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def is_subgroup(self, H) -> bool:
        H = frozenset(H)
        if self.identity not in H:
            return False
        idx = np.fromiter(H, dtype=np.int64)
        prods = self.cayley[np.ix_(idx, idx)]
        return bool(np.isin(prods, idx).all())

    def is_normal(self, H) -> bool:
        H = frozenset(H)
        for g in range(self.order):
            gi = self.inv(g)
            for h in H:
                if self.mul(self.mul(g, h), gi) not in H:
                    return False
        return True

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens``."""
        gens = list(gens)
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.mul(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GroupError(f"no element named {name!r}") from None

    @cached_property
    def level_generators(self) -> tuple[int, ...]:
        """g_i = least index element of G_(i-1) outside G_(i), for i = 1..n."""
        return tuple(min(self.series[i - 1] - self.series[i]) for i in range(1, self.n + 1))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "cayley": self.cayley.tolist(),
            "series": [sorted(s) for s in self.series],
            "names": list(self.names),
        }

    def with_series(self, series) -> PFilteredGroup:
        return PFilteredGroup(self.p, self.n, self.cayley, series, self.names, self.label)

    def __repr__(self):
        return f"PFilteredGroup({self.label}, p={self.p}, n={self.n})"


class QuotientGroup(PFilteredGroup):
    """G/G_(i) with cosets ordered by their least element index."""

    def __init__(self, parent: PFilteredGroup, level: int):
        if not 0 <= level <= parent.n:
            raise GroupError(f"level {level} outside 0..{parent.n}")
        N = parent.series[level]
        coset_of = [-1] * parent.order
        reps: list[int] = []
        for g in range(parent.order):
            if coset_of[g] >= 0:
                continue
            k = len(reps)
            reps.append(g)
            for h in N:
                coset_of[parent.mul(g, h)] = k
        table = [[coset_of[parent.mul(a, b)] for b in reps] for a in reps]
        series = [frozenset(coset_of[g] for g in parent.series[j]) for j in range(level + 1)]
        names = [parent.names[r] for r in reps]
        self.parent = parent
        self.level = level
        self.coset_of = tuple(coset_of)
        self.reps = tuple(reps)
        super().__init__(parent.p, level, table, series, names, f"{parent.label}/G_({level})")


def quotient(G: PFilteredGroup, i: int) -> QuotientGroup:
    return QuotientGroup(G, i)


# --- presets -------------------------------------------------------------------

def _pow_name(sym: str, k: int) -> str:
    return "" if k == 0 else (sym if k == 1 else f"{sym}^{k}")


def _join(*parts: str) -> str:
    parts = [x for x in parts if x]
    return "*".join(parts) if parts else "1"


def _cyclic(p, n):
    N = p ** n
    table = [[(a + b) % N for b in range(N)] for a in range(N)]
    series = [[k for k in range(N) if k % p ** i == 0] for i in range(n + 1)]
    names = [_join(_pow_name("sigma", k)) for k in range(N)]
    return table, series, names


def _digits(x, p, n):
    return [(x // p ** j) % p for j in range(n)]


def _elem_abelian(p, n):
    N = p ** n
    table = [[sum(((da + db) % p) * p ** j for j, (da, db) in enumerate(zip(_digits(a, p, n), _digits(b, p, n))))
              for b in range(N)] for a in range(N)]
    # G_(i): first i coordinates vanish
    series = [[x for x in range(N) if x % p ** i == 0] for i in range(n + 1)]
    names = [_join(*(_pow_name(f"e{j + 1}", d) for j, d in enumerate(_digits(x, p, n)))) for x in range(N)]
    return table, series, names


def _dihedral2(p, n):
    if p != 2 or n < 2:
        raise GroupError("dihedral2 needs p = 2 and n >= 2")
    m = 2 ** (n - 1)  # order of the rotation sigma

    def idx(a, b):
        return a % m + m * b

    table = []
    for x in range(2 * m):
        a, b = x % m, x // m
        row = []
        for y in range(2 * m):
            c, d = y % m, y // m
            row.append(idx(a + (c if b == 0 else -c), (b + d) % 2))
        table.append(row)
    series = [list(range(2 * m))]
    if n >= 2:
        series.append([idx(a, b) for a in range(0, m, 2) for b in (0, 1)])
    for k in range(2, n + 1):
        step = 2 ** (k - 1)
        series.append([idx(a, 0) for a in range(0, m, step)])
    names = [_join(_pow_name("sigma", x % m), _pow_name("tau", x // m)) for x in range(2 * m)]
    return table, series, names


def _quaternion(p, n):
    if p != 2 or n < 3:
        raise GroupError("quaternion needs p = 2 and n >= 3")
    m = 2 ** (n - 1)  # order of x; y^2 = x^(m/2)

    def idx(a, b):
        return a % m + m * b

    table = []
    for u in range(2 * m):
        a, b = u % m, u // m
        row = []
        for v in range(2 * m):
            c, d = v % m, v // m
            e = a + (c if b == 0 else -c)
            if b + d == 2:
                row.append(idx(e + m // 2, 0))
            else:
                row.append(idx(e, b + d))
        table.append(row)
    series = [list(range(2 * m))]
    for k in range(1, n + 1):
        step = 2 ** (k - 1)
        series.append([idx(a, 0) for a in range(0, m, step)])
    names = [_join(_pow_name("x", u % m), _pow_name("y", u // m)) for u in range(2 * m)]
    return table, series, names


def _heisenberg(p, n):
    if n != 3:
        raise GroupError("heisenberg preset has n = 3 (order p^3)")

    def idx(a, b, c):
        return a % p + p * (b % p) + p * p * (c % p)

    table = []
    for u in range(p ** 3):
        a, b, c = _digits(u, p, 3)
        row = []
        for v in range(p ** 3):
            a2, b2, c2 = _digits(v, p, 3)
            row.append(idx(a + a2, b + b2, c + c2 + a * b2))
        table.append(row)
    series = [
        list(range(p ** 3)),
        [idx(0, b, c) for b in range(p) for c in range(p)],
        [idx(0, 0, c) for c in range(p)],
        [0],
    ]
    names = [_join(*(_pow_name(s, d) for s, d in zip("xyz", _digits(u, p, 3)))) for u in range(p ** 3)]
    return table, series, names


PRESETS = {
    "cyclic": _cyclic,
    "elem_abelian": _elem_abelian,
    "dihedral2": _dihedral2,
    "quaternion": _quaternion,
    "heisenberg": _heisenberg,
}

PRESET_SERIES_DOC = {
    "cyclic": "C_{p^n} = <sigma>, G_(i) = <sigma^(p^i)>",
    "elem_abelian": "(F_p)^n with basis e1..en, G_(i) = <e_(i+1), ..., e_n>",
    "dihedral2": "order 2^n, sigma of order 2^(n-1), G_(1) = <sigma^2, tau>, G_(k) = <sigma^(2^(k-1))> for k >= 2",
    "quaternion": "order 2^n, <x, y | y^2 = x^(2^(n-2))>, G_(k) = <x^(2^(k-1))> for k >= 1",
    "heisenberg": "unitriangular group of order p^3, G_(1) = <y, z>, G_(2) = <z> (center)",
}


def preset(name: str, p: int, n: int) -> PFilteredGroup:
    if name not in PRESETS:
        raise GroupError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    p = require_prime(p)
    if n < 0:
        raise GroupError("n must be non-negative")
    table, series, names = PRESETS[name](p, n)
    return PFilteredGroup(p, n, table, series, names, label=f"{name}(p={p}, n={n})")


def load_group(data: dict | str | Path) -> PFilteredGroup:
    """Build a group from a JSON-like dict (or a path to a JSON file).

    Accepts either ``{"preset": name, "p": p, "n": n}`` or an inline
    ``{"p", "n", "cayley", "series"}`` description; an optional ``series`` key
    overrides a preset's filtration.
    """
    if isinstance(data, (str, Path)):
        data = json.loads(Path(data).read_text())
    if "preset" in data:
        G = preset(data["preset"], int(data["p"]), int(data["n"]))
        if data.get("series") is not None:
            G = G.with_series(data["series"])
        return G
    try:
        return PFilteredGroup(int(data["p"]), int(data["n"]), data["cayley"], data["series"],
                              data.get("names"), label=data.get("label", "custom"))
    except KeyError as exc:
        raise GroupError(f"group description is missing field {exc.args[0]!r}") from None


# --- Sigma_G, rank, Frattini ----------------------------------------------------------

def is_trivial_coboundary(Q: PFilteredGroup, cocycle: np.ndarray) -> np.ndarray | None:
    """Find f with c(g, h) = f(g) + f(h) - f(gh) (trivial action), or None.

    Only pairs (g, h) with h a level generator are imposed; for a normalized
    cocycle this already forces the identity on all pairs.
    """
    p, N = Q.p, Q.order
    gens = Q.level_generators
    rows, rhs = [], []
    for g in range(N):
        for h in gens:
            row = [0] * N
            row[g] += 1
            row[h] += 1
            row[Q.mul(g, h)] -= 1
            rows.append(row)
            rhs.append(int(cocycle[g, h]))
    row = [0] * N
    row[Q.identity] = 1
    rows.append(row)
    rhs.append(0)
    try:
        f = np.array(solve_fp(LinearSystemFp.create(p, rows, rhs)), dtype=np.int64)
    except InconsistentSystem:
        return None
    full = (f[:, None] + f[None, :] - f[Q.cayley]) % p
    if not np.array_equal(full, np.asarray(cocycle) % p):
        raise AssertionError("coboundary solution does not extend to all pairs")
    return f


def sigma_set(G: PFilteredGroup) -> frozenset[int]:
    """Levels i whose extension G/G_(i) -> G/G_(i-1) splits."""
    from .saltman import central_cocycle

    out = set()
    for i in range(1, G.n + 1):
        if i == 1:
            out.add(1)
            continue
        data = central_cocycle(G, i)
        if is_trivial_coboundary(data.Q, data.cocycle) is not None:
            out.add(i)
    return frozenset(out)


def rank(G: PFilteredGroup, i: int | None = None) -> int:
    """Rank of G/G_(i), read off from Sigma_G."""
    i = G.n if i is None else i
    if not 0 <= i <= G.n:
        raise GroupError(f"level {i} outside 0..{G.n}")
    return sum(1 for j in sigma_set(G) if j <= i)


def hom_basis(G: PFilteredGroup) -> list[np.ndarray]:
    """Basis of Hom(G, F_p), each hom given as its table of values."""
    p, N = G.p, G.order
    gens = list(G.level_generators)
    k = len(gens)
    if k == 0:
        return []
    # express f(x) as a linear form in the unknown values f(gens)
    form: dict[int, np.ndarray] = {G.identity: np.zeros(k, dtype=np.int64)}
    frontier = [G.identity]
    relations = []
    while frontier:
        nxt = []
        for x in frontier:
            for j, s in enumerate(gens):
                y = G.mul(x, s)
                v = form[x].copy()
                v[j] += 1
                v %= p
                if y in form:
                    diff = (v - form[y]) % p
                    if diff.any():
                        relations.append(diff)
                else:
                    form[y] = v
                    nxt.append(y)
        frontier = nxt
    if relations:
        basis = nullspace_fp(np.array(relations), p)
    else:
        basis = [list(r) for r in np.eye(k, dtype=np.int64)]
    forms = np.array([form[x] for x in range(N)])
    return [(forms @ np.array(b, dtype=np.int64)) % p for b in basis]


def frattini(G: PFilteredGroup) -> frozenset[int]:
    """Intersection of all index-p subgroups, i.e. of kernels of G -> F_p."""
    if G.order > FRATTINI_BUDGET:
        raise GroupError(f"Frattini computation limited to |G| <= {FRATTINI_BUDGET}")
    keep = np.ones(G.order, dtype=bool)
    for f in hom_basis(G):
        keep &= f == 0
    return frozenset(int(x) for x in np.flatnonzero(keep))


def frattini_rank(G: PFilteredGroup) -> int:
    """log_p |G / Phi(G)|, the minimal number of generators."""
    phi = len(frattini(G))
    r, q = 0, G.order // phi
    while q > 1:
        q //= G.p
        r += 1
    return r
