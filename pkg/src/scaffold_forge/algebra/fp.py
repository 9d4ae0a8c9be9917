"""Prime-field scalars and dense linear algebra over F_p."""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

import numpy as np


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def require_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"modulus {p!r} is not prime")
    return int(p)


@total_ordering
@dataclass(frozen=True)
class FpScalar:
    """An element of F_p stored as its least non-negative residue."""

    value: int
    p: int

    def __post_init__(self):
        require_prime(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpScalar(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpScalar(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpScalar(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpScalar(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.p)

    def inverse(self) -> FpScalar:
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FpScalar(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FpScalar(o, self.p).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FpScalar(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpScalar):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.p
        return NotImplemented

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


class InconsistentSystem(ValueError):
    """Raised by :func:`solve_fp` when the system has no solution.

    ``certificate`` is a vector y with y·A = 0 and y·b != 0.
    """

    def __init__(self, certificate: list[int]):
        super().__init__("linear system over F_p is inconsistent")
        self.certificate = certificate


@dataclass(frozen=True)
class LinearSystemFp:
    p: int
    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]

    @classmethod
    def create(cls, p, matrix, rhs) -> LinearSystemFp:
        p = require_prime(p)
        mat = tuple(tuple(int(x) % p for x in row) for row in matrix)
        b = tuple(int(x) % p for x in rhs)
        if len(mat) != len(b):
            raise ValueError("matrix and right-hand side disagree in length")
        if mat and len({len(r) for r in mat}) != 1:
            raise ValueError("ragged matrix")
        return cls(p, mat, b)

    @property
    def ncols(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def residual(self, x) -> list[int]:
        return [
            (sum(a * int(xi) for a, xi in zip(row, x)) - bi) % self.p
            for row, bi in zip(self.matrix, self.rhs)
        ]


def rref(mat: np.ndarray, p: int, ncols: int | None = None):
    """Row-reduce ``mat`` in place modulo p; returns (mat, pivot columns).

    Only the first ``ncols`` columns are used for pivoting, so an augmented
    right-hand side can ride along.
    """
    rows, cols = mat.shape
    ncols = cols if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(mat[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        inv = pow(int(mat[r, c]), -1, p)
        if inv != 1:
            mat[r] = (mat[r] * inv) % p
        col = mat[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            mat[hit] = (mat[hit] - np.outer(col[hit], mat[r])) % p
        pivots.append(c)
        r += 1
    return mat, pivots


def solve_fp(system: LinearSystemFp) -> list[int]:
    """Solve A x = b over F_p by Gaussian elimination.

    Free variables are set to zero and earlier columns are preferred as
    pivots. Consequently the returned solution is the lexicographically least
    one when coordinates are compared starting from the *last* column; callers
    that want a canonical solution order their unknowns least significant
    first.
    """
    p = system.p
    m, n = len(system.matrix), system.ncols
    if m == 0:
        return [0] * n
    aug = np.zeros((m, n + 1), dtype=np.int64)
    aug[:, :n] = np.asarray(system.matrix, dtype=np.int64).reshape(m, n)
    aug[:, n] = system.rhs
    aug, pivots = rref(aug, p, n)
    rank = len(pivots)
    if rank < m and np.any(aug[rank:, n]):
        raise InconsistentSystem(_certificate(system))
    x = [0] * n
    for r, c in enumerate(pivots):
        x[c] = int(aug[r, n])
    return x


def _certificate(system: LinearSystemFp) -> list[int]:
    # y with A^T y = 0 and b . y = 1
    p = system.p
    m, n = len(system.matrix), system.ncols
    rows = [[system.matrix[r][c] for r in range(m)] for c in range(n)]
    rows.append(list(system.rhs))
    rhs = [0] * n + [1]
    return solve_fp(LinearSystemFp.create(p, rows, rhs))


def nullspace_fp(matrix, p: int) -> list[list[int]]:
    """Basis of the right null space of ``matrix`` over F_p."""
    a = np.asarray(matrix, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    m, n = a.shape
    a, pivots = rref(a.copy(), p)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = int(-a[r, f]) % p
        basis.append(v)
    return basis
