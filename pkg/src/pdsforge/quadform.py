"""Canonical nondegenerate quadratic forms on GF(q)^{2m}.

Vectors are tuples (or ``(..., 2m)`` arrays) of field indices; coordinate 1
is position 0. Matrices act on row vectors from the right, ``x -> xM``.
"""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .errors import BadEps, DimensionMismatch, MTooSmall, SingularVector, ZeroVector
from .field import GF, SquareClass


class QuadForm:
    """``x1x2 + ... + x_{2m-1}x_{2m}`` (eps=+1) or the elliptic variant ending
    in ``x_{2m-1}^2 + b x_{2m}^2`` with ``-b`` a nonsquare (eps=-1)."""

    def __init__(self, field: GF, m: int, eps: int):
        if eps not in (1, -1):
            raise BadEps(f"eps must be +1 or -1, got {eps}")
        if m < 2:
            raise MTooSmall(f"m must be >= 2, got {m}")
        self.field = field
        self.m = m
        self.eps = eps
        self.dim = 2 * m
        self.b = field.nonsquare_witness() if eps == -1 else 0

    def _coords(self, x):
        x = np.asarray(x, dtype=np.int64)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected length {self.dim}, got {x.shape[-1]}")
        return x

    def evaluate(self, x):
        """Q(x); ``x`` may be a single vector or an array of vectors."""
        F = self.field
        x = self._coords(x)
        hyperbolic_pairs = self.m if self.eps == 1 else self.m - 1
        acc = np.zeros(x.shape[:-1], dtype=np.int64)
        for i in range(hyperbolic_pairs):
            acc = F.add(acc, F.mul(x[..., 2 * i], x[..., 2 * i + 1]))
        if self.eps == -1:
            u, w = x[..., -2], x[..., -1]
            acc = F.add(acc, F.mul(u, u))
            acc = F.add(acc, F.mul(self.b, F.mul(w, w)))
        return int(acc) if np.ndim(acc) == 0 else acc

    __call__ = evaluate

    def bilinear(self, x, y):
        """beta(x, y) = Q(x + y) - Q(x) - Q(y)."""
        F = self.field
        x, y = self._coords(x), self._coords(y)
        s = F.add(x, y)
        return F.sub(F.sub(self.evaluate(s), self.evaluate(x)), self.evaluate(y))

    def gram(self) -> np.ndarray:
        """Matrix of beta in the standard basis (expanded symmetric form)."""
        n, F = self.dim, self.field
        g = np.zeros((n, n), dtype=np.int64)
        for i in range(0, n, 2):
            if self.eps == -1 and i == n - 2:
                g[i, i] = F.add(1, 1)
                g[i + 1, i + 1] = F.mul(F.add(1, 1), self.b)
            else:
                g[i, i + 1] = g[i + 1, i] = 1
        return g

    def bilinear_expanded(self, x, y) -> int:
        F, g = self.field, self.gram()
        x, y = self._coords(x), self._coords(y)
        acc = 0
        for i in range(self.dim):
            for j in range(self.dim):
                if g[i, j]:
                    acc = F.add(acc, F.mul(g[i, j], F.mul(int(x[i]), int(y[j]))))
        return acc

    def classify_vector(self, x) -> SquareClass:
        return self.field.square_class(self.evaluate(x))

    def basis_vector(self, i: int) -> tuple[int, ...]:
        """``e_i`` with 1-based ``i``."""
        v = [0] * self.dim
        v[i - 1] = 1
        return tuple(v)

    def all_vectors(self) -> np.ndarray:
        """Every vector of V as rows, ordered by base-q index (coordinate 1 fastest)."""
        q = self.field.q
        ids = np.arange(q ** self.dim, dtype=np.int64)
        return np.stack([(ids // q ** i) % q for i in range(self.dim)], axis=1)

    def class_table(self) -> np.ndarray:
        """Square class per vector index: 0 zero, 1 square, -1 nonsquare."""
        return self.field.sq_table[self.evaluate(self.all_vectors())].astype(np.int64)

    def perp_basis(self, v: Sequence[int]) -> list[tuple[int, ...]]:
        """Echelon basis of ``{u : beta(u, v) = 0}`` for nonsingular ``v``."""
        v = tuple(int(c) for c in self._coords(v))
        if not any(v):
            raise ZeroVector("zero vector has no complement")
        if self.evaluate(v) == 0:
            raise SingularVector(f"Q({v}) = 0")
        F = self.field
        # beta(u, v) = sum_i u_i * c_i with c_i = beta(e_i, v)
        c = [self.bilinear(self.basis_vector(i + 1), v) for i in range(self.dim)]
        return nullspace(F, [c])

    def is_isometry(self, M) -> bool:
        """Q(xM) = Q(x) on basis vectors and pairwise sums (exhaustive when small)."""
        M = np.asarray(M, dtype=np.int64)
        if M.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"matrix must be {self.dim}x{self.dim}")
        F = self.field
        if F.q ** self.dim <= 6561:
            xs = self.all_vectors()
        else:
            basis = [self.basis_vector(i + 1) for i in range(self.dim)]
            sums = [tuple(F.add(np.array(a), np.array(b)).tolist())
                    for a, b in itertools.combinations(basis, 2)]
            xs = np.array(basis + sums, dtype=np.int64)
        return bool(np.array_equal(self.evaluate(mat_apply(F, xs, M)), self.evaluate(xs)))

    def is_nondegenerate(self) -> bool:
        """Exhaustive radical check (small spaces only)."""
        xs = self.all_vectors()[1:]
        for i in range(self.dim):
            e = np.array(self.basis_vector(i + 1))
            vals = self.bilinear(xs, np.broadcast_to(e, xs.shape))
            xs = xs[np.asarray(vals) == 0]
        return xs.shape[0] == 0

    def __repr__(self) -> str:
        kind = "hyperbolic" if self.eps == 1 else f"elliptic b={self.b}"
        return f"QuadForm({self.field!r}, m={self.m}, {kind})"


def mat_apply(F: GF, xs: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Row vectors ``xs`` (shape ``(..., n)``) times ``M`` over GF(q)."""
    xs = np.asarray(xs, dtype=np.int64)
    n = M.shape[0]
    out = np.zeros(xs.shape[:-1] + (M.shape[1],), dtype=np.int64)
    for j in range(M.shape[1]):
        col = np.zeros(xs.shape[:-1], dtype=np.int64)
        for i in range(n):
            if M[i, j]:
                col = F.add(col, F.mul(xs[..., i], int(M[i, j])))
        out[..., j] = col
    return out


def mat_mul(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return mat_apply(F, np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64))


def nullspace(F: GF, rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Basis of ``{u : row . u = 0 for every row}`` from reduced row echelon form.

    One basis vector per free column, in increasing column order.
    """
    A = [list(map(int, r)) for r in rows]
    n = len(A[0])
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][col])
        A[r] = [F.mul(inv, a) for a in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col]:
                f = A[i][col]
                A[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == len(A):
            break
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        u = [0] * n
        u[free] = 1
        for row_i, pc in enumerate(pivots):
            u[pc] = F.neg(A[row_i][free])
        basis.append(tuple(u))
    return basis


def mat_inverse(F: GF, M: Sequence[Sequence[int]]) -> np.ndarray:
    """Gauss-Jordan inverse over GF(q); raises ValueError if singular."""
    n = len(M)
    A = [list(map(int, M[i])) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        inv = F.inv(A[col][col])
        A[col] = [F.mul(inv, a) for a in A[col]]
        for i in range(n):
            if i != col and A[i][col]:
                f = A[i][col]
                A[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(A[i], A[col])]
    return np.array([row[n:] for row in A], dtype=np.int64)


def quadform_new(field: GF, m: int, eps: int) -> QuadForm:
    return QuadForm(field, m, eps)
