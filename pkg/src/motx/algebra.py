"""Finite-dimensional associative F_l-algebras and the ad operator."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import linalg
from .errors import MalformedInput, NonAssociative


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """Structure constants: e_i e_j = sum_k table[i, j, k] e_k."""

    l: int
    table: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.table, dtype=np.int64) % self.l
        d = T.shape[0]
        if T.shape != (d, d, d):
            raise MalformedInput("multiplication table must be d x d x d")
        object.__setattr__(self, "table", T)
        # (e_i e_j) e_k vs e_i (e_j e_k)
        lhs = np.einsum("ijm,mkn->ijkn", T, T) % self.l
        rhs = np.einsum("jkm,imn->ijkn", T, T) % self.l
        if not np.array_equal(lhs, rhs):
            raise NonAssociative("multiplication table is not associative")

    @property
    def dim(self) -> int:
        return self.table.shape[0]

    def mul(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.table) % self.l

    def power(self, x, k: int) -> np.ndarray:
        if k < 1:
            raise MalformedInput("powers start at 1 (the algebra need not be unital)")
        p = np.asarray(x) % self.l
        for _ in range(k - 1):
            p = self.mul(p, x)
        return p

    def left(self, x) -> np.ndarray:
        """Matrix of b -> x b (columns indexed by basis b)."""
        return np.einsum("i,ibk->kb", np.asarray(x), self.table) % self.l

    def right(self, x) -> np.ndarray:
        return np.einsum("i,bik->kb", np.asarray(x), self.table) % self.l

    def ad(self, x) -> np.ndarray:
        return (self.left(x) - self.right(x)) % self.l

    @classmethod
    def from_matrices(cls, mats, l: int) -> "FiniteAlgebra":
        """Algebra spanned by ``mats`` (closed under products, linearly independent)."""
        mats = [np.asarray(m, dtype=np.int64) % l for m in mats]
        B = np.array([m.ravel() for m in mats]).T
        if linalg.rank(B, l) != len(mats):
            raise MalformedInput("basis matrices are linearly dependent")
        d = len(mats)
        T = np.zeros((d, d, d), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                coords = _solve(B, (mats[i] @ mats[j]).ravel() % l, l)
                if coords is None:
                    raise MalformedInput("span of matrices is not closed under products")
                T[i, j] = coords
        return cls(l, T)

    def change_basis(self, P) -> "FiniteAlgebra":
        """Same algebra in the basis f_a = sum_i P[i, a] e_i."""
        P = np.asarray(P, dtype=np.int64) % self.l
        Q = linalg.inverse(P, self.l)
        T = np.einsum("ia,jb,ijk,ck->abc", P, P, self.table, Q) % self.l
        return FiniteAlgebra(self.l, T)


def _solve(B: np.ndarray, v: np.ndarray, l: int):
    aug = np.hstack([B, v.reshape(-1, 1)])
    r, piv = linalg.row_echelon(aug, l)
    if B.shape[1] in piv:
        return None
    x = np.zeros(B.shape[1], dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = r[row, -1]
    return x


def ad_power_terms(A: FiniteAlgebra, x, i: int) -> np.ndarray:
    """Matrix of b -> sum_{j=1}^{i} C(i,j) ad^j(x)(b) x^{i-j} (x^0 read as omitted)."""
    l = A.l
    ad = A.ad(x)
    total = np.zeros((A.dim, A.dim), dtype=np.int64)
    adj = np.eye(A.dim, dtype=np.int64)
    for j in range(1, i + 1):
        adj = linalg.matmul(ad, adj, l)
        c = comb(i, j) % l
        if not c:
            continue
        term = adj if j == i else linalg.matmul(A.right(A.power(x, i - j)), adj, l)
        total = (total + c * term) % l
    return total


def ad_power_check(A: FiniteAlgebra, x, i: int) -> bool:
    """ad(x^i)(b) == sum_j C(i,j) ad^j(x)(b) x^{i-j} for every basis element b."""
    return np.array_equal(A.ad(A.power(x, i)), ad_power_terms(A, x, i))


def ad_nilpotency_index(A: FiniteAlgebra, x) -> int | None:
    """Smallest k with ad(x)^k = 0, or None when ad(x) is not nilpotent."""
    ad = A.ad(x)
    P = np.eye(A.dim, dtype=np.int64)
    for k in range(1, A.dim + 2):
        P = linalg.matmul(P, ad, A.l)
        if not P.any():
            return k
    return None


# ----------------------------------------------------------------------------
# families used for testing and examples


def _matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n), dtype=np.int64)
    E[i, j] = 1
    return E


def upper_triangular(l: int, n: int) -> FiniteAlgebra:
    return FiniteAlgebra.from_matrices([_matrix_unit(n, i, j) for i in range(n) for j in range(i, n)], l)


def matrix_algebra(l: int, n: int) -> FiniteAlgebra:
    return FiniteAlgebra.from_matrices([_matrix_unit(n, i, j) for i in range(n) for j in range(n)], l)


def truncated_polynomial(l: int, k: int) -> FiniteAlgebra:
    """F_l[x]/(x^k), basis 1, x, ..., x^{k-1}."""
    T = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            if i + j < k:
                T[i, j, i + j] = 1
    return FiniteAlgebra(l, T)


def cyclic_group_algebra(l: int, k: int) -> FiniteAlgebra:
    T = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            T[i, j, (i + j) % k] = 1
    return FiniteAlgebra(l, T)


def product(A: FiniteAlgebra, B: FiniteAlgebra) -> FiniteAlgebra:
    d = A.dim + B.dim
    T = np.zeros((d, d, d), dtype=np.int64)
    T[: A.dim, : A.dim, : A.dim] = A.table
    T[A.dim :, A.dim :, A.dim :] = B.table
    return FiniteAlgebra(A.l, T)


def generated_subalgebra(mats, l: int, max_dim: int) -> FiniteAlgebra | None:
    """Non-unital subalgebra generated by ``mats``; None if it exceeds ``max_dim``."""
    basis: list[np.ndarray] = []

    def add(m) -> bool:
        m = np.asarray(m, dtype=np.int64) % l
        cand = basis + [m]
        B = np.array([x.ravel() for x in cand]).T
        if linalg.rank(B, l) == len(cand):
            basis.append(m)
            return True
        return False

    queue = [np.asarray(m) % l for m in mats]
    while queue:
        m = queue.pop()
        if add(m):
            if len(basis) > max_dim:
                return None
            for b in list(basis):
                queue.append((m @ b) % l)
                queue.append((b @ m) % l)
    if not basis:
        return None
    return FiniteAlgebra.from_matrices(basis, l)


def random_algebra(rng: np.random.Generator, l: int, max_dim: int = 6) -> FiniteAlgebra:
    """A random associative algebra of dimension <= max_dim in a random basis."""
    while True:
        kind = int(rng.integers(0, 6))
        if kind == 0:
            A = upper_triangular(l, int(rng.integers(2, 4)))
        elif kind == 1:
            A = matrix_algebra(l, 2)
        elif kind == 2:
            A = truncated_polynomial(l, int(rng.integers(2, max_dim + 1)))
        elif kind == 3:
            A = cyclic_group_algebra(l, int(rng.integers(2, max_dim + 1)))
        elif kind == 4:
            A = product(truncated_polynomial(l, int(rng.integers(1, 4))), upper_triangular(l, 2))
        else:
            mats = [rng.integers(0, l, size=(3, 3)) for _ in range(int(rng.integers(1, 3)))]
            A = generated_subalgebra(mats, l, max_dim)
            if A is None:
                continue
        if A.dim > max_dim:
            continue
        while True:
            P = rng.integers(0, l, size=(A.dim, A.dim))
            if linalg.rank(P, l) == A.dim:
                return A.change_basis(P)
