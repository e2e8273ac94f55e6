"""Dense linear algebra over the prime field F_l.

Matrices are numpy int64 arrays with entries in [0, l). These routines are
deliberately plain Gaussian elimination; they serve as the slice-wise
reference that the graded machinery in :mod:`motx.grading` is checked
against, and as the workhorse for chart bookkeeping.
"""

from __future__ import annotations

import numpy as np


def as_mod(a, l: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % l


def inv_mod(c: int, l: int) -> int:
    c %= l
    if c == 0:
        raise ZeroDivisionError("0 has no inverse mod %d" % l)
    return pow(int(c), l - 2, l)


def row_echelon(a, l: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` mod ``l`` and its pivot columns."""
    r = as_mod(a, l).copy()
    m, n = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            r[[row, p]] = r[[p, row]]
        r[row] = (r[row] * inv_mod(r[row, col], l)) % l
        others = np.nonzero(r[:, col])[0]
        for k in others:
            if k != row:
                r[k] = (r[k] - r[k, col] * r[row]) % l
        pivots.append(col)
        row += 1
    return r, pivots


def rank(a, l: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(row_echelon(a, l)[1])


def nullspace(a, l: int) -> np.ndarray:
    """Basis of the right kernel, as the columns of the returned matrix."""
    a = as_mod(a, l)
    m, n = a.shape
    if m == 0:
        return np.eye(n, dtype=np.int64)
    r, pivots = row_echelon(a, l)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, p in enumerate(pivots):
            basis[p, k] = (-r[i, f]) % l
    return basis


def inverse(a, l: int) -> np.ndarray:
    a = as_mod(a, l)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, pivots = row_echelon(np.hstack([a, np.eye(n, dtype=np.int64)]), l)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular mod %d" % l)
    return r[:, n:]


def matmul(a, b, l: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    return (a @ b) % l


def homology_dim(d_in, d_out, l: int, dim: int) -> int:
    """dim ker(d_out) - rank(d_in) at a space of dimension ``dim``."""
    out_rank = rank(d_out, l) if d_out is not None else 0
    in_rank = rank(d_in, l) if d_in is not None else 0
    return dim - out_rank - in_rank
