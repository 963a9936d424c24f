"""Exact linear algebra over F_p on numpy int64 arrays.

Row reduction is vectorized per pivot; large matrix products route through
float64 BLAS when the dot-length bound k*(m-1)^2 < 2^53 guarantees exact
integer results.  All functions expect and return canonical residues.
"""

from __future__ import annotations

import numpy as np

_BLAS_CUTOFF = 1 << 16  # flops below this: plain int64 matmul is fine


def asmod(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def matmul_mod(a, b, m: int) -> np.ndarray:
    """Exact a @ b mod m, using BLAS float64 when it is safe and worthwhile."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    k = a.shape[-1]
    flops = a.size // max(k, 1) * k * (b.size // max(k, 1))
    if flops > _BLAS_CUTOFF and k * (m - 1) ** 2 < 2**53:
        c = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.mod(c, m).astype(np.int64)
    return np.matmul(a, b) % m


def rref(a, p: int):
    """Reduced row echelon form mod p.  Returns (R, pivot_columns)."""
    r = asmod(a, p).copy()
    rows, cols = r.shape
    pivots = []
    lead = 0
    for c in range(cols):
        if lead >= rows:
            break
        nz = np.nonzero(r[lead:, c])[0]
        if nz.size == 0:
            continue
        pr = lead + int(nz[0])
        if pr != lead:
            r[[lead, pr]] = r[[pr, lead]]
        inv = pow(int(r[lead, c]), -1, p)
        r[lead, c:] = (r[lead, c:] * inv) % p
        other = np.nonzero(r[:, c])[0]
        other = other[other != lead]
        if other.size:
            r[np.ix_(other, range(c, cols))] = (
                r[np.ix_(other, range(c, cols))]
                - np.outer(r[other, c], r[lead, c:])
            ) % p
        pivots.append(c)
        lead += 1
    return r[: len(pivots)], pivots


def row_space_basis(a, p: int, block: int = 2048) -> np.ndarray:
    """Row space basis (rref rows), reducing tall matrices block by block."""
    a = asmod(a, p)
    if a.shape[0] <= block:
        return rref(a, p)[0]
    acc = np.zeros((0, a.shape[1]), dtype=np.int64)
    for i in range(0, a.shape[0], block):
        acc = rref(np.vstack([acc, a[i : i + block]]), p)[0]
    return acc


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return row_space_basis(a, p).shape[0]


def nullspace(a, p: int) -> np.ndarray:
    """Kernel basis as columns of an (n, k) array, from the rref of a."""
    a = asmod(a, p)
    n = a.shape[1]
    if a.shape[0] == 0 or n == 0:
        return np.eye(n, dtype=np.int64)
    r = row_space_basis(a, p)
    r, pivots = rref(r, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-r[i, fc]) % p
    return basis


def solve(a, b, p: int):
    """One solution of a x = b mod p (free variables 0), or None.

    b may be a vector or a matrix of stacked right-hand sides (as columns).
    """
    a = asmod(a, p)
    b1 = asmod(b, p)
    vec = b1.ndim == 1
    if vec:
        b1 = b1[:, None]
    aug = np.hstack([a, b1])
    r = row_space_basis(aug, p)
    r, pivots = rref(r, p)
    n = a.shape[1]
    if any(c >= n for c in pivots):
        return None
    x = np.zeros((n, b1.shape[1]), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, n:]
    return x[:, 0] if vec else x


def inv(a, p: int):
    """Inverse mod p, or None if singular."""
    a = asmod(a, p)
    n = a.shape[0]
    r, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots != list(range(n)):
        return None
    return r[:, n:]


def col_space_basis(a, p: int) -> np.ndarray:
    """Column space basis, as columns."""
    return row_space_basis(np.asarray(a).T, p).T


def in_span(basis_cols, v, p: int) -> bool:
    """Is v (column vector or matrix of columns) in the span of basis_cols?"""
    basis_cols = asmod(basis_cols, p)
    v = asmod(v, p)
    if v.ndim == 1:
        v = v[:, None]
    if not v.any():
        return True
    return rank(np.hstack([basis_cols, v]).T, p) == rank(basis_cols.T, p)


def intersect_col_spaces(a, b, p: int) -> np.ndarray:
    """Basis (columns) of the intersection of two column spaces."""
    a = asmod(a, p)
    b = asmod(b, p)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    k = nullspace(np.hstack([a, -b % p]), p)
    if k.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    return col_space_basis(matmul_mod(a, k[: a.shape[1]], p), p)


def pow_mod(a, e: int, p: int) -> np.ndarray:
    acc = np.eye(a.shape[0], dtype=np.int64)
    base = asmod(a, p)
    while e:
        if e & 1:
            acc = matmul_mod(acc, base, p)
        base = matmul_mod(base, base, p)
        e >>= 1
    return acc
