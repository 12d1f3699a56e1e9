"""Exact matrix helpers over Z/p^k on numpy object arrays."""

import logging
from typing import List, Tuple

import numpy as np

from utils.exceptions import PrecisionError

logger = logging.getLogger(__name__)


def as_matrix(rows, modulus: int) -> np.ndarray:
    matrix = np.array([[int(x) % modulus for x in row] for row in rows], dtype=object)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    return matrix


def identity(n: int) -> np.ndarray:
    matrix = np.zeros((n, n), dtype=object)
    for k in range(n):
        matrix[k, k] = 1
    return matrix


def elementary(n: int, i: int, j: int, t: int, modulus: int) -> np.ndarray:
    """I + t*E_ij with 1-based (i, j)"""
    matrix = identity(n)
    matrix[i - 1, j - 1] = (matrix[i - 1, j - 1] + t) % modulus
    return matrix


def diagonal(entries: List[int], modulus: int) -> np.ndarray:
    n = len(entries)
    matrix = np.zeros((n, n), dtype=object)
    for k, x in enumerate(entries):
        matrix[k, k] = x % modulus
    return matrix


def mat_mul(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    return np.dot(a, b) % modulus


def mat_product(factors, n: int, modulus: int) -> np.ndarray:
    result = identity(n)
    for factor in factors:
        result = mat_mul(result, factor, modulus)
    return result


def lu_unipotent(a: np.ndarray, modulus: int) -> Tuple[np.ndarray, np.ndarray]:
    """Doolittle split a = L*U with L unit lower triangular; pivots must be units"""
    n = a.shape[0]
    lower = identity(n)
    upper = np.zeros((n, n), dtype=object)
    for k in range(n):
        for j in range(k, n):
            upper[k, j] = (a[k, j] - sum(lower[k, s] * upper[s, j] for s in range(k))) % modulus
        try:
            pivot_inverse = pow(int(upper[k, k]), -1, modulus)
        except ValueError:
            raise PrecisionError(f"pivot {upper[k, k]} at position {k + 1} is not a unit")
        for i in range(k + 1, n):
            lower[i, k] = (a[i, k] - sum(lower[i, s] * upper[s, k] for s in range(k))) * pivot_inverse % modulus
    return lower, upper


def determinant(a: np.ndarray, modulus: int) -> int:
    _, upper = lu_unipotent(a, modulus)
    result = 1
    for k in range(a.shape[0]):
        result = result * upper[k, k] % modulus
    return result


def inverse(a: np.ndarray, modulus: int) -> np.ndarray:
    """Gauss-Jordan inverse with unit pivots"""
    n = a.shape[0]
    work = np.concatenate([a % modulus, identity(n)], axis=1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if _is_unit(work[r, col], modulus)), None)
        if pivot_row is None:
            raise PrecisionError("matrix is not invertible at this precision")
        if pivot_row != col:
            work[[col, pivot_row]] = work[[pivot_row, col]]
        work[col] = work[col] * pow(int(work[col, col]), -1, modulus) % modulus
        for r in range(n):
            if r != col and work[r, col] != 0:
                work[r] = (work[r] - work[r, col] * work[col]) % modulus
    return work[:, n:]


def _is_unit(x, modulus: int) -> bool:
    try:
        pow(int(x), -1, modulus)
        return True
    except ValueError:
        return False


# ==================== ECHELON FORMS ====================

def _valuation(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


def echelon_mod(rows, p: int, k: int) -> np.ndarray:
    """Row echelon generating set of the Z/p^k-span of rows

    Each pivot is an entry of minimal valuation in the remaining block, so it
    divides every entry it clears.
    """
    modulus = p ** k
    dtype = np.int64 if modulus < 2 ** 31 else object
    work = np.array(rows, dtype=object) % modulus
    if work.ndim != 2 or work.shape[0] == 0:
        return work.reshape(0, work.shape[-1] if work.ndim == 2 else 0)
    work = work.astype(dtype)
    n_rows, n_cols = work.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        best, best_val = None, k
        for r in np.nonzero(work[rank:, col])[0]:
            v = _valuation(int(work[rank + r, col]), p, k)
            if v < best_val:
                best, best_val = rank + int(r), v
                if v == 0:
                    break
        if best is None:
            continue
        if best != rank:
            work[[rank, best]] = work[[best, rank]]
        unit = int(work[rank, col]) // p ** best_val
        work[rank] = work[rank] * pow(unit, -1, modulus) % modulus
        factors = work[rank + 1:, col] // p ** best_val
        work[rank + 1:] = (work[rank + 1:] - np.outer(factors, work[rank])) % modulus
        rank += 1
    nonzero = [r for r in range(n_rows) if work[r].any()]
    return work[nonzero]


def rank_mod_p(rows: np.ndarray, p: int) -> int:
    """Rank over F_p"""
    return int(echelon_mod(rows, p, 1).shape[0])
