"""Nonnegative matrix and permutation arithmetic.

Matrices are plain ``float64`` numpy arrays, validated once by
:func:`as_matrix` and returned read-only.  Permutations are integer index
arrays ``s`` with the convention that the permutation matrix ``P`` has
``P[i, s[i]] = 1``, so ``(P @ x)[i] == x[s[i]]`` and ``P @ A == A[s]``.
Indices are 0-based internally; user-facing output adds one.
"""

from __future__ import annotations

from typing import Literal

import numpy as np

from .exceptions import DimensionMismatch, MatrixFormatError

Direction = Literal["ascending", "descending"]


def as_matrix(A, *, copy: bool = True) -> np.ndarray:
    """Validate ``A`` as a nonnegative square matrix and return it read-only.

    Raises
    ------
    MatrixFormatError
        If ``A`` is not a nonempty square 2-D array of finite nonnegative
        numbers.  The message names the first offending entry (1-based).
    """
    if isinstance(A, np.ndarray) and not A.flags.writeable and A.dtype == np.float64 and not copy:
        M = A
    else:
        try:
            M = np.array(A, dtype=np.float64, copy=True)
        except (TypeError, ValueError) as exc:
            raise MatrixFormatError(f"not a numeric matrix: {exc}") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise MatrixFormatError(f"matrix must be square, got shape {M.shape}")
    if M.shape[0] < 1:
        raise MatrixFormatError("matrix must have n >= 1")
    bad = ~np.isfinite(M)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise MatrixFormatError(f"row {i + 1}, column {j + 1}: non-finite value {M[i, j]}")
    neg = M < 0
    if neg.any():
        i, j = np.argwhere(neg)[0]
        raise MatrixFormatError(f"row {i + 1}, column {j + 1}: negative value {M[i, j]:g}")
    M.flags.writeable = False
    return M


def _frozen(M: np.ndarray) -> np.ndarray:
    M = np.ascontiguousarray(M, dtype=np.float64)
    M.flags.writeable = False
    return M


def row_sums(A) -> np.ndarray:
    A = as_matrix(A, copy=False)
    return A.sum(axis=1)


def mean_row_sum(A) -> float:
    """Arithmetic mean of the row sums, ``sum(A) / n``."""
    A = as_matrix(A, copy=False)
    return float(A.sum() / A.shape[0])


def sort_rows(A, direction: Direction = "ascending") -> np.ndarray:
    """Sort the entries of every row.  Stable, so tied entries keep order."""
    A = as_matrix(A, copy=False)
    if direction == "ascending":
        return _frozen(np.sort(A, axis=1, kind="stable"))
    if direction == "descending":
        # reversing an ascending sort gives a non-increasing row
        return _frozen(np.sort(A, axis=1, kind="stable")[:, ::-1])
    raise ValueError(f"direction must be 'ascending' or 'descending', got {direction!r}")


def row_signature(A) -> tuple[tuple[float, ...], ...]:
    """Canonical form of ``A`` up to within-row permutation."""
    A = as_matrix(A, copy=False)
    return tuple(tuple(row) for row in np.sort(A, axis=1).tolist())


def in_omega(B, A) -> bool:
    """True iff ``B`` is obtained from ``A`` by permuting entries within rows."""
    A = as_matrix(A, copy=False)
    B = as_matrix(B, copy=False)
    if A.shape != B.shape:
        return False
    return bool(np.array_equal(np.sort(A, axis=1), np.sort(B, axis=1)))


def first_omega_violation(B, A) -> int | None:
    """0-based index of the first row whose multiset differs, or None."""
    A = as_matrix(A, copy=False)
    B = as_matrix(B, copy=False)
    if A.shape != B.shape:
        raise DimensionMismatch(f"candidate is {B.shape[0]}x{B.shape[0]}, original is {A.shape[0]}x{A.shape[0]}")
    differs = np.any(np.sort(A, axis=1) != np.sort(B, axis=1), axis=1)
    idx = np.flatnonzero(differs)
    return int(idx[0]) if idx.size else None


def epsilon_perturb(A, eps: float) -> np.ndarray:
    """Add ``eps`` to every entry, producing a strictly positive matrix."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    A = as_matrix(A, copy=False)
    return _frozen(A + eps)


def is_positive(A) -> bool:
    A = as_matrix(A, copy=False)
    return bool(np.all(A > 0))


# -- permutations -----------------------------------------------------------

def as_permutation(p, n: int | None = None) -> np.ndarray:
    """Validate ``p`` as a 0-based permutation of ``range(n)``."""
    s = np.asarray(p)
    if s.ndim != 1 or (s.size and not np.issubdtype(s.dtype, np.integer)):
        raise ValueError("permutation must be a 1-D integer array")
    s = s.astype(np.intp)
    if n is not None and s.size != n:
        raise DimensionMismatch(f"permutation has length {s.size}, expected {n}")
    if not np.array_equal(np.sort(s), np.arange(s.size)):
        raise ValueError(f"not a permutation of 0..{s.size - 1}: {s.tolist()}")
    s.flags.writeable = False
    return s


def identity_permutation(n: int) -> np.ndarray:
    return as_permutation(np.arange(n))


def is_identity(p) -> bool:
    return bool(np.array_equal(p, np.arange(len(p))))


def compose(p, q) -> np.ndarray:
    """Index array of the matrix product ``P @ Q``."""
    p = as_permutation(p)
    q = as_permutation(q, p.size)
    return as_permutation(q[p])


def inverse(p) -> np.ndarray:
    p = as_permutation(p)
    return as_permutation(np.argsort(p))


def permutation_matrix(p) -> np.ndarray:
    p = as_permutation(p)
    P = np.zeros((p.size, p.size))
    P[np.arange(p.size), p] = 1.0
    return P


def from_permutation_matrix(P) -> np.ndarray:
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or not np.all((P == 0) | (P == 1)):
        raise ValueError("not a 0/1 square matrix")
    if not (np.all(P.sum(axis=0) == 1) and np.all(P.sum(axis=1) == 1)):
        raise ValueError("not a permutation matrix")
    return as_permutation(np.argmax(P, axis=1))


def permute_rows(p, A) -> np.ndarray:
    """``P @ A``: row ``i`` of the result is row ``p[i]`` of ``A``."""
    A = as_matrix(A, copy=False)
    p = as_permutation(p, A.shape[0])
    return _frozen(A[p])


def permute_cols(A, p) -> np.ndarray:
    """``A @ P``: column ``p[k]`` of the result is column ``k`` of ``A``.

    Every row is permuted the same way, so the result lies in Omega(A).
    """
    A = as_matrix(A, copy=False)
    p = as_permutation(p, A.shape[0])
    return _frozen(A[:, np.argsort(p)])
