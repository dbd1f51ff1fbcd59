"""Brute-force ground truth over Omega(A) for small matrices.

Every distinct matrix reachable by permuting entries within rows is
enumerated and its Perron root computed.  Nothing is pruned: this module is
the slow, obviously-correct reference the alignment algorithms are checked
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product
from typing import Iterator

import numpy as np

from .core import as_matrix, mean_row_sum
from .exceptions import DimensionTooLarge
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, perron_roots

DEFAULT_LIMIT_N = 4
CHUNK = 1 << 15


@dataclass(frozen=True)
class OracleReport:
    min_rho: float
    argmin: np.ndarray
    max_rho: float
    argmax: np.ndarray
    count: int
    mean_row_sum: float


def distinct_row_permutations(row) -> np.ndarray:
    """All distinct orderings of a row's multiset, lexicographically sorted."""
    return np.array(sorted(set(permutations(np.asarray(row, dtype=np.float64).tolist()))))


def omega_size(A) -> int:
    """Number of distinct members of Omega(A): product of multinomials per row."""
    A = as_matrix(A, copy=False)
    n = A.shape[0]
    total = 1
    for row in A:
        _, counts = np.unique(row, return_counts=True)
        total *= math.factorial(n) // math.prod(math.factorial(int(c)) for c in counts)
    return total


def _check_limit(A: np.ndarray, limit_n: int) -> None:
    n = A.shape[0]
    if n > limit_n:
        raise DimensionTooLarge(
            f"n = {n} exceeds limit_n = {limit_n}; Omega(A) can hold up to "
            f"(n!)^n = {math.factorial(n) ** n:,} matrices"
        )


def enumerate_omega(A, limit_n: int = DEFAULT_LIMIT_N) -> Iterator[np.ndarray]:
    """Yield each distinct member of Omega(A) exactly once.

    Raises
    ------
    DimensionTooLarge
        If ``n > limit_n``.  Raised on the call, before iteration starts.
    """
    A = as_matrix(A, copy=False)
    _check_limit(A, limit_n)
    return _enumerate(A)


def _enumerate(A: np.ndarray) -> Iterator[np.ndarray]:
    per_row = [distinct_row_permutations(row) for row in A]
    for choice in product(*(range(len(p)) for p in per_row)):
        B = np.stack([per_row[i][k] for i, k in enumerate(choice)])
        B.flags.writeable = False
        yield B


def _chunks(per_row: list[np.ndarray], chunk: int) -> Iterator[np.ndarray]:
    """Stacks of members in the same order as :func:`enumerate_omega`."""
    sizes = [len(p) for p in per_row]
    total = math.prod(sizes)
    # mixed radix, last row varies fastest
    strides = [math.prod(sizes[i + 1:]) for i in range(len(sizes))]
    for start in range(0, total, chunk):
        k = np.arange(start, min(start + chunk, total))
        yield np.stack([per_row[i][(k // strides[i]) % sizes[i]] for i in range(len(sizes))], axis=1)


def _lex_first(stack: np.ndarray) -> np.ndarray:
    flat = stack.reshape(stack.shape[0], -1)
    return stack[np.lexsort(flat.T[::-1])[0]]


def _better(cand_rho, cand, best_rho, best, sign) -> bool:
    if best is None:
        return True
    if sign * cand_rho > sign * best_rho:
        return True
    if cand_rho == best_rho:
        return tuple(cand.ravel()) < tuple(best.ravel())
    return False


def oracle_extremes(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                    limit_n: int = DEFAULT_LIMIT_N) -> OracleReport:
    """Exhaustive min and max of the Perron root over Omega(A).

    Ties in rho are broken towards the lexicographically smallest matrix, so
    the witnesses do not depend on chunking.
    """
    A = as_matrix(A, copy=False)
    _check_limit(A, limit_n)
    per_row = [distinct_row_permutations(row) for row in A]
    lo_rho = hi_rho = None
    lo = hi = None
    count = 0
    for stack in _chunks(per_row, CHUNK):
        count += stack.shape[0]
        rho = perron_roots(stack, tol, max_iter)
        m = rho.min()
        cand = _lex_first(stack[rho == m])
        if _better(m, cand, lo_rho, lo, -1):
            lo_rho, lo = float(m), cand
        m = rho.max()
        cand = _lex_first(stack[rho == m])
        if _better(m, cand, hi_rho, hi, +1):
            hi_rho, hi = float(m), cand
    lo.flags.writeable = False
    hi.flags.writeable = False
    return OracleReport(lo_rho, lo, hi_rho, hi, count, mean_row_sum(A))
