"""Row/eigenvector alignment search for extreme Perron roots over Omega(A).

Both searches keep every row of the working matrix ``C`` sorted ascending
and only reorder whole rows.  After each eigensolve the rows are permuted
so the Perron vector becomes sorted: ascending when maximizing (rows and
vector co-ordered), descending when minimizing (rows and vector
anti-ordered).  By the rearrangement inequality each non-identity step
moves rho strictly in the wanted direction, and the loop stops once the
vector already has the target order, at which point the alignment
certificate holds.

The answer is returned as ``C0 @ Q`` where ``Q`` is the accumulated row
permutation: it lies in Omega(A) and has the same spectrum as ``Q @ C0``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .core import as_matrix, as_permutation, compose, identity_permutation, is_identity, is_positive, sort_rows
from .exceptions import LoopLimitWarning, PreconditionFailed, ResidualTooLarge
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, PerronPair, is_fully_indecomposable, perron

DEFAULT_MAX_LOOPS = 64
TIE_RTOL = 1e-9

Sense = Literal["max", "min"]
Init = Literal["row_norm", "row_sum", "identity"]


@dataclass(frozen=True)
class TraceStep:
    rho: float
    eigenvector: np.ndarray
    applied_permutation: np.ndarray


@dataclass(frozen=True)
class OptimizeTrace:
    steps: tuple[TraceStep, ...]
    initial_heuristic_permutation: np.ndarray

    @property
    def loop_count(self) -> int:
        return len(self.steps)

    def to_json(self) -> str:
        """JSON array of step records; permutations are 1-based."""
        records = [
            {
                "rho": s.rho,
                "eigenvector": [float(v) for v in s.eigenvector],
                "applied_permutation": [int(i) + 1 for i in s.applied_permutation],
            }
            for s in self.steps
        ]
        return json.dumps(records)


@dataclass(frozen=True)
class OptimizeResult:
    witness: np.ndarray
    rho: float
    trace: OptimizeTrace
    certificate: bool
    sense: Sense
    final_matrix: np.ndarray
    perron_pair: PerronPair
    loop_limit_exceeded: bool = False
    permutation: np.ndarray = field(default=None, repr=False)

    @property
    def loop_count(self) -> int:
        return self.trace.loop_count


def _tie_tol(x) -> float:
    return TIE_RTOL * float(np.max(np.abs(x)))


def align_to_vector(x, direction: Literal["ascending", "descending"] = "ascending",
                    tie_tol: float | None = None) -> np.ndarray:
    """Permutation ``s`` such that ``x[s]`` is sorted in ``direction``.

    Components closer than ``tie_tol`` (default ``1e-9 * max|x|``) count as
    equal, so a vector that is sorted up to such ties yields the identity.
    Otherwise the sort is stable: equal components keep their order.
    """
    x = np.asarray(x, dtype=np.float64)
    if tie_tol is None:
        tie_tol = _tie_tol(x) if x.size else 0.0
    d = np.diff(x)
    if direction == "ascending":
        if np.all(d >= -tie_tol):
            return identity_permutation(x.size)
        return as_permutation(np.argsort(x, kind="stable"))
    if direction == "descending":
        if np.all(d <= tie_tol):
            return identity_permutation(x.size)
        return as_permutation(np.argsort(-x, kind="stable"))
    raise ValueError(f"direction must be 'ascending' or 'descending', got {direction!r}")


def _check_pair(C: np.ndarray, x: np.ndarray, tol: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (C.shape[0],):
        raise ValueError(f"vector has shape {x.shape}, expected ({C.shape[0]},)")
    s = x.sum()
    if not s > 0 or np.any(x < 0):
        raise ResidualTooLarge("x is not a nonnegative nonzero vector")
    x = x / s
    y = C @ x
    rho = y.sum()
    residual = np.abs(y - rho * x).max()
    if residual > 100 * tol * max(rho, 1.0):
        raise ResidualTooLarge(f"x is not a Perron vector of C: residual {residual:.3e}")
    return x


def alignment_holds(C: np.ndarray, x: np.ndarray, sense: Sense) -> bool:
    """Alignment condition alone, without the eigen-residual check."""
    t = _tie_tol(x)
    # less[k, j]: x_k < x_j beyond the tie tolerance
    less = x[:, None] < x[None, :] - t
    if not less.any():
        return True
    k, j = np.nonzero(less)
    if sense == "max":
        return bool(np.all(C[:, k] <= C[:, j]))
    return bool(np.all(C[:, k] >= C[:, j]))


def is_max_optimal(C, x, tol: float = DEFAULT_TOL) -> bool:
    """Alignment certificate for the maximum Perron root over Omega(C).

    True iff ``x_k < x_j`` implies ``c_ik <= c_ij`` for all ``i, j, k``.
    For irreducible ``C`` with Perron vector ``x > 0`` this holds exactly
    when ``rho(C)`` is maximal over Omega(C).

    Raises
    ------
    ResidualTooLarge
        If ``x`` misses the eigen-equation of ``C`` by more than ``100 * tol``
        (relative).
    """
    C = as_matrix(C, copy=False)
    return alignment_holds(C, _check_pair(C, x, tol), "max")


def is_min_optimal(C, x, tol: float = DEFAULT_TOL) -> bool:
    """Mirror of :func:`is_max_optimal`: ``x_k < x_j`` implies ``c_ik >= c_ij``."""
    C = as_matrix(C, copy=False)
    return alignment_holds(C, _check_pair(C, x, tol), "min")


def initial_order(C0, sense: Sense, init: Init = "row_norm") -> np.ndarray:
    """Starting row order: the Perron vector tends to follow row size, so
    rows are ordered by size in the direction the vector should end up."""
    C0 = as_matrix(C0, copy=False)
    n = C0.shape[0]
    if init == "identity":
        return identity_permutation(n)
    if init == "row_norm":
        key = np.linalg.norm(C0, axis=1)
    elif init == "row_sum":
        key = C0.sum(axis=1)
    else:
        raise ValueError(f"unknown init {init!r}")
    if sense == "min":
        key = -key
    return as_permutation(np.argsort(key, kind="stable"))


def check_preconditions(A) -> None:
    A = as_matrix(A, copy=False)
    if is_positive(A) or is_fully_indecomposable(A):
        return
    raise PreconditionFailed("matrix is neither strictly positive nor fully indecomposable; "
                             "pass unsafe_accept=True to run anyway")


def _optimize(A, sense: Sense, tol, max_iter, max_loops, init, unsafe_accept) -> OptimizeResult:
    A = as_matrix(A, copy=False)
    if not unsafe_accept:
        check_preconditions(A)
    target = "ascending" if sense == "max" else "descending"
    C0 = sort_rows(A, "ascending")
    Q = initial_order(C0, sense, init)
    Q0 = Q
    C = C0[Q]
    steps = []
    exceeded = True
    pair = None
    for loop in range(max_loops):
        pair = perron(C, tol, max_iter)
        P = align_to_vector(pair.x, target)
        # tied columns can leave x unsorted at an optimum; reordering then
        # only relabels them and rho does not move
        if not is_identity(P) and alignment_holds(C, pair.x, sense):
            P = identity_permutation(C.shape[0])
        steps.append(TraceStep(pair.rho, pair.x, P))
        if is_identity(P):
            exceeded = False
            break
        if loop == max_loops - 1:
            # keep C, Q consistent with the last eigensolve
            break
        C = C[P]
        Q = compose(P, Q)
    if exceeded:
        warnings.warn(f"no alignment fixed point after {max_loops} loops; returning last iterate",
                      LoopLimitWarning, stacklevel=3)
    C.flags.writeable = False
    witness = C0[:, np.argsort(Q)]
    witness.flags.writeable = False
    cert = alignment_holds(C, pair.x, sense)
    return OptimizeResult(
        witness=witness,
        rho=pair.rho,
        trace=OptimizeTrace(tuple(steps), Q0),
        certificate=cert,
        sense=sense,
        final_matrix=C,
        perron_pair=pair,
        loop_limit_exceeded=exceeded,
        permutation=Q,
    )


def maximize_rho(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 max_loops: int = DEFAULT_MAX_LOOPS, init: Init = "row_norm",
                 unsafe_accept: bool = False) -> OptimizeResult:
    """Find a member of Omega(A) with the largest Perron root.

    Parameters
    ----------
    A : (n, n) array_like
        Strictly positive or fully indecomposable nonnegative matrix.
    tol, max_iter
        Eigensolver settings, see :func:`permperron.spectral.perron`.
    max_loops : int
        Cap on eigensolve/realign rounds.  Hitting it emits
        :class:`LoopLimitWarning` and sets ``loop_limit_exceeded``.
    init : {"row_norm", "row_sum", "identity"}
        Initial row order of the row-sorted matrix.
    unsafe_accept : bool
        Skip the positivity / full-indecomposability check.

    Returns
    -------
    OptimizeResult
        ``witness`` is the maximizer ``C0 @ Q``; ``final_matrix`` is the
        row-permuted ``Q @ C0`` the loop ended on.
    """
    return _optimize(A, "max", tol, max_iter, max_loops, init, unsafe_accept)


def minimize_rho(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 max_loops: int = DEFAULT_MAX_LOOPS, init: Init = "row_norm",
                 unsafe_accept: bool = False) -> OptimizeResult:
    """Find a member of Omega(A) with the smallest Perron root.

    Same contract as :func:`maximize_rho`; rows stay ascending and the
    Perron vector is driven to descending order.
    """
    return _optimize(A, "min", tol, max_iter, max_loops, init, unsafe_accept)
