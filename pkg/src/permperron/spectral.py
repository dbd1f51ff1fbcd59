"""Perron roots, Collatz-Wielandt bounds and structural tests.

The eigensolver is power iteration on ``A + I``.  The shift makes every
irreducible nonnegative matrix primitive, so periodic inputs such as
``[[0, 1], [1, 0]]`` still converge, and it keeps every iterate strictly
positive.  Iteration stops once the Collatz-Wielandt bracket
``[min (Ax)_i/x_i, max (Ax)_i/x_i]`` is narrower than ``tol * max(rho, 1)``;
that bracket always contains the Perron root, so the returned value is
certified, not just stagnant.

For reducible matrices the same iteration is tried first; when it cannot
certify a positive limit they go through the Frobenius normal form: the
spectral radius is the largest Perron root over the diagonal blocks of
strongly connected components, and a nonnegative eigenvector is assembled
from the block eigenvector and a back-substitution over the classes that
reach it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, maximum_bipartite_matching

from .core import as_matrix
from .exceptions import DimensionMismatch, NoConvergence, NonPositiveVector, ReducibleWarning

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
REDUCIBLE_BUDGET = 1000
REFINE_STEPS = 64


@dataclass(frozen=True)
class PerronPair:
    """Certified Perron root and L1-normalized nonnegative eigenvector.

    ``flags`` may contain ``"zero_matrix"`` (A is all zeros, x is flat) and
    ``"reducible"`` (x may contain zeros and need not be unique).
    """

    rho: float
    x: np.ndarray
    residual: float
    iterations: int
    flags: tuple[str, ...] = ()

    @property
    def reducible(self) -> bool:
        return "reducible" in self.flags


@dataclass(frozen=True)
class CWBounds:
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, value) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class CertificateVerdict:
    """Outcome of checking ``alpha * x <= A @ x`` (or ``>=``) row by row.

    Indices are 0-based.
    """

    holds: bool
    strict: tuple[int, ...] = field(default_factory=tuple)
    fails_at: int | None = None


def _power_iteration(A: np.ndarray, tol: float, max_iter: int, support: np.ndarray | None = None):
    """Shifted power iteration over a stack of matrices of shape (b, n, n).

    Returns ``(rho, x, residual, iterations, converged)``, one entry per
    matrix.  A member converges once its Collatz-Wielandt bracket is no
    wider than ``tol * max(rho, 1)``; it then keeps iterating for at most
    ``REFINE_STEPS`` more steps while trying to bring the width under
    ``tol`` itself, and the narrowest bracket seen is returned.  Finished
    members are dropped from the working set once enough have accumulated.

    ``support`` (b, n) restricts each start vector and the convergence test
    to an invariant index set; entries of A outside it must be zero.
    """
    b, n, _ = A.shape
    rho = np.zeros(b)
    if support is None:
        support = np.ones((b, n), dtype=bool)
    X = support / support.sum(axis=1, keepdims=True)
    resid = np.full(b, np.inf)
    iters = np.zeros(b, dtype=np.int64)
    converged = np.zeros(b, dtype=bool)
    best = np.full(b, np.inf)

    active = np.arange(b)
    pending = np.ones(b, dtype=bool)
    refined = np.zeros(b, dtype=np.int64)
    Aa, Sa = A, support
    x = X.copy()
    for it in range(max_iter + 1):
        y = np.einsum("bij,bj->bi", Aa, x)
        r = y.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = y / x  # underflowed x gives nan/inf, i.e. not converged
        spread = np.where(Sa, ratios, -np.inf).max(axis=1) - np.where(Sa, ratios, np.inf).min(axis=1)
        ok = spread <= tol * np.maximum(r, 1.0)
        better = pending & ok & (spread < best[active])
        last = pending & ~converged[active] & (it == max_iter)
        record = better | last
        if record.any():
            idx = active[record]
            rho[idx] = r[record]
            X[idx] = x[record]
            resid[idx] = np.abs(y[record] - r[record, None] * x[record]).max(axis=1)
            iters[idx] = it
            converged[idx] |= ok[record]
            best[idx] = np.where(ok[record], spread[record], np.inf)
        refined[active] += pending & converged[active]
        done = pending & ((converged[active] & ((best[active] <= tol) | (refined[active] > REFINE_STEPS)))
                          | (it == max_iter))
        if done.any():
            pending &= ~done
            if not pending.any():
                break
            if pending.sum() < 0.75 * pending.size:
                active, Aa, Sa = active[pending], Aa[pending], Sa[pending]
                x, y, r = x[pending], y[pending], r[pending]
                pending = np.ones(active.size, dtype=bool)
        # (A + I) x normalized; Σx = 1 is kept exactly up to rounding
        x = (y + x) / (r + 1.0)[:, None]
    return rho, X, resid, iters, converged


def _strong_components(A: np.ndarray):
    return connected_components(csr_matrix(A > 0), directed=True, connection="strong")


def is_irreducible(A) -> bool:
    """True iff the digraph with an edge i->j for ``a_ij > 0`` is strongly connected."""
    A = as_matrix(A, copy=False)
    if A.shape[0] == 1:
        return True
    if np.all(A > 0):
        return True
    ncomp, _ = _strong_components(A)
    return ncomp == 1


def _perron_irreducible(A: np.ndarray, tol: float, max_iter: int):
    rho, X, resid, iters, conv = _power_iteration(A[None], tol, max_iter)
    if not conv[0]:
        raise NoConvergence(
            f"power iteration did not converge in {max_iter} iterations (residual {resid[0]:.3e})",
            rho=float(rho[0]), x=X[0], residual=float(resid[0]), iterations=int(iters[0]),
        )
    return float(rho[0]), X[0], int(iters[0])


def _perron_reducible(A: np.ndarray, tol: float, max_iter: int):
    n = A.shape[0]
    ncomp, labels = _strong_components(A)
    members = [np.flatnonzero(labels == c) for c in range(ncomp)]
    block_rho = np.zeros(ncomp)
    block_x = []
    total_iters = 0
    for c, idx in enumerate(members):
        block = A[np.ix_(idx, idx)]
        if idx.size == 1:
            block_rho[c] = block[0, 0]
            block_x.append(np.ones(1))
        else:
            r, x, it = _perron_irreducible(block, tol, max_iter)
            block_rho[c] = r
            block_x.append(x)
            total_iters += it
    rho = float(block_rho.max())

    # reach[c, d]: class c reaches class d in the condensation (reflexive)
    cond = np.zeros((ncomp, ncomp), dtype=bool)
    rows, cols = np.nonzero(A > 0)
    cond[labels[rows], labels[cols]] = True
    graph = csr_matrix(cond)
    reach = np.zeros((ncomp, ncomp), dtype=bool)
    for c in range(ncomp):
        reach[c, breadth_first_order(graph, c, directed=True, return_predecessors=False)] = True

    near = block_rho >= rho - 10 * tol * max(rho, 1.0)
    # a basic class no other near-maximal class reaches
    candidates = [c for c in np.flatnonzero(near) if not any(reach[d, c] for d in np.flatnonzero(near) if d != c)]
    K = min(candidates, key=lambda c: members[c][0])

    x = np.zeros(n)
    x[members[K]] = block_x[K]
    # sinks first: a class depends only on classes it reaches
    order = sorted(range(ncomp), key=lambda c: reach[c].sum())
    for c in order:
        if c == K or not reach[c, K]:
            continue
        idx = members[c]
        rhs = A[idx] @ x
        lhs = rho * np.eye(idx.size) - A[np.ix_(idx, idx)]
        x[idx] = np.linalg.solve(lhs, rhs)
    np.clip(x, 0.0, None, out=x)
    x /= x.sum()
    return rho, x, total_iters


def perron(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> PerronPair:
    """Perron root and L1-normalized Perron vector of a nonnegative matrix.

    Parameters
    ----------
    A : (n, n) array_like
        Nonnegative matrix.
    tol : float
        Relative tolerance; on return ``max|Ax - rho x| <= tol * max(rho, 1)``.
    max_iter : int
        Iteration cap for power iteration.

    Returns
    -------
    PerronPair

    Raises
    ------
    NoConvergence
        If power iteration on an irreducible (block of) ``A`` did not reach
        ``tol`` within ``max_iter`` steps.

    Warns
    -----
    ReducibleWarning
        If ``A`` is reducible and not the zero matrix.
    """
    A = as_matrix(A, copy=False)
    n = A.shape[0]
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not np.any(A):
        x = np.full(n, 1.0 / n)
        return PerronPair(0.0, x, 0.0, 0, ("zero_matrix",) + (("reducible",) if n > 1 else ()))
    flags: tuple[str, ...] = ()
    if is_irreducible(A):
        rho, x, iters = _perron_irreducible(A, tol, max_iter)
    else:
        warnings.warn("matrix is reducible; Perron vector may contain zeros or be non-unique",
                      ReducibleWarning, stacklevel=2)
        flags = ("reducible",)
        # the shifted iteration's own limit when it is certifiable (x > 0),
        # else the normal-form construction
        r, X, _, it, conv = _power_iteration(A[None], tol, min(max_iter, REDUCIBLE_BUDGET))
        if conv[0]:
            rho, x, iters = float(r[0]), X[0], int(it[0])
        else:
            rho, x, iters = _perron_reducible(A, tol, max_iter)
            iters += int(it[0])
    residual = float(np.abs(A @ x - rho * x).max())
    if residual > tol * max(rho, 1.0):
        raise NoConvergence(f"eigen-residual {residual:.3e} exceeds tolerance", rho=rho, x=x,
                            residual=residual, iterations=iters)
    x.flags.writeable = False
    return PerronPair(rho, x, residual, iters, flags)


def perron_roots(As, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> np.ndarray:
    """Perron roots of a stack of matrices, shape (b, n, n) -> (b,).

    Reducible members are split into their classes, so every member is
    certified by the bracket test.

    Raises
    ------
    NoConvergence
        If some member (or class) does not converge within ``max_iter``.
    """
    As = np.asarray(As, dtype=np.float64)
    if As.ndim != 3 or As.shape[1] != As.shape[2]:
        raise ValueError(f"expected a (b, n, n) stack, got shape {As.shape}")
    if As.shape[0] == 0:
        return np.zeros(0)
    b, n, _ = As.shape
    reach = _reachability(As > 0)
    irreducible = reach.all(axis=(1, 2))
    rho = np.zeros(b)
    conv = np.ones(b, dtype=bool)
    if irreducible.any():
        rho[irreducible], _, _, _, conv[irreducible] = _power_iteration(As[irreducible], tol, max_iter)
    red = np.flatnonzero(~irreducible)
    if red.size:
        # rho of a reducible matrix is the largest rho of its classes;
        # one masked problem per (member, node): the class containing the node
        R = reach[red]
        cls = R & R.transpose(0, 2, 1)  # cls[k, i, j]: i, j in one class
        masks = cls.reshape(-1, n)
        blocks = np.repeat(As[red], n, axis=0) * (masks[:, :, None] & masks[:, None, :])
        r, _, _, _, c = _power_iteration(blocks, tol, max_iter, support=masks)
        rho[red] = r.reshape(-1, n).max(axis=1)
        conv[red] = c.reshape(-1, n).all(axis=1)
    if not conv.all():
        k = int(np.flatnonzero(~conv)[0])
        raise NoConvergence(f"power iteration did not converge for stack member {k} in {max_iter} iterations",
                            rho=float(rho[k]))
    return rho


def _reachability(pattern: np.ndarray) -> np.ndarray:
    """Reflexive transitive closure of a stack of (b, n, n) boolean patterns."""
    n = pattern.shape[1]
    R = pattern | np.eye(n, dtype=bool)
    steps = 1
    while steps < n - 1:
        Rf = R.astype(np.float32)
        R = np.matmul(Rf, Rf) > 0
        steps *= 2
    return R


def cw_bounds(A, x) -> CWBounds:
    """Collatz-Wielandt bracket ``min/max (Ax)_i / x_i`` for positive ``x``."""
    A = as_matrix(A, copy=False)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.shape[0],):
        raise DimensionMismatch(f"vector has shape {x.shape}, expected ({A.shape[0]},)")
    if np.any(~(x > 0)):
        i = int(np.flatnonzero(~(x > 0))[0])
        raise NonPositiveVector(f"component {i + 1} of x is not positive ({x[i]})")
    ratios = (A @ x) / x
    return CWBounds(float(ratios.min()), float(ratios.max()))


def strict_improvement_certificate(A, x, alpha: float,
                                   direction: Literal["lower", "upper"] = "lower",
                                   tol: float = 0.0) -> CertificateVerdict:
    """Check ``alpha x <= Ax`` (lower) or ``alpha x >= Ax`` (upper).

    Components are compared with slack ``tol * max(|alpha|, 1) * max(x)``.
    For irreducible ``A`` a verdict that holds with a nonempty strict set
    certifies ``rho(A) > alpha`` (resp. ``< alpha``).
    """
    A = as_matrix(A, copy=False)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.shape[0],):
        raise DimensionMismatch(f"vector has shape {x.shape}, expected ({A.shape[0]},)")
    if not np.any(x):
        raise ValueError("x must be nonzero")
    diff = A @ x - alpha * x
    if direction == "upper":
        diff = -diff
    elif direction != "lower":
        raise ValueError(f"direction must be 'lower' or 'upper', got {direction!r}")
    slack = tol * max(abs(alpha), 1.0) * float(np.abs(x).max())
    bad = np.flatnonzero(diff < -slack)
    if bad.size:
        return CertificateVerdict(False, (), int(bad[0]))
    return CertificateVerdict(True, tuple(int(i) for i in np.flatnonzero(diff > slack)), None)


def rearrangement_extremes(x, y) -> tuple[float, float]:
    """``(min, max)`` of ``sum_i x_i y_phi(i)`` over all permutations ``phi``."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionMismatch(f"length mismatch: {x.shape} vs {y.shape}")
    return float(x @ y[::-1]), float(x @ y)


def has_perfect_matching(pattern) -> bool:
    """Whether the bipartite row/column graph of a 0/1 pattern has a perfect matching."""
    pattern = np.asarray(pattern, dtype=bool)
    m, n = pattern.shape
    if m != n:
        return False
    if m == 0:
        return True
    match = maximum_bipartite_matching(csr_matrix(pattern), perm_type="column")
    return bool(np.all(match >= 0))


def is_fully_indecomposable(A, method: Literal["diagonal", "minors"] = "diagonal") -> bool:
    """True iff ``PAQ`` is irreducible for all permutation matrices ``P, Q``.

    ``method="diagonal"`` finds one perfect matching, moves it onto the
    diagonal and tests irreducibility; with a positive diagonal the two
    properties coincide.  ``method="minors"`` checks that deleting any row
    ``i`` and column ``j`` leaves a pattern with a perfect matching
    (``n**2`` matchings).  For ``n = 1`` the convention is ``a_11 > 0``.
    """
    A = as_matrix(A, copy=False)
    n = A.shape[0]
    pattern = A > 0
    if n == 1:
        return bool(pattern[0, 0])
    if pattern.all():
        return True
    if method == "minors":
        idx = np.arange(n)
        return all(
            has_perfect_matching(pattern[np.ix_(idx != i, idx != j)])
            for i in range(n) for j in range(n)
        )
    if method != "diagonal":
        raise ValueError(f"unknown method {method!r}")
    match = maximum_bipartite_matching(csr_matrix(pattern), perm_type="column")
    if np.any(match < 0):
        return False
    ncomp, _ = _strong_components(A[:, match])
    return ncomp == 1

