"""Mean-row-sum bounds, equality cases and their cross-checks."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .core import as_matrix, epsilon_perturb, is_positive, mean_row_sum
from .exceptions import InvariantViolation
from .optimize import DEFAULT_MAX_LOOPS, maximize_rho, minimize_rho
from .oracle import DEFAULT_LIMIT_N, oracle_extremes
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL

GAP_TOL = 1e-9
EQUALITY_TOL = 1e-10

EqualityCase = Literal["flat_eigenvector", "constant_rows", "none"]
Method = Literal["oracle", "algorithm"]


@dataclass(frozen=True)
class BoundReport:
    mean_row_sum: float
    max_rho: float
    min_rho: float
    gap_upper: float
    gap_lower: float
    method: Method
    equality_case: EqualityCase

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    def summary(self) -> str:
        return (f"min_rho={self.min_rho:.10g} <= mean={self.mean_row_sum:.10g} <= "
                f"max_rho={self.max_rho:.10g}  (gaps {self.gap_lower:.3g}, {self.gap_upper:.3g}; "
                f"method={self.method}, equality={self.equality_case})")


def _spread_small(v: np.ndarray, tol: float) -> bool:
    scale = abs(float(v.mean()))
    spread = float(v.max() - v.min())
    return spread <= tol * scale if scale > 0 else spread == 0.0


def detect_equality_case(A, tol: float = EQUALITY_TOL) -> EqualityCase:
    """Which equality structure, if any, ``A`` has.

    ``constant_rows``: every row is constant (up to relative ``tol``), so
    Omega(A) is a single matrix.  ``flat_eigenvector``: all row sums agree,
    so the all-ones vector is a Perron vector of every member of Omega(A).
    If both hold, ``constant_rows`` is reported.
    """
    A = as_matrix(A, copy=False)
    if not is_positive(A):
        warnings.warn("equality characterization assumes a positive matrix", UserWarning, stacklevel=2)
    if all(_spread_small(row, tol) for row in A):
        return "constant_rows"
    if _spread_small(A.sum(axis=1), tol):
        return "flat_eigenvector"
    return "none"


def bound_report(A, method: Method = "oracle", tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, max_loops: int = DEFAULT_MAX_LOOPS,
                 limit_n: int = DEFAULT_LIMIT_N, gap_tol: float = GAP_TOL) -> BoundReport:
    """Extreme Perron roots over Omega(A) against the mean row sum.

    Raises
    ------
    InvariantViolation
        If ``min_rho <= mean <= max_rho`` fails by more than ``gap_tol``.
    """
    A = as_matrix(A, copy=False)
    mean = mean_row_sum(A)
    if method == "oracle":
        rep = oracle_extremes(A, tol, max_iter, limit_n)
        lo, hi = rep.min_rho, rep.max_rho
    elif method == "algorithm":
        lo = minimize_rho(A, tol, max_iter, max_loops).rho
        hi = maximize_rho(A, tol, max_iter, max_loops).rho
    else:
        raise ValueError(f"unknown method {method!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        case = detect_equality_case(A)
    report = BoundReport(mean, hi, lo, hi - mean, mean - lo, method, case)
    if report.gap_upper < -gap_tol or report.gap_lower < -gap_tol:
        raise InvariantViolation(f"mean row sum not sandwiched: {report.summary()}")
    return report


def epsilon_bound_reports(A, eps_values=(1e-3, 1e-6), **kwargs) -> list[BoundReport]:
    """Bound reports for ``A + eps`` at each ``eps``.

    Used for reducible inputs: the perturbed matrices are positive, and the
    gaps should approach those of ``A`` as ``eps`` shrinks.
    """
    return [bound_report(epsilon_perturb(A, e), **kwargs) for e in eps_values]


@dataclass(frozen=True)
class EquivalenceVerdict:
    mean_equals_max: bool
    equality_structure: bool
    mean_equals_min: bool
    report: BoundReport

    @property
    def consistent(self) -> bool:
        """The three conditions are all true or all false."""
        return self.mean_equals_max == self.equality_structure == self.mean_equals_min

    @property
    def all_hold(self) -> bool:
        return self.mean_equals_max and self.equality_structure and self.mean_equals_min


def verify_equality_equivalence(A, tol: float = DEFAULT_TOL, gap_tol: float = GAP_TOL,
                                limit_n: int = DEFAULT_LIMIT_N) -> EquivalenceVerdict:
    """Check on one positive matrix that mean == max rho, an equality
    structure, and mean == min rho are either all true or all false."""
    A = as_matrix(A, copy=False)
    if not is_positive(A):
        raise ValueError("equivalence check requires a strictly positive matrix")
    rep = bound_report(A, "oracle", tol=tol, limit_n=limit_n, gap_tol=gap_tol)
    return EquivalenceVerdict(
        mean_equals_max=abs(rep.gap_upper) <= gap_tol,
        equality_structure=rep.equality_case != "none",
        mean_equals_min=abs(rep.gap_lower) <= gap_tol,
        report=rep,
    )
