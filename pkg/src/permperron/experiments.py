"""Seeded random instances and the while-loop count study.

Every instance draws from its own Philox stream keyed by
``(seed, dim, instance)``, so results do not depend on run order or on the
number of worker processes.
"""

from __future__ import annotations

import csv
import io
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .core import as_matrix, mean_row_sum
from .exceptions import LoopCountWarning, PermPerronError
from .optimize import DEFAULT_MAX_LOOPS, maximize_rho, minimize_rho
from .oracle import oracle_extremes
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL

EXPECTED_MAX_LOOPS = 3
CSV_HEADER = ("dim", "instance", "direction", "loops", "rho", "mean_row_sum", "runtime_seconds", "seed")


@dataclass(frozen=True)
class Distribution:
    kind: Literal["uniform_int", "uniform_real"] = "uniform_int"
    lo: float = 1
    hi: float = 9

    def __post_init__(self):
        if self.kind not in ("uniform_int", "uniform_real"):
            raise ValueError(f"unknown distribution {self.kind!r}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("distribution bounds must be finite")
        if self.lo < 0:
            raise ValueError(f"lo must be >= 0 for nonnegative matrices, got {self.lo}")
        if self.hi < self.lo or (self.kind == "uniform_real" and self.hi == self.lo):
            raise ValueError(f"invalid bounds lo={self.lo}, hi={self.hi}")
        if self.kind == "uniform_int" and (self.lo != int(self.lo) or self.hi != int(self.hi)):
            raise ValueError("uniform_int bounds must be integers")

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """Parse ``"uniform_int:1:9"`` or ``"uniform_real:0.5:2"``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected KIND:LO:HI, got {text!r}")
        kind, lo, hi = parts
        conv = int if kind == "uniform_int" else float
        try:
            return cls(kind, conv(lo), conv(hi))
        except ValueError as exc:
            raise ValueError(f"bad distribution {text!r}: {exc}") from None

    def __str__(self):
        return f"{self.kind}:{self.lo:g}:{self.hi:g}"


def instance_rng(seed: int, dim: int, instance: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(dim, instance))
    return np.random.Generator(np.random.Philox(ss))


def random_matrix(n: int, rng: np.random.Generator, dist: Distribution = Distribution()) -> np.ndarray:
    """``n x n`` matrix of independent draws; ``uniform_int`` includes both ends.

    ``uniform_real`` draws from ``[lo, hi)``; with ``lo = 0`` entries may be
    arbitrarily close to (or exactly) zero; check
    :func:`permperron.core.is_positive` before optimizing.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if dist.kind == "uniform_int":
        M = rng.integers(int(dist.lo), int(dist.hi), size=(n, n), endpoint=True).astype(np.float64)
    else:
        M = rng.uniform(dist.lo, dist.hi, size=(n, n))
    return as_matrix(M)


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple[int, ...] = tuple(range(5, 201, 5))
    instances_per_dim: int = 50
    seed: int = 0
    distribution: Distribution = Distribution()
    direction: Literal["max", "min", "both"] = "both"
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    max_loops: int = DEFAULT_MAX_LOOPS

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or min(self.dims) < 2:
            raise ValueError("dims must be nonempty and every dim >= 2")
        if self.instances_per_dim < 1:
            raise ValueError("instances_per_dim must be positive")
        if self.direction not in ("max", "min", "both"):
            raise ValueError(f"direction must be max, min or both, got {self.direction!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.distribution.kind == "uniform_int" and self.distribution.lo == 0:
            raise ValueError("uniform_int with lo=0 can produce zero entries; the optimizers need positive input")

    @property
    def directions(self) -> tuple[str, ...]:
        return ("max", "min") if self.direction == "both" else (self.direction,)


@dataclass(frozen=True)
class InstanceRecord:
    dim: int
    instance: int
    direction: str
    loops: int
    rho: float
    mean_row_sum: float
    runtime_seconds: float
    seed: int
    error: str | None = None
    oracle_match: bool | None = None
    loop_limit_exceeded: bool = False

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def sandwich_ok(self) -> bool:
        if not self.ok:
            return False
        if self.direction == "max":
            return self.rho >= self.mean_row_sum - 1e-9
        return self.rho <= self.mean_row_sum + 1e-9


@dataclass(frozen=True)
class DimSummary:
    dim: int
    mean_loops: float
    max_loops_observed: int
    mean_runtime: float
    instance_count: int


@dataclass(frozen=True)
class LoopStats:
    records: tuple[InstanceRecord, ...]
    per_dim: tuple[DimSummary, ...]
    max_loops_observed: int
    expected_max_loops: int = EXPECTED_MAX_LOOPS
    config: ExperimentConfig | None = field(default=None, repr=False)

    @property
    def exceeds_expectation(self) -> bool:
        return self.max_loops_observed > self.expected_max_loops

    @property
    def errors(self) -> tuple[InstanceRecord, ...]:
        return tuple(r for r in self.records if not r.ok)

    def to_csv(self) -> str:
        buf = io.StringIO()
        write_csv(self, buf)
        return buf.getvalue()


def write_csv(stats: LoopStats, fp) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in stats.records:
        w.writerow([r.dim, r.instance, r.direction, r.loops, repr(r.rho), repr(r.mean_row_sum),
                    f"{r.runtime_seconds:.6e}", r.seed])


MatrixFactory = Callable[[int, int, np.random.Generator], np.ndarray]


def _run_instance(cfg: ExperimentConfig, dim: int, idx: int, oracle_check: bool,
                  factory: MatrixFactory | None) -> list[InstanceRecord]:
    rng = instance_rng(cfg.seed, dim, idx)
    A = factory(dim, idx, rng) if factory is not None else random_matrix(dim, rng, cfg.distribution)
    A = as_matrix(A)
    mean = mean_row_sum(A)
    oracle = None
    if oracle_check:
        oracle = oracle_extremes(A, cfg.tol, cfg.max_iter)
    out = []
    for direction in cfg.directions:
        solve = maximize_rho if direction == "max" else minimize_rho
        t0 = time.perf_counter()
        try:
            res = solve(A, cfg.tol, cfg.max_iter, cfg.max_loops)
        except PermPerronError as exc:
            out.append(InstanceRecord(dim, idx, direction, 0, float("nan"), mean,
                                      time.perf_counter() - t0, cfg.seed, f"{type(exc).__name__}: {exc}"))
            continue
        elapsed = time.perf_counter() - t0
        match = None
        if oracle is not None:
            ref = oracle.max_rho if direction == "max" else oracle.min_rho
            match = abs(res.rho - ref) <= 1e-9
        out.append(InstanceRecord(dim, idx, direction, res.loop_count, res.rho, mean,
                                  elapsed, cfg.seed, None, match, res.loop_limit_exceeded))
    return out


def run_convergence_experiment(cfg: ExperimentConfig, oracle_check: bool = False,
                               matrix_factory: MatrixFactory | None = None,
                               workers: int = 1) -> LoopStats:
    """Count alignment loops over random positive matrices of each size.

    Parameters
    ----------
    cfg : ExperimentConfig
    oracle_check : bool
        Also run the exhaustive oracle on every instance (small dims only)
        and record whether the optimizer matched it.
    matrix_factory : callable, optional
        ``f(dim, instance, rng) -> matrix`` replacing the random generator.
        Must be picklable when ``workers > 1``.
    workers : int
        Process count; output order and values are the same for any count.

    Solver failures are recorded on the affected rows instead of aborting.
    A maximum loop count above the expected bound emits
    :class:`LoopCountWarning`.
    """
    tasks = [(d, i) for d in cfg.dims for i in range(cfg.instances_per_dim)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_instance, cfg, d, i, oracle_check, matrix_factory) for d, i in tasks]
            batches = [f.result() for f in futures]
    else:
        batches = [_run_instance(cfg, d, i, oracle_check, matrix_factory) for d, i in tasks]
    records = tuple(r for batch in batches for r in batch)

    per_dim = []
    for d in cfg.dims:
        rs = [r for r in records if r.dim == d and r.ok]
        loops = [r.loops for r in rs]
        per_dim.append(DimSummary(
            dim=d,
            mean_loops=float(np.mean(loops)) if loops else float("nan"),
            max_loops_observed=max(loops, default=0),
            mean_runtime=float(np.mean([r.runtime_seconds for r in rs])) if rs else float("nan"),
            instance_count=len({r.instance for r in records if r.dim == d}),
        ))
    observed = max((s.max_loops_observed for s in per_dim), default=0)
    stats = LoopStats(records, tuple(per_dim), observed, EXPECTED_MAX_LOOPS, cfg)
    if stats.exceeds_expectation:
        warnings.warn(f"observed {observed} while loops, above the expected {EXPECTED_MAX_LOOPS}",
                      LoopCountWarning, stacklevel=2)
    return stats

