import csv
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permperron.exceptions import LoopCountWarning
from permperron.experiments import (CSV_HEADER, Distribution, ExperimentConfig, instance_rng, random_matrix,
                                    run_convergence_experiment)


def constant_rows(n, idx, rng):
    return np.repeat(rng.integers(1, 10, (n, 1)), n, axis=1).astype(float)


class TestGenerator:
    def test_same_seed_same_matrix(self):
        a = random_matrix(6, instance_rng(7, 6, 3))
        b = random_matrix(6, instance_rng(7, 6, 3))
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        base = random_matrix(6, instance_rng(7, 6, 3))
        for other in (instance_rng(8, 6, 3), instance_rng(7, 6, 4), instance_rng(7, 7, 3)):
            assert not np.array_equal(base, random_matrix(6, other))

    @given(st.integers(1, 30), st.integers(0, 2**63))
    def test_int_range_inclusive(self, n, seed):
        M = random_matrix(n, instance_rng(seed, n, 0), Distribution("uniform_int", 1, 9))
        assert M.min() >= 1 and M.max() <= 9
        assert np.all(M == np.round(M))

    def test_int_endpoints_reached(self):
        M = random_matrix(60, instance_rng(0, 60, 0), Distribution("uniform_int", 1, 9))
        assert set(np.unique(M)) == set(range(1, 10))

    def test_real_range(self):
        M = random_matrix(40, instance_rng(1, 40, 0), Distribution("uniform_real", 0.5, 2.0))
        assert M.min() >= 0.5 and M.max() < 2.0

    def test_parse(self):
        d = Distribution.parse("uniform_real:0.5:2")
        assert (d.kind, d.lo, d.hi) == ("uniform_real", 0.5, 2.0)
        assert str(Distribution.parse("uniform_int:1:9")) == "uniform_int:1:9"

    @pytest.mark.parametrize("text", ["gauss:0:1", "uniform_int:1", "uniform_int:-1:3", "uniform_int:5:2",
                                      "uniform_real:1:1", "uniform_int:1.5:3"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            Distribution.parse(text)


class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"dims": ()}, {"dims": (1,)}, {"instances_per_dim": 0}, {"direction": "up"}, {"seed": -1},
        {"distribution": Distribution("uniform_int", 0, 3)},
    ])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig(**kw)

    def test_directions(self):
        assert ExperimentConfig(direction="both").directions == ("max", "min")
        assert ExperimentConfig(direction="min").directions == ("min",)


class TestRun:
    cfg = ExperimentConfig(dims=(5, 10), instances_per_dim=4, seed=11)

    def test_records(self):
        stats = run_convergence_experiment(self.cfg)
        assert len(stats.records) == 2 * 4 * 2
        assert not stats.errors
        assert all(r.sandwich_ok for r in stats.records)
        assert [s.dim for s in stats.per_dim] == [5, 10]
        assert stats.max_loops_observed == max(r.loops for r in stats.records)
        assert all(s.instance_count == 4 for s in stats.per_dim)

    def test_reproducible_csv(self):
        a = run_convergence_experiment(self.cfg).to_csv()
        b = run_convergence_experiment(self.cfg).to_csv()
        strip = lambda text: [row[:6] + row[7:] for row in csv.reader(io.StringIO(text))]
        assert strip(a) == strip(b)

    def test_csv_header(self):
        rows = list(csv.reader(io.StringIO(run_convergence_experiment(self.cfg).to_csv())))
        assert tuple(rows[0]) == CSV_HEADER
        assert len(rows) == 1 + 16
        assert float(rows[1][4]) > 0

    def test_workers_same_values(self):
        one = run_convergence_experiment(self.cfg)
        two = run_convergence_experiment(self.cfg, workers=2)
        assert [(r.dim, r.instance, r.direction, r.loops, r.rho) for r in one.records] == \
               [(r.dim, r.instance, r.direction, r.loops, r.rho) for r in two.records]

    def test_constant_rows_one_loop(self):
        cfg = ExperimentConfig(dims=(4, 8), instances_per_dim=5, seed=2)
        stats = run_convergence_experiment(cfg, matrix_factory=constant_rows)
        assert all(r.loops == 1 for r in stats.records)
        assert all(r.rho == pytest.approx(r.mean_row_sum) for r in stats.records)

    def test_oracle_check(self):
        cfg = ExperimentConfig(dims=(3,), instances_per_dim=10, seed=5)
        stats = run_convergence_experiment(cfg, oracle_check=True)
        assert sum(bool(r.oracle_match) for r in stats.records) == 20

    def test_loop_count_warning(self):
        cfg = ExperimentConfig(dims=(6,), instances_per_dim=1, seed=0, max_loops=64)
        import permperron.experiments as ex
        orig = ex.EXPECTED_MAX_LOOPS
        try:
            ex.EXPECTED_MAX_LOOPS = 0
            with pytest.warns(LoopCountWarning):
                run_convergence_experiment(cfg)
        finally:
            ex.EXPECTED_MAX_LOOPS = orig

    def test_failures_recorded(self):
        cfg = ExperimentConfig(dims=(3,), instances_per_dim=2, seed=0)
        stats = run_convergence_experiment(cfg, matrix_factory=lambda n, i, rng: np.eye(n))
        assert len(stats.errors) == 4
        assert all("PreconditionFailed" in r.error for r in stats.errors)
