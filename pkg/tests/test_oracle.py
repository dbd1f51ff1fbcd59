import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from permperron.core import in_omega, mean_row_sum, permute_cols, permute_rows
from permperron.exceptions import DimensionTooLarge
from permperron.oracle import distinct_row_permutations, enumerate_omega, omega_size, oracle_extremes
from permperron.spectral import perron

from .conftest import EXAMPLE_A, EXAMPLE_RHO_MAX, EXAMPLE_WITNESS, rho_2x2


def brute_force_members(A):
    """Every combination of per-row orderings, duplicates removed."""
    n = A.shape[0]
    seen = set()
    for perms in itertools.product(itertools.permutations(range(n)), repeat=n):
        B = tuple(tuple(A[i, list(p)]) for i, p in enumerate(perms))
        seen.add(B)
    return seen


class TestEnumeration:
    def test_distinct_2x2(self):
        assert len(list(enumerate_omega([[1, 2], [3, 4]]))) == 4

    def test_repeated_entries_2x2(self):
        assert len(list(enumerate_omega([[1, 1], [3, 4]]))) == 2

    def test_3x3_distinct(self):
        A = np.arange(1, 10, dtype=float).reshape(3, 3)
        assert len(list(enumerate_omega(A))) == math.factorial(3) ** 3 == 216

    def test_constant_rows(self):
        assert len(list(enumerate_omega([[3, 3], [5, 5]]))) == 1

    @pytest.mark.parametrize("A", [
        [[1, 1, 2], [0, 0, 0], [1, 2, 3]],
        [[2, 2, 2], [1, 2, 1], [5, 0, 5]],
        [[0, 1], [1, 0]],
    ])
    def test_matches_brute_force(self, A):
        A = np.asarray(A, dtype=float)
        members = list(enumerate_omega(A))
        as_tuples = {tuple(map(tuple, B)) for B in members}
        assert len(as_tuples) == len(members)
        assert as_tuples == brute_force_members(A)
        assert omega_size(A) == len(members)
        assert all(in_omega(B, A) for B in members)

    def test_size_formula(self):
        # rows with multiplicities (2,1), (3), (1,1,1)
        A = [[1, 1, 2], [4, 4, 4], [1, 2, 3]]
        assert omega_size(A) == 3 * 1 * 6

    def test_row_permutations_sorted(self):
        perms = distinct_row_permutations([2, 1, 1])
        assert_array_equal(perms, [[1, 1, 2], [1, 2, 1], [2, 1, 1]])

    def test_too_large(self):
        with pytest.raises(DimensionTooLarge, match=r"\(n!\)\^n = 216"):
            enumerate_omega(np.ones((3, 3)), limit_n=2)
        with pytest.raises(DimensionTooLarge):
            oracle_extremes(np.ones((5, 5)))


class TestExtremes:
    def test_2x2_closed_form(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        rep = oracle_extremes(A)
        closed = [rho_2x2(B) for B in enumerate_omega(A)]
        assert rep.max_rho == pytest.approx(max(closed), abs=1e-12)
        assert rep.min_rho == pytest.approx(min(closed), abs=1e-12)
        assert rep.max_rho == pytest.approx((5 + math.sqrt(33)) / 2, abs=1e-12)
        assert_array_equal(rep.argmin, [[2, 1], [4, 3]])
        assert rep.count == 4

    def test_constant_rows_collapse(self):
        rep = oracle_extremes([[3, 3], [5, 5]])
        assert rep.count == 1
        assert rep.min_rho == rep.max_rho == pytest.approx(8.0)
        assert rep.mean_row_sum == 8.0

    def test_witnesses_achieve_extremes(self, rng):
        A = rng.integers(1, 10, (3, 3)).astype(float)
        rep = oracle_extremes(A)
        assert in_omega(rep.argmax, A) and in_omega(rep.argmin, A)
        assert perron(rep.argmax).rho == pytest.approx(rep.max_rho, rel=1e-12)
        assert perron(rep.argmin).rho == pytest.approx(rep.min_rho, rel=1e-12)

    def test_chunking_does_not_change_result(self, rng, monkeypatch):
        from permperron import oracle
        A = rng.integers(1, 4, (3, 3)).astype(float)
        full = oracle_extremes(A)
        monkeypatch.setattr(oracle, "CHUNK", 7)
        small = oracle_extremes(A)
        assert (small.min_rho, small.max_rho, small.count) == (full.min_rho, full.max_rho, full.count)
        assert_array_equal(small.argmax, full.argmax)
        assert_array_equal(small.argmin, full.argmin)

    def test_mean_sandwich(self, rng, quiet):
        # nonnegative entries with zeros allowed
        for _ in range(200):
            n = int(rng.integers(2, 5))
            A = rng.integers(0, 6, (n, n)).astype(float)
            if not A.any():
                continue
            rep = oracle_extremes(A)
            assert rep.min_rho - 1e-9 <= mean_row_sum(A) <= rep.max_rho + 1e-9

    def test_invariance(self, rng):
        for _ in range(20):
            A = rng.integers(1, 10, (3, 3)).astype(float)
            p = rng.permutation(3)
            base = oracle_extremes(A)
            for B in (permute_rows(p, A), permute_cols(A, p)):
                rep = oracle_extremes(B)
                assert rep.max_rho == pytest.approx(base.max_rho, abs=1e-9)
                assert rep.min_rho == pytest.approx(base.min_rho, abs=1e-9)


@pytest.mark.slow
def test_worked_example_exhaustive():
    # about 32.4 million members; a few minutes on one core
    rep = oracle_extremes(EXAMPLE_A, limit_n=5)
    assert rep.count == omega_size(EXAMPLE_A)
    assert rep.max_rho == pytest.approx(20.986254665431506, abs=1e-9)
    assert rep.max_rho == pytest.approx(EXAMPLE_RHO_MAX, abs=1e-3)
    assert rep.min_rho == pytest.approx(18.593550190497307, abs=1e-9)
    assert_array_equal(rep.argmax, EXAMPLE_WITNESS)
