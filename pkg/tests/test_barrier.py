"""Barrier values, Aubry structure and the cost axioms."""

import numpy as np
import pytest

from tropikam import (
    InconsistencyError,
    NormalizationError,
    Tolerances,
    check_barrier_composition,
    check_cost_axioms,
    normalize,
    peierls_barrier,
    peierls_barrier_oracle,
    shortest_walk_closure,
)
from tropikam.minplus import CostKernel

from conftest import G3_BARRIER, make_integer_kernel, make_random_kernel


def barrier_of(kernel):
    normalized, critical = normalize(kernel)
    return peierls_barrier(normalized, critical_value=critical)


class TestPeierlsBarrier:
    def test_g3_golden(self, g3_barrier):
        assert np.array_equal(g3_barrier.barrier, G3_BARRIER)
        assert g3_barrier.aubry == (0,)
        assert g3_barrier.d_edges == ((0, 0),)
        assert g3_barrier.critical_value == 0.0

    def test_metric_barrier_is_cost(self, metric5):
        bd = barrier_of(metric5)
        assert np.max(np.abs(bd.barrier - metric5.matrix)) <= 1e-12
        assert bd.aubry == tuple(range(5))
        assert set(bd.d_edges) == {(i, i) for i in range(5)}

    def test_single_point(self):
        bd = barrier_of(CostKernel.from_matrix([[7.0]]))
        assert bd.barrier[0, 0] == 0.0
        assert bd.aubry == (0,)
        assert bd.d_edges == ((0, 0),)

    def test_requires_normalized(self, g3):
        with pytest.raises(NormalizationError):
            peierls_barrier(CostKernel.from_matrix(g3.matrix + 1.0))

    def test_empty_aubry_raises(self):
        # cycle mean is 5e-4: inside a loose normalization gate, but all
        # self-walk costs stay strictly above the Aubry threshold
        near = CostKernel.from_matrix([[0.5, 0.1], [-0.1 + 1e-3, 0.5]])
        with pytest.raises(InconsistencyError):
            peierls_barrier(near, Tolerances(eps_num=1e-2, eps_aubry=1e-7))

    def test_two_cycle_structure(self, two_cycle):
        bd = barrier_of(two_cycle)
        assert bd.aubry == (0, 1)
        assert set(bd.d_edges) == {(0, 1), (1, 0)}
        assert np.max(np.abs(bd.barrier)) == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_diagonal_and_symmetrization_nonnegative(self, seed):
        bd = barrier_of(make_random_kernel(7, seed=seed))
        assert np.min(np.diag(bd.barrier)) >= -1e-9
        assert np.min(bd.barrier + bd.barrier.T) >= -1e-9

    @pytest.mark.parametrize("seed", range(10))
    def test_aubry_definitions_agree(self, seed):
        bd = barrier_of(make_random_kernel(6, seed=seed))
        walk = shortest_walk_closure(bd.kernel.matrix)
        from_walk = set(np.flatnonzero(np.abs(np.diag(walk)) <= bd.tolerances.eps_aubry))
        from_barrier = set(
            np.flatnonzero(np.abs(np.diag(bd.barrier)) <= bd.tolerances.eps_aubry)
        )
        assert from_walk == from_barrier == set(bd.aubry)

    @pytest.mark.parametrize("seed", range(10))
    def test_d_edges_inside_aubry_square(self, seed):
        bd = barrier_of(make_random_kernel(6, seed=seed + 50))
        for x, y in bd.d_edges:
            assert x in bd.aubry and y in bd.aubry


class TestOracle:
    def test_metric_any_window(self, metric5):
        bd = barrier_of(metric5)
        oracle = peierls_barrier_oracle(bd.kernel, 3, 6)
        assert oracle.stabilized
        assert np.max(np.abs(oracle.barrier - metric5.matrix)) <= 1e-12

    def test_g3_window(self, g3_barrier):
        oracle = peierls_barrier_oracle(g3_barrier.kernel, 8, 16)
        assert oracle.stabilized
        assert np.array_equal(oracle.barrier, g3_barrier.barrier)

    def test_single_point(self):
        bd = barrier_of(CostKernel.from_matrix([[0.0]]))
        oracle = peierls_barrier_oracle(bd.kernel, 2, 4)
        assert oracle.barrier[0, 0] == 0.0

    def test_window_validation(self, g3_barrier):
        with pytest.raises(ValueError):
            peierls_barrier_oracle(g3_barrier.kernel, 4, 6)

    def test_creeping_powers_flagged(self):
        # tiny positive self-loop beside an expensive round trip: the
        # power sequence climbs toward its liminf, so narrow windows
        # underreport and must be flagged, not silently accepted
        slow = CostKernel.from_matrix([[0.0, 3.0], [3.0, 0.05]])
        bd = peierls_barrier(slow)
        assert bd.barrier[1, 1] == pytest.approx(6.0)
        narrow = peierls_barrier_oracle(slow, 8, 16)
        assert not narrow.stabilized
        wide = peierls_barrier_oracle(slow, 150, 300)
        assert wide.stabilized
        assert wide.barrier[1, 1] == pytest.approx(6.0)

    @pytest.mark.parametrize("seed", range(15))
    def test_closure_formula_matches_windowed_liminf(self, seed):
        kernel = make_integer_kernel(int(np.random.default_rng(seed).integers(2, 9)), seed)
        bd = barrier_of(kernel)
        oracle = peierls_barrier_oracle(bd.kernel, 32, 64)
        assert oracle.stabilized
        assert np.max(np.abs(oracle.barrier - bd.barrier)) <= 1e-6


class TestAxioms:
    def test_metric(self, metric5):
        report = check_cost_axioms(barrier_of(metric5))
        assert report.triangle <= 1e-12
        assert report.factorization <= 1e-12
        assert report.passed

    def test_g3_exact(self, g3_barrier):
        report = check_cost_axioms(g3_barrier)
        assert report.triangle == 0.0
        assert report.factorization == 0.0

    @pytest.mark.parametrize("seed", range(100))
    def test_random_kernels(self, seed):
        bd = barrier_of(make_random_kernel(8, seed=seed))
        report = check_cost_axioms(bd)
        assert report.triangle <= 1e-9
        assert report.factorization <= 1e-9
        assert len(bd.aubry) >= 1

    @pytest.mark.parametrize("seed", range(5))
    def test_aubry_restriction_zero_diagonal(self, seed):
        # restricted to the Aubry set the barrier has zero diagonal and
        # keeps the triangle inequality
        bd = barrier_of(make_random_kernel(7, seed=seed + 7))
        idx = np.asarray(bd.aubry)
        sub = bd.barrier[np.ix_(idx, idx)]
        assert np.max(np.abs(np.diag(sub))) <= bd.tolerances.eps_aubry
        k = idx.size
        for i in range(k):
            for j in range(k):
                for l in range(k):
                    assert sub[i, l] <= sub[i, j] + sub[j, l] + 1e-9


class TestComposition:
    def test_metric_exact(self, metric5):
        report = check_barrier_composition(barrier_of(metric5), 1)
        assert report.passed
        assert max(report.left, report.right) <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_g3_exact(self, g3_barrier, n):
        report = check_barrier_composition(g3_barrier, n)
        assert report.left == 0.0 and report.right == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_random_kernels(self, seed):
        bd = barrier_of(make_random_kernel(8, seed=seed + 100))
        for n in (1, 2, 3):
            report = check_barrier_composition(bd, n)
            assert max(report.left, report.right) <= 1e-9
