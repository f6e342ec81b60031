"""Value-propagation operators and admissible pair machinery."""

import numpy as np
import pytest

from tropikam import (
    KamPair,
    LipschitzError,
    check_pair_characterization,
    complete_pair,
    is_a_lipschitz,
    is_admissible_pair,
    lax_oleinik_minus,
    lax_oleinik_plus,
    normalize,
    pair_from_lipschitz,
    peierls_barrier,
    random_c_lipschitz,
    tropical_power,
)

from conftest import make_random_kernel


def barrier_of(kernel):
    normalized, critical = normalize(kernel)
    return peierls_barrier(normalized, critical_value=critical)


class TestOperators:
    def test_metric_zero_is_fixed(self, metric5):
        zero = np.zeros(5)
        assert np.max(np.abs(lax_oleinik_minus(metric5, zero))) == 0.0
        assert np.max(np.abs(lax_oleinik_plus(metric5, zero))) == 0.0

    def test_g3_fixed_points(self, g3):
        phi1 = np.array([0.0, 1.0, 4.0])
        phi0 = np.array([0.0, -2.0, -1.0])
        assert np.array_equal(lax_oleinik_minus(g3, phi1), phi1)
        assert np.array_equal(lax_oleinik_plus(g3, phi0), phi0)

    def test_single_point_shift(self):
        from tropikam import CostKernel

        k = CostKernel.from_matrix([[0.0]])
        for t in (-3.0, 0.0, 2.5):
            assert lax_oleinik_minus(k, [t])[0] == t
            assert lax_oleinik_plus(k, [t])[0] == t

    @pytest.mark.parametrize("seed", range(8))
    def test_nonexpansive_monotone_additive(self, seed):
        kernel = make_random_kernel(6, seed=seed)
        rng = np.random.default_rng(seed + 1)
        u = rng.uniform(-2, 2, 6)
        v = rng.uniform(-2, 2, 6)
        for op in (lax_oleinik_minus, lax_oleinik_plus):
            assert np.max(np.abs(op(kernel, u) - op(kernel, v))) <= np.max(np.abs(u - v)) + 1e-12
            lower = np.minimum(u, v)
            assert np.all(op(kernel, lower) <= op(kernel, u) + 1e-12)
            t = float(rng.uniform(-1, 1))
            assert np.max(np.abs(op(kernel, u + t) - (op(kernel, u) + t))) <= 1e-12


class TestPairFromLipschitz:
    def test_g3_singleton_seed(self, g3_barrier):
        pair = pair_from_lipschitz(g3_barrier, [0.0])
        assert np.array_equal(pair.phi1, [0.0, 1.0, 4.0])
        assert np.array_equal(pair.phi0, [0.0, -2.0, -1.0])

    def test_metric_identity_pairs(self, metric5):
        bd = barrier_of(metric5)
        rng = np.random.default_rng(0)
        phi = random_c_lipschitz(bd, rng)
        pair = pair_from_lipschitz(bd, phi)
        assert np.max(np.abs(pair.phi0 - phi)) <= 1e-12
        assert np.max(np.abs(pair.phi1 - phi)) <= 1e-12

    def test_constant_shift_equivariance(self, g3_barrier):
        base = pair_from_lipschitz(g3_barrier, [0.0])
        shifted = pair_from_lipschitz(g3_barrier, [2.5])
        assert np.max(np.abs(shifted.phi0 - base.phi0 - 2.5)) <= 1e-12
        assert np.max(np.abs(shifted.phi1 - base.phi1 - 2.5)) <= 1e-12

    def test_rejects_non_lipschitz(self, metric5):
        bd = barrier_of(metric5)
        bad = np.zeros(5)
        bad[0] = 100.0
        with pytest.raises(LipschitzError) as err:
            pair_from_lipschitz(bd, bad)
        assert err.value.pair is not None

    @pytest.mark.parametrize("seed", range(10))
    def test_outputs_admissible(self, seed):
        bd = barrier_of(make_random_kernel(7, seed=seed))
        rng = np.random.default_rng(seed)
        pair = pair_from_lipschitz(bd, random_c_lipschitz(bd, rng))
        assert is_admissible_pair(bd, pair).passed
        idx = np.asarray(bd.aubry)
        assert np.max(np.abs(pair.phi0[idx] - pair.phi1[idx])) <= 1e-9
        assert np.all(pair.phi0 <= pair.phi1 + 1e-9)


class TestCompletePair:
    def test_g3(self, g3_barrier):
        pair = complete_pair(g3_barrier, [0.0, 1.0, 4.0])
        assert np.array_equal(pair.phi0, [0.0, -2.0, -1.0])

    def test_metric_identity(self, metric5):
        bd = barrier_of(metric5)
        rng = np.random.default_rng(5)
        phi = random_c_lipschitz(bd, rng)
        pair = complete_pair(bd, phi)
        assert np.max(np.abs(pair.phi0 - phi)) <= 1e-12

    def test_shift_equivariance(self, g3_barrier):
        base = complete_pair(g3_barrier, [0.0, 1.0, 4.0])
        shifted = complete_pair(g3_barrier, np.array([0.0, 1.0, 4.0]) + 1.5)
        assert np.max(np.abs(shifted.phi0 - base.phi0 - 1.5)) <= 1e-12

    def test_rejects_non_fixed_point(self, g3_barrier):
        with pytest.raises(LipschitzError):
            complete_pair(g3_barrier, [0.0, 0.0, 0.0])

    @pytest.mark.parametrize("seed", range(8))
    def test_unique_completion(self, seed):
        bd = barrier_of(make_random_kernel(6, seed=seed + 20))
        rng = np.random.default_rng(seed)
        pair = pair_from_lipschitz(bd, random_c_lipschitz(bd, rng))
        redone = complete_pair(bd, pair.phi1)
        assert np.max(np.abs(redone.phi0 - pair.phi0)) <= 1e-9
        # the envelope over the whole point set gives the same function
        envelope = np.max(pair.phi1[None, :] - bd.barrier, axis=1)
        assert np.max(np.abs(envelope - pair.phi0)) <= 1e-9


class TestAdmissibility:
    def test_g3_canonical(self, g3_barrier):
        pair = KamPair(phi0=[0.0, -2.0, -1.0], phi1=[0.0, 1.0, 4.0])
        assert is_admissible_pair(g3_barrier, pair).passed

    def test_g3_broken_pair_fails_at_point_one(self, g3_barrier):
        pair = KamPair(phi0=[0.0, 0.0, 0.0], phi1=[0.0, 1.0, 4.0])
        report = is_admissible_pair(g3_barrier, pair)
        assert not report.passed
        phi0 = np.max(np.asarray(pair.phi1)[None, :] - g3_barrier.barrier, axis=1)
        assert abs(phi0[1] - pair.phi0[1]) == 2.0

    def test_metric_diagonal_pairs(self, metric5):
        bd = barrier_of(metric5)
        rng = np.random.default_rng(2)
        phi = random_c_lipschitz(bd, rng)
        assert is_admissible_pair(bd, KamPair(phi0=phi, phi1=phi)).passed


class TestCharacterization:
    def test_g3_canonical(self, g3_barrier):
        pair = pair_from_lipschitz(g3_barrier, [0.0])
        report = check_pair_characterization(g3_barrier, pair)
        assert report.triple_holds and report.admissible.passed and report.equivalent

    def test_metric_identity_pair(self, metric5):
        bd = barrier_of(metric5)
        phi = np.zeros(5)
        report = check_pair_characterization(bd, KamPair(phi0=phi, phi1=phi))
        assert report.triple_holds and report.equivalent

    def test_perturbation_detected(self, g3_barrier):
        pair = pair_from_lipschitz(g3_barrier, [0.0])
        delta = 1e-3
        bumped = pair.phi0.copy()
        bumped[1] += delta  # off the Aubry set
        report = check_pair_characterization(g3_barrier, KamPair(phi0=bumped, phi1=pair.phi1))
        assert not report.triple_holds
        assert report.fixed_point_plus == pytest.approx(delta)
        assert report.equivalent  # both sides fail together

    @pytest.mark.parametrize("seed", range(10))
    def test_equivalence_on_random_kernels(self, seed):
        bd = barrier_of(make_random_kernel(6, seed=seed + 40))
        rng = np.random.default_rng(seed)
        for _ in range(5):
            pair = pair_from_lipschitz(bd, random_c_lipschitz(bd, rng))
            report = check_pair_characterization(bd, pair)
            assert report.equivalent and report.triple_holds

    @pytest.mark.parametrize("seed", range(5))
    def test_backward_fixed_point_barrier_relation(self, seed):
        # any backward fixed point satisfies phi1(x) = min_y phi1(y) + c(y, x)
        bd = barrier_of(make_random_kernel(6, seed=seed + 60))
        rng = np.random.default_rng(seed)
        pair = pair_from_lipschitz(bd, random_c_lipschitz(bd, rng))
        via_barrier = np.min(pair.phi1[:, None] + bd.barrier, axis=0)
        assert np.max(np.abs(via_barrier - pair.phi1)) <= 1e-9


class TestOneStepLipschitz:
    def test_barrier_row_passes(self, g3, g3_barrier):
        report = is_a_lipschitz(g3, g3_barrier.barrier[0, :])
        assert report.passed

    def test_constant_passes_iff_nonnegative(self, g3):
        assert is_a_lipschitz(g3, np.zeros(3)).passed

    def test_constructed_failure(self, g3):
        report = is_a_lipschitz(g3, [0.0, 10.0, 0.0])
        assert not report.passed
        assert report.pair == (0, 1)

    @pytest.mark.parametrize("seed", range(6))
    def test_one_step_implies_chain_and_barrier_lipschitz(self, seed):
        from tropikam import barrier_row

        kernel = make_random_kernel(5, seed=seed + 80)
        bd = barrier_of(kernel)
        phi = barrier_row(bd, seed % 5)
        assert is_a_lipschitz(bd.kernel, phi).passed
        for m in (2, 3):
            chained = tropical_power(bd.kernel.matrix, m)
            assert np.max(phi[None, :] - phi[:, None] - chained) <= 1e-9
        assert np.max(phi[None, :] - phi[:, None] - bd.barrier) <= 1e-9


class TestBijection:
    @pytest.mark.parametrize("seed", range(6))
    def test_roundtrip_recovers_seed(self, seed):
        # restricting the generated pair to the Aubry set gives back the
        # generating function: the parameterization is a bijection
        bd = barrier_of(make_random_kernel(7, seed=seed + 90))
        rng = np.random.default_rng(seed)
        phi = random_c_lipschitz(bd, rng)
        pair = pair_from_lipschitz(bd, phi)
        idx = np.asarray(bd.aubry)
        assert np.max(np.abs(pair.phi1[idx] - phi)) <= 1e-9
        assert np.max(np.abs(pair.phi0[idx] - phi)) <= 1e-9
        # completing the extracted backward potential is idempotent
        again = complete_pair(bd, pair.phi1)
        assert np.max(np.abs(again.phi0 - pair.phi0)) <= 1e-9
