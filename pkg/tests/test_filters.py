"""Step semantics, parameter validation, and trajectory invariants."""

import numpy as np
import pytest

from sparselms.filters import (
    ALGORITHMS,
    AdaptiveFilter,
    AlgoParams,
    FilterDivergedError,
    make_filter,
)
from sparselms.proximal import shrink


def _rand_sequence(n, steps, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((steps, n))
    F = rng.standard_normal(steps)
    return X, F


class TestAlgoParams:
    def test_constructors(self):
        assert AlgoParams.lms(0.1).variant == "lms"
        p = AlgoParams.olbi(0.1, 0.5)
        assert (p.delta, p.gamma) == (0.1, 0.5)
        assert AlgoParams.rza(0.1, 0.05, 10.0).eps == 10.0

    def test_delta_positive(self):
        with pytest.raises(ValueError, match="delta"):
            AlgoParams.lms(0.0)
        with pytest.raises(ValueError, match="delta"):
            AlgoParams.olbi(-1e-3, 0.5)

    def test_irrelevant_field_rejected(self):
        with pytest.raises(ValueError, match="gamma is not a parameter"):
            AlgoParams("lms", 0.1, gamma=0.5)
        with pytest.raises(ValueError, match="rho is not a parameter"):
            AlgoParams("olbi", 0.1, gamma=0.5, rho=0.1)

    def test_missing_field_rejected(self):
        with pytest.raises(ValueError, match="gamma is required"):
            AlgoParams("olbi", 0.1)
        with pytest.raises(ValueError, match="eps is required"):
            AlgoParams("rza", 0.1, rho=0.1)

    def test_field_ranges(self):
        with pytest.raises(ValueError, match="alpha"):
            AlgoParams.l0(0.1, 0.1, 0.0)
        with pytest.raises(ValueError, match="gamma"):
            AlgoParams.olbi(0.1, -0.5)
        with pytest.raises(ValueError, match="eps"):
            AlgoParams.rza(0.1, 0.1, -1.0)

    def test_unknown_variant(self):
        with pytest.raises(ValueError, match="unknown algorithm"):
            AlgoParams("nlms", 0.1)


class TestConstruction:
    def test_zero_initialized(self):
        f = make_filter(AlgoParams.lms(0.1), 3)
        np.testing.assert_array_equal(f.w, np.zeros(3))
        assert f.m is None and f.step_count == 0

    def test_olbi_has_accumulator(self):
        f = make_filter(AlgoParams.olbi(0.1, 0.5), 2)
        np.testing.assert_array_equal(f.w, np.zeros(2))
        np.testing.assert_array_equal(f.m, np.zeros(2))

    def test_bad_length(self):
        with pytest.raises(ValueError, match="positive integer"):
            make_filter(AlgoParams.lms(0.1), 0)


class TestStepValues:
    def test_lms_single_step(self):
        f = make_filter(AlgoParams.lms(0.1), 2)
        out = f.step(np.array([1.0, 0.0]), 1.0)
        assert (out.prediction, out.error) == (0.0, 1.0)
        np.testing.assert_array_equal(f.w, [0.1, 0.0])
        assert f.step_count == 1

    def test_olbi_single_step(self):
        f = make_filter(AlgoParams.olbi(0.5, 0.5), 2)
        f.step(np.array([1.0, 1.0]), 2.0)
        np.testing.assert_array_equal(f.m, [1.0, 1.0])
        np.testing.assert_array_equal(f.w, [0.5, 0.5])

    def test_za_pure_attraction(self):
        f = make_filter(AlgoParams.za(0.1, 0.05), 1)
        f.w[0] = 0.2
        out = f.step(np.array([0.0]), 0.0)
        assert out.error == 0.0
        np.testing.assert_allclose(f.w, [0.195])

    def test_l0_pure_attraction(self):
        f = make_filter(AlgoParams.l0(0.1, 0.1, 5.0), 1)
        f.w[0] = 0.1
        f.step(np.array([0.0]), 0.0)
        # attraction is delta*kappa*(alpha^2 z - alpha) = 0.01 * -2.5
        np.testing.assert_allclose(f.w, [0.075])

    def test_error_consistent_with_prediction(self):
        f = make_filter(AlgoParams.lms(0.01), 8)
        X, F = _rand_sequence(8, 50, 0)
        for j in range(50):
            out = f.step(X[j], F[j])
            assert out.error == F[j] - out.prediction

    def test_dimension_mismatch(self):
        f = make_filter(AlgoParams.lms(0.1), 3)
        with pytest.raises(ValueError, match="shape"):
            f.step(np.array([1.0, 2.0]), 0.0)

    def test_no_op_when_error_and_attractor_zero(self):
        for params in (
            AlgoParams.lms(0.1),
            AlgoParams.olbi(0.1, 0.5),
            AlgoParams.za(0.1, 0.05),
            AlgoParams.rza(0.1, 0.05, 10.0),
            AlgoParams.l0(0.1, 0.05, 5.0),
        ):
            f = make_filter(params, 2)
            f.step(np.array([0.0, 0.0]), 0.0)
            np.testing.assert_array_equal(f.w, [0.0, 0.0])


class TestOlbiInvariants:
    def test_coupling_after_every_step(self):
        gamma = 0.3
        f = make_filter(AlgoParams.olbi(0.05, gamma), 16)
        X, F = _rand_sequence(16, 400, 1)
        for j in range(400):
            f.step(X[j], F[j])
            np.testing.assert_array_equal(f.w, shrink(f.m, gamma))

    def test_gamma_zero_bit_identical_to_lms(self):
        n, steps = 32, 2000
        X, F = _rand_sequence(n, steps, 2)
        lms = make_filter(AlgoParams.lms(0.01), n)
        olbi = make_filter(AlgoParams.olbi(0.01, 0.0), n)
        lms.run_block(X, F)
        olbi.run_block(X, F)
        assert lms.w.tobytes() == olbi.w.tobytes()

    def test_step_coupling_eta_in_unit_interval(self):
        # weight increments move with, and no farther than, accumulator
        # increments, componentwise
        f = make_filter(AlgoParams.olbi(0.05, 0.4), 32)
        X, F = _rand_sequence(32, 500, 3)
        for j in range(500):
            w_prev, m_prev = f.w.copy(), f.m.copy()
            f.step(X[j], F[j])
            dw = f.w - w_prev
            dm = f.m - m_prev
            assert np.all(dw * dm >= 0.0)
            assert np.all(np.abs(dw) <= np.abs(dm) + 1e-18)


class TestReductions:
    def test_za_rho_zero_is_lms(self):
        n, steps = 16, 1000
        X, F = _rand_sequence(n, steps, 4)
        lms = make_filter(AlgoParams.lms(0.02), n)
        za = make_filter(AlgoParams.za(0.02, 0.0), n)
        lms.run_block(X, F)
        za.run_block(X, F)
        assert lms.w.tobytes() == za.w.tobytes()

    def test_rza_rho_zero_is_lms(self):
        n, steps = 16, 1000
        X, F = _rand_sequence(n, steps, 4)
        lms = make_filter(AlgoParams.lms(0.02), n)
        rza = make_filter(AlgoParams.rza(0.02, 0.0, 10.0), n)
        lms.run_block(X, F)
        rza.run_block(X, F)
        assert lms.w.tobytes() == rza.w.tobytes()

    def test_l0_kappa_zero_is_lms(self):
        n, steps = 16, 1000
        X, F = _rand_sequence(n, steps, 4)
        lms = make_filter(AlgoParams.lms(0.02), n)
        l0 = make_filter(AlgoParams.l0(0.02, 0.0, 5.0), n)
        lms.run_block(X, F)
        l0.run_block(X, F)
        assert lms.w.tobytes() == l0.w.tobytes()


class TestDeterminism:
    @pytest.mark.parametrize("variant", ALGORITHMS)
    def test_identical_inputs_identical_states(self, variant):
        params = {
            "lms": AlgoParams.lms(0.02),
            "olbi": AlgoParams.olbi(0.02, 0.3),
            "za": AlgoParams.za(0.02, 0.01),
            "rza": AlgoParams.rza(0.02, 0.01, 10.0),
            "l0": AlgoParams.l0(0.02, 0.01, 5.0),
        }[variant]
        X, F = _rand_sequence(24, 500, 5)
        a = make_filter(params, 24)
        b = make_filter(params, 24)
        a.run_block(X, F)
        b.run_block(X, F)
        assert a.w.tobytes() == b.w.tobytes()

    def test_step_equals_run_block(self):
        X, F = _rand_sequence(12, 200, 6)
        a = make_filter(AlgoParams.olbi(0.05, 0.2), 12)
        b = make_filter(AlgoParams.olbi(0.05, 0.2), 12)
        a.run_block(X, F)
        for j in range(200):
            b.step(X[j], F[j])
        assert a.w.tobytes() == b.w.tobytes()
        assert a.m.tobytes() == b.m.tobytes()


class TestDivergence:
    def test_unstable_lms_raises_with_step_index(self):
        X, F = _rand_sequence(64, 5000, 7)
        f = make_filter(AlgoParams.lms(1.0), 64)
        with pytest.raises(FilterDivergedError) as info:
            f.run_block(X, F)
        assert 1 <= info.value.step <= 5000
        assert f.step_count == info.value.step

    def test_step_index_consistent_across_block_sizes(self):
        X, F = _rand_sequence(64, 5000, 7)
        f1 = make_filter(AlgoParams.lms(1.0), 64)
        with pytest.raises(FilterDivergedError) as first:
            f1.run_block(X, F)
        f2 = make_filter(AlgoParams.lms(1.0), 64)
        with pytest.raises(FilterDivergedError) as second:
            for j in range(5000):
                f2.step(X[j], F[j])
        assert first.value.step == second.value.step


class TestObservers:
    def test_misalignment(self):
        f = make_filter(AlgoParams.lms(0.1), 2)
        assert f.misalignment(np.array([3.0, 4.0])) == 25.0
        f.w[:] = [3.0, 4.0]
        assert f.misalignment(np.array([3.0, 4.0])) == 0.0
        g = make_filter(AlgoParams.lms(0.1), 3)
        g.w[:] = [1.0, 0.0, 0.0]
        assert g.misalignment(np.array([0.0, 1.0, 0.0])) == 2.0

    def test_misalignment_dimension(self):
        f = make_filter(AlgoParams.lms(0.1), 2)
        with pytest.raises(ValueError, match="shape"):
            f.misalignment(np.zeros(3))

    def test_sparsity(self):
        f = make_filter(AlgoParams.lms(0.1), 3)
        f.w[:] = [0.0, 0.5, -0.2]
        assert f.sparsity(0.0) == 2
        fresh = make_filter(AlgoParams.olbi(0.1, 0.5), 5)
        assert fresh.sparsity(0.0) == 0
        g = make_filter(AlgoParams.lms(0.1), 2)
        g.w[:] = [1e-9, 1.0]
        assert g.sparsity(1e-6) == 1

    def test_olbi_exact_zeros(self):
        f = make_filter(AlgoParams.olbi(0.05, 0.8), 32)
        X, F = _rand_sequence(32, 200, 8)
        f.run_block(X, F)
        assert np.count_nonzero(f.w) == f.sparsity(0.0)
        assert np.count_nonzero(f.w) < 32  # threshold leaves true zeros
