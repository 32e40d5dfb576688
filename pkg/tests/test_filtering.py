import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import qduality as q
from qduality.errors import MonotonicityViolation, NotConverged, SingularMarginal
from qduality.harness import trial_rng
from qduality.knowledge import fibonacci_sphere
from qduality.measurement import MeasurementAxis
from qduality.states import PSI_MINUS, bell_weights, product_state

from conftest import random_states, random_unitary

seeds = st.integers(0, 2**31 - 1)
SINGLET = q.bell_mixture(1, 0, 0, 0)


def _bias(s):
    b = q.bloch_decompose(s)
    return np.linalg.norm(b.n) + np.linalg.norm(b.m)


class TestExamples:
    @pytest.mark.parametrize("p", [(0.6, 0.2, 0.1, 0.1), (0.25, 0.25, 0.25, 0.25), (0.1, 0.1, 0.1, 0.7)])
    def test_bell_diagonal_is_fixed(self, p):
        out = q.filter_to_bell_diagonal(q.bell_mixture(*p))
        assert out.iterations == 0
        assert out.success_prob == 1.0
        assert_allclose(out.total_filter_S.f, np.eye(2))
        assert_allclose(out.total_filter_M.f, np.eye(2))
        assert_allclose(out.state.rho, q.bell_mixture(*p).rho, atol=1e-15)

    def test_pure_state_to_singlet(self):
        s = q.pure_schmidt(0.8)
        out = q.filter_to_bell_diagonal(s)
        assert out.converged
        assert out.state.fidelity_with(PSI_MINUS) == pytest.approx(1, abs=1e-8)
        assert out.bell_before == pytest.approx(2 * np.sqrt(1 + 4 * 0.16))
        assert out.bell_after == pytest.approx(2 * np.sqrt(2))
        assert out.success_prob == pytest.approx(0.4, abs=1e-8)

    @pytest.mark.parametrize("R", [0.2, 0.5, 0.9])
    def test_werner_unchanged(self, R):
        out = q.filter_to_bell_diagonal(q.werner(R))
        assert out.iterations == 0
        assert out.bell_after == pytest.approx(out.bell_before)

    def test_product_state_rejected(self):
        s = product_state(np.diag([1.0, 0]), np.eye(2) / 2)
        with pytest.raises(SingularMarginal):
            q.filter_to_bell_diagonal(s)

    def test_not_converged(self, caplog):
        s = q.random_state(5, 4)
        with caplog.at_level(logging.WARNING):
            out = q.filter_to_bell_diagonal(s, max_iter=1)
        assert not out.converged and out.iterations == 1
        assert "did not converge" in caplog.text
        with pytest.raises(NotConverged) as exc:
            q.filter_to_bell_diagonal(s, max_iter=1, raise_on_fail=True)
        assert exc.value.outcome.iterations == 1


class TestInvariants:
    @given(seeds)
    @settings(max_examples=40)
    def test_output_bell_diagonal(self, seed):
        out = q.filter_to_bell_diagonal(q.random_state(seed, 4))
        assert out.converged
        b = q.bloch_decompose(out.state)
        assert _bias(out.state) <= 1e-8
        assert_allclose(b.T - np.diag(np.diag(b.T)), 0, atol=1e-9)
        assert 0 < out.success_prob <= 1

    @given(seeds, st.sampled_from([2, 3, 4]))
    @settings(max_examples=30)
    def test_success_probability_matches_total_filter(self, seed, rank):
        s = q.random_state(seed, rank)
        out = q.filter_to_bell_diagonal(s)
        big = np.kron(out.total_filter_S.f, out.total_filter_M.f)
        unnorm = big @ s.rho @ big.conj().T
        p = np.trace(unnorm).real
        assert out.success_prob == pytest.approx(p, rel=1e-10, abs=1e-12)
        assert_allclose(unnorm / p, out.state.rho, atol=1e-10)

    def test_rank_deficient_needs_more_iterations(self):
        # a rank-3 input keeps one Bell weight at zero; a small second weight slows convergence
        s = q.random_state(np.random.default_rng([77, 3, 148]), 3)
        assert not q.filter_to_bell_diagonal(s).converged
        out = q.filter_to_bell_diagonal(s, max_iter=5000)
        assert out.converged and out.iterations > 1000
        assert np.sort(bell_weights(out.state))[0] == pytest.approx(0, abs=1e-9)

    def test_filters_are_physical(self):
        for s in random_states(20, seed=2, ranks=(4,)):
            out = q.filter_to_bell_diagonal(s)
            for f in (out.total_filter_S.f, out.total_filter_M.f):
                assert np.linalg.norm(f, 2) <= 1 + 1e-12

    def test_idempotent(self):
        for s in random_states(20, seed=7, ranks=(2, 3, 4)):
            out = q.filter_to_bell_diagonal(s)
            again = q.filter_to_bell_diagonal(out.state)
            assert again.iterations <= 1
            assert again.success_prob == pytest.approx(1, abs=1e-7)
            assert_allclose(again.state.rho, out.state.rho, atol=1e-8)

    def test_output_has_no_apriori_knowledge(self):
        axes = fibonacci_sphere(50)
        for s in random_states(10, seed=8, ranks=(4,)):
            out = q.filter_to_bell_diagonal(s)
            for a in axes:
                assert q.apriori_knowledge(out.state, MeasurementAxis(a)) <= 1e-8

    def test_unique_up_to_local_unitaries(self):
        for i, s in enumerate(random_states(15, seed=9, ranks=(4,))):
            rotated = q.apply_local_unitary(s, random_unitary(2 * i), random_unitary(2 * i + 1))
            a = q.filter_to_bell_diagonal(s)
            b = q.filter_to_bell_diagonal(rotated)
            assert_allclose(np.abs(q.normal_form(a.state).tbar), np.abs(q.normal_form(b.state).tbar), atol=1e-7)
            assert_allclose(np.sort(bell_weights(a.state)), np.sort(bell_weights(b.state)), atol=1e-7)
            assert a.success_prob == pytest.approx(b.success_prob, rel=1e-6)


class TestMonotonicity:
    def test_singlet(self):
        r = q.verify_filter_monotonicity(SINGLET)
        assert r.bell_before == pytest.approx(2 * np.sqrt(2))
        assert r.bell_after == pytest.approx(2 * np.sqrt(2))

    @pytest.mark.parametrize("lam", [0.55, 0.7, 0.9, 0.99])
    def test_pure_strict_increase(self, lam):
        r = q.verify_filter_monotonicity(q.pure_schmidt(lam))
        assert r.bell_after > r.bell_before + 1e-6
        assert r.success_prob == pytest.approx(2 * (1 - lam), abs=1e-7)

    def test_violating_inputs_never_decrease(self):
        # full-rank mixtures dominated by a random pure state mostly violate
        rng = np.random.default_rng(10)
        n = 0
        for _ in range(300):
            mix = 0.85 * q.random_state(rng, 1).rho + 0.15 * q.random_state(rng, 4).rho
            s = q.validate(mix)
            if q.bell_max(s) <= 2:
                continue
            assert q.verify_filter_monotonicity(s).monotone
            n += 1
        assert n >= 100

    def test_non_violating_input_can_decrease(self):
        """Filtering can lower a sub-classical Bell factor; the strict check reports it."""
        s = q.random_state(trial_rng(0, 26), 4)
        assert q.bell_max(s) < 2
        with pytest.raises(MonotonicityViolation) as exc:
            q.verify_filter_monotonicity(s)
        rep = exc.value.report
        assert rep.bell_after < rep.bell_before - 1e-3
        assert not q.verify_filter_monotonicity(s, strict=False).monotone

    def test_debug_trace(self):
        out = q.filter_to_bell_diagonal(q.pure_schmidt(0.9), debug=True)
        assert len(out.bell_trace) == out.iterations + 1
        assert out.bell_trace[0] == pytest.approx(out.bell_before)
        assert np.all(np.diff(out.bell_trace) >= -1e-9)
