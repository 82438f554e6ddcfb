"""Stochastic dephasing engine: OU statistics, propagation, ensembles."""
import numpy as np
import pytest

from aht.codes import build_code
from aht.config import ValidationError
from aht.decoupling import named_sequence
from aht.noise import (
    NoiseScenario,
    build_scenario,
    ensemble_coherence,
    final_error,
    ou_trajectory,
    propagate_trajectory,
    trajectory_propagator,
)
from aht.operators import Operator, single_qubit


class TestOuTrajectory:
    def test_zero_amplitude(self):
        assert np.array_equal(ou_trajectory(1.0, 0.0, 0.05, 100, seed=1), np.zeros(100))

    def test_deterministic_for_seed(self):
        a = ou_trajectory(2.0, 0.5, 0.1, 1000, seed=42)
        b = ou_trajectory(2.0, 0.5, 0.1, 1000, seed=42)
        assert np.array_equal(a, b)

    def test_autocorrelation_at_one_correlation_time(self):
        # oracle: closed-form OU autocorrelation amp^2 exp(-lag/tau)
        amp, tau, dt = 0.7, 1.0, 0.1
        x = ou_trajectory(tau, amp, dt, 1_000_000, seed=11)
        lag = int(tau / dt)
        estimate = float(np.mean(x[:-lag] * x[lag:]))
        assert estimate == pytest.approx(amp**2 / np.e, rel=0.05)

    def test_stationary_variance(self):
        x = ou_trajectory(1.0, 0.5, 0.1, 500_000, seed=3)
        assert float(np.var(x)) == pytest.approx(0.25, rel=0.05)

    def test_rejects_coarse_step(self):
        with pytest.raises(ValidationError):
            ou_trajectory(1.0, 0.5, 0.2, 10, seed=0)


def slow_only_scenario(**over):
    kw = dict(
        encoded=True, fast_amplitude=0.0, slow_amplitude=0.2, omega1=0.0, omega2=0.0,
        repetitions=4, ensemble_size=50, seed=5, pulses=False,
    )
    kw.update(over)
    return build_scenario("hybrid_dephasing", **kw)


class TestPropagation:
    def test_free_precession_closed_form(self):
        # no noise, no pulses: |+_L> precesses at delta_omega exactly
        sc = build_scenario(
            "hybrid_dephasing", encoded=True, fast_amplitude=0.0, slow_amplitude=0.0,
            omega1=1.4, omega2=0.6, repetitions=4, ensemble_size=1, seed=0, pulses=False,
        )
        res = propagate_trajectory(sc)
        code = build_code("dfs2")
        obs = code.observable("x").matrix
        delta = (1.4 - 0.6) / 2
        for t, psi in zip(res.times, res.states):
            got = (psi.conj() @ obs @ psi).real
            assert got == pytest.approx(np.cos(2 * delta * t), abs=1e-10)

    def test_collective_noise_invariance_is_exact(self):
        sc = build_scenario(
            "hybrid_dephasing", encoded=True, fast_amplitude=2.0, slow_amplitude=0.0,
            omega1=0.9, omega2=0.9, repetitions=4, ensemble_size=1, seed=7, pulses=False,
        )
        res = propagate_trajectory(sc, trajectory=0)
        assert np.array_equal(res.final_state, sc.initial_state)

    def test_fast_cp_preserves_coherence(self):
        # slow channel with many encoded pulses per correlation time
        sc = build_scenario(
            "hybrid_dephasing", encoded=True, fast_amplitude=0.0, slow_amplitude=0.5,
            tau_slow=50.0, cycle_time=0.25, repetitions=64, ensemble_size=200, seed=9,
        )
        curve = ensemble_coherence(sc)
        assert curve.mean[-1] > 0.99
        free = build_scenario(
            "hybrid_dephasing", encoded=True, fast_amplitude=0.0, slow_amplitude=0.5,
            tau_slow=50.0, cycle_time=0.25, repetitions=64, ensemble_size=200, seed=9,
            pulses=False,
        )
        assert ensemble_coherence(free).mean[-1] < 0.5

    def test_trajectory_propagator_is_unitary(self):
        sc = slow_only_scenario(pulses=True, ensemble_size=1)
        from aht.noise import _build_grid  # test hook: sample the exact grid

        grid = _build_grid(sc)
        rng = np.random.default_rng(0)
        noise = rng.normal(0, 0.3, size=(len(sc.channels), grid.durations.shape[0]))
        u = trajectory_propagator(sc, noise)
        assert u.is_unitary()

    def test_explicit_noise_shape_checked(self):
        sc = slow_only_scenario()
        with pytest.raises(ValidationError):
            propagate_trajectory(sc, noise_values=np.zeros((1, 3)))


class TestEnsemble:
    def test_flat_curve_without_noise(self):
        sc = slow_only_scenario(slow_amplitude=0.0, ensemble_size=20)
        curve = ensemble_coherence(sc)
        assert np.allclose(curve.mean, 1.0, atol=1e-10)
        assert np.allclose(curve.std_error, 0.0, atol=1e-12)

    def test_gaussian_short_time_exponent(self):
        # oracle: cumulant expansion of Gaussian phase noise, exponent 2
        sc = slow_only_scenario(
            slow_amplitude=0.2, tau_slow=20.0, repetitions=4, ensemble_size=2000, seed=9
        )
        curve = ensemble_coherence(sc)
        mask = (curve.times > 0.3) & (curve.times <= 2.0)
        slope = np.polyfit(
            np.log(curve.times[mask]), np.log(-np.log(curve.mean[mask])), 1
        )[0]
        assert 1.8 <= slope <= 2.2

    def test_bit_reproducible(self):
        sc = slow_only_scenario(pulses=True, ensemble_size=64)
        a = ensemble_coherence(sc)
        b = ensemble_coherence(sc)
        assert np.array_equal(a.mean, b.mean)
        assert np.array_equal(a.std_error, b.std_error)

    def test_standard_error_scales_with_ensemble(self):
        small = ensemble_coherence(slow_only_scenario(ensemble_size=200))
        large = ensemble_coherence(slow_only_scenario(ensemble_size=400))
        ratio = np.mean(small.std_error[1:]) / np.mean(large.std_error[1:])
        assert 1.25 <= ratio <= 1.6

    def test_ensemble_density_matrix_is_physical(self):
        sc = slow_only_scenario(ensemble_size=40, pulses=True)
        states = []
        for k in range(8):
            states.append(propagate_trajectory(sc, trajectory=k).final_state)
        rho = sum(np.outer(s, s.conj()) for s in states) / len(states)
        assert np.allclose(rho, rho.conj().T, atol=1e-12)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-10

    def test_csv_emission(self):
        sc = slow_only_scenario(ensemble_size=10)
        curve = ensemble_coherence(sc)
        text = curve.to_csv(sc.describe())
        lines = text.splitlines()
        assert lines[0].startswith("# {")
        assert lines[1] == "time_s,mean_coherence,std_error,n_traj"
        assert len(lines) == 2 + len(curve.times)


class TestScenarioLibrary:
    def test_unknown_name(self):
        with pytest.raises(ValidationError):
            build_scenario("telegraph")

    def test_schedule_total_time_consistency_enforced(self):
        code = build_code("dfs2")
        with pytest.raises(ValidationError):
            NoiseScenario(
                name="bad",
                h_system=Operator.zero(4),
                channels=(),
                code=code,
                schedule=named_sequence("cp_x", code=code, cycle_time=1.0, physical=True),
                repetitions=3,
                ensemble_size=10,
                total_time=2.0,
                seed=0,
                initial_state=code.plus_state(),
                observable=code.observable("x"),
            )

    def test_encoded_depolarizing_annihilates_both_channels(self):
        from aht.decoupling import average_zeroth, frames_from_scheme

        sc = build_scenario("encoded_depolarizing", ensemble_size=10)
        frames = frames_from_scheme(sc.schedule)
        for ch in sc.channels:
            avg = average_zeroth(ch.coupling, frames)
            assert np.max(np.abs(avg.matrix)) < 1e-10

    def test_encoded_depolarizing_suppression(self):
        free = build_scenario(
            "encoded_depolarizing", pulses=False, slow_amplitude=0.3, repetitions=8,
            ensemble_size=150, seed=3,
        )
        driven = build_scenario(
            "encoded_depolarizing", pulses=True, slow_amplitude=0.3, repetitions=8,
            ensemble_size=150, seed=3,
        )
        assert final_error(ensemble_coherence(driven)) < 0.3 * final_error(ensemble_coherence(free))

    def test_encoded_spin_boson_drift_is_logical(self):
        from aht.codes import logical_action

        sc = build_scenario("encoded_spin_boson", delta_omega=0.4, j_drift=0.3, ensemble_size=10)
        act = logical_action(sc.h_system, build_code("dfs2"))
        assert act.preserves_code
        expected = 0.4 * np.diag([1.0, -1.0]) + 0.3 * np.array([[0, 1], [1, 0]])
        assert np.allclose(act.logical_part.matrix, expected, atol=1e-12)

    def test_four_qubit_blockwise_protects_block_collective(self):
        sc = build_scenario(
            "four_qubit_blockwise", slow_amplitude=0.0, fast_amplitude=2.0,
            omegas=(0.5, 0.5, 0.5, 0.5), repetitions=2, ensemble_size=1, pulses=False, seed=1,
        )
        res = propagate_trajectory(sc)
        assert np.array_equal(res.final_state, sc.initial_state)

    def test_error_generators_restrict_to_logical_z(self):
        code = build_code("dfs2")
        z_l = code.observable("z").matrix
        r1 = code.restrict(single_qubit("Z", 1, 2))
        r2 = code.restrict(single_qubit("Z", 2, 2))
        assert np.array_equal(r1, code.restrict(z_l))
        assert np.array_equal(r1, -r2)
