"""Stochastic dephasing simulator for encoded bang-bang decoupling.

The bosonic baths of the open-system picture are replaced by classical
stationary Gaussian (Ornstein-Uhlenbeck) processes with matched
correlation times; pure dephasing under Gaussian noise reproduces the
decoupling suppression scaling in ``T_c / tau_c`` at desk scale without
a bath Hilbert space.  Each channel couples one Hermitian operator to
its own process; pulses are instantaneous (bang-bang limit) and inserted
exactly at schedule boundaries.

Determinism contract: every observable quantity is a pure function of
the scenario (including its seed).  Per-trajectory noise is drawn from
``SeedSequence(seed, channel_index, trajectory_index)``, so serial,
batched and resumed runs agree bit for bit and the ensemble mean is
independent of evaluation order up to float addition order, which is
fixed by the implementation.

Simulation steps honor ``dt <= min(tau_c / 20, T_c / 20)`` and always
align with interval boundaries; the noise is held constant across each
step at its midpoint value, and the per-step propagator is the exact
exponential of the frozen Hamiltonian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .codes import Code, build_code
from .config import DEFAULT_TOL, Tolerances, ValidationError
from .decoupling import DecouplingScheme, named_sequence
from .operators import Operator, single_qubit

__all__ = [
    "DephasingChannel",
    "NoiseScenario",
    "DecayCurve",
    "TrajectoryResult",
    "SCENARIO_NAMES",
    "ou_trajectory",
    "propagate_trajectory",
    "trajectory_propagator",
    "ensemble_coherence",
    "build_scenario",
    "final_error",
]

SCENARIO_NAMES = (
    "hybrid_dephasing",
    "encoded_spin_boson",
    "encoded_depolarizing",
    "four_qubit_blockwise",
)

CHANNEL_KINDS = ("collective_fast", "independent_slow", "logical")


@dataclass(frozen=True)
class DephasingChannel:
    """One classical noise line: Hermitian coupling times an OU process."""

    coupling: Operator
    correlation_time: float
    amplitude: float
    kind: str

    def __post_init__(self):
        if self.correlation_time <= 0:
            raise ValidationError("correlation_time must be positive")
        if self.amplitude < 0:
            raise ValidationError("amplitude must be nonnegative")
        if self.kind not in CHANNEL_KINDS:
            raise ValidationError(f"unknown channel kind {self.kind!r}")
        if not self.coupling.is_hermitian():
            raise ValidationError("coupling operator must be Hermitian")


@dataclass(frozen=True)
class NoiseScenario:
    """Full description of one stochastic run.

    ``total_time`` must equal ``repetitions * schedule.cycle_time``
    whenever a pulse schedule is attached.  ``max_step`` optionally caps
    the integration step below the default ``min(tau_c, T_c) / 20`` --
    useful for comparing runs on a common grid.
    """

    name: str
    h_system: Operator
    channels: tuple[DephasingChannel, ...]
    code: Code | None
    schedule: DecouplingScheme | None
    repetitions: int
    ensemble_size: int
    total_time: float
    seed: int
    initial_state: np.ndarray
    observable: Operator
    max_step: float | None = None
    record_points: int = 20
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        dim = self.h_system.dim
        if self.total_time <= 0:
            raise ValidationError("total_time must be positive")
        if self.schedule is not None:
            expected = self.repetitions * self.schedule.cycle_time
            if abs(expected - self.total_time) > 1e-9 * max(1.0, self.total_time):
                raise ValidationError(
                    f"total_time {self.total_time} != repetitions x cycle_time {expected}"
                )
            if self.schedule.dim != dim:
                raise ValidationError("schedule dimension does not match the system")
        for ch in self.channels:
            if ch.coupling.dim != dim:
                raise ValidationError("channel coupling dimension does not match the system")
        if self.observable.dim != dim:
            raise ValidationError("observable dimension does not match the system")
        psi = np.asarray(self.initial_state, dtype=complex).reshape(-1)
        if psi.shape[0] != dim:
            raise ValidationError("initial state dimension does not match the system")
        object.__setattr__(self, "initial_state", psi)

    def describe(self) -> dict:
        d = {
            "name": self.name,
            "seed": self.seed,
            "ensemble_size": self.ensemble_size,
            "total_time": self.total_time,
            "repetitions": self.repetitions,
            "schedule": self.schedule.label if self.schedule else None,
            "cycle_time": self.schedule.cycle_time if self.schedule else None,
            "code": self.code.name if self.code else None,
            "channels": [
                {
                    "kind": ch.kind,
                    "amplitude": ch.amplitude,
                    "correlation_time": ch.correlation_time,
                    "coupling": ch.coupling.label,
                }
                for ch in self.channels
            ],
        }
        d.update({k: v for k, v in sorted(self.params.items())})
        return d


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck sampling
# ---------------------------------------------------------------------------

def ou_trajectory(
    tau_c: float, amplitude: float, dt: float, steps: int, seed
) -> np.ndarray:
    """Stationary OU samples with autocorrelation ``amp^2 exp(-|dt|/tau)``.

    Uses the exact discretization ``x' = rho x + amp sqrt(1-rho^2) xi``
    with ``rho = exp(-dt/tau_c)``, so there is no integrator bias at any
    step size; the precondition ``dt <= tau_c / 10`` guards callers that
    go on to treat the noise as constant within a step.
    """
    if tau_c <= 0:
        raise ValidationError("tau_c must be positive")
    if dt > tau_c / 10 + 1e-15:
        raise ValidationError(f"dt={dt} too coarse for tau_c={tau_c} (need dt <= tau_c/10)")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draws = rng.standard_normal(steps)
    out = np.empty(steps)
    if steps == 0:
        return out
    rho = math.exp(-dt / tau_c)
    kick = amplitude * math.sqrt(1 - rho * rho)
    out[0] = amplitude * draws[0]
    for k in range(1, steps):
        out[k] = rho * out[k - 1] + kick * draws[k]
    return out


def _ou_batch(
    amplitude: float,
    tau_c: float,
    gaps: np.ndarray,
    draws: np.ndarray,
) -> np.ndarray:
    """Exact OU recursion on a (possibly non-uniform) grid.

    ``draws`` is ``(n_traj, steps)`` standard normal; gap ``k`` separates
    samples ``k`` and ``k+1``.  Vectorized across trajectories.
    """
    n_traj, steps = draws.shape
    out = np.empty((n_traj, steps))
    out[:, 0] = amplitude * draws[:, 0]
    rho = np.exp(-gaps / tau_c)
    kick = amplitude * np.sqrt(1 - rho * rho)
    for k in range(1, steps):
        out[:, k] = rho[k - 1] * out[:, k - 1] + kick[k - 1] * draws[:, k]
    return out


# ---------------------------------------------------------------------------
# step grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Grid:
    durations: np.ndarray                     # (S,) step lengths
    midpoints: np.ndarray                     # (S,) noise sample times
    pulses_after: tuple[tuple[int, np.ndarray], ...]  # pulse fires after step index
    records: tuple[tuple[int, float], ...]    # (steps completed, time)


def _build_grid(scenario: NoiseScenario) -> _Grid:
    taus = [ch.correlation_time for ch in scenario.channels]
    dt_cap = min(taus) / 20 if taus else scenario.total_time
    if scenario.schedule is not None:
        dt_cap = min(dt_cap, scenario.schedule.cycle_time / 20)
    else:
        dt_cap = min(dt_cap, scenario.total_time / 20)
    if scenario.max_step is not None:
        dt_cap = min(dt_cap, scenario.max_step)

    # (interval length, pulse after it or None, record after it or None)
    segments: list[tuple[float, np.ndarray | None, bool]] = []
    if scenario.schedule is None:
        per = scenario.total_time / scenario.record_points
        segments = [(per, None, True)] * scenario.record_points
    else:
        sch = scenario.schedule
        for rep in range(scenario.repetitions):
            for i, tau in enumerate(sch.durations):
                pulse = sch.pulses[i].matrix if i < len(sch.pulses) else None
                last = i == len(sch.durations) - 1
                segments.append((tau * sch.cycle_time, pulse, last))

    durations: list[float] = []
    pulses_after: list[tuple[int, np.ndarray]] = []
    records: list[tuple[int, float]] = [(0, 0.0)]
    t = 0.0
    for length, pulse, record in segments:
        n = max(1, math.ceil(length / dt_cap - 1e-12))
        step = length / n
        durations.extend([step] * n)
        t += length
        if pulse is not None:
            pulses_after.append((len(durations), pulse))
        if record:
            records.append((len(durations), t))
    durations_arr = np.asarray(durations)
    edges = np.concatenate([[0.0], np.cumsum(durations_arr)])
    midpoints = edges[:-1] + durations_arr / 2
    return _Grid(durations_arr, midpoints, tuple(pulses_after), tuple(records))


def _channel_noise(
    scenario: NoiseScenario, grid: _Grid, n_traj: int
) -> np.ndarray:
    """Noise values per (channel, trajectory, step), seeded reproducibly."""
    steps = grid.durations.shape[0]
    gaps = np.diff(grid.midpoints)
    out = np.zeros((len(scenario.channels), n_traj, steps))
    for c, ch in enumerate(scenario.channels):
        if ch.amplitude == 0.0:
            continue
        draws = np.empty((n_traj, steps))
        for i in range(n_traj):
            rng = np.random.default_rng(np.random.SeedSequence([scenario.seed, c, i]))
            draws[i] = rng.standard_normal(steps)
        out[c] = _ou_batch(ch.amplitude, ch.correlation_time, gaps, draws)
    return out


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------

def _is_diagonal(m: np.ndarray) -> bool:
    return bool(np.all(m == np.diag(np.diag(m))))


def _evolve(
    scenario: NoiseScenario, noise: np.ndarray, psi: np.ndarray, grid: _Grid
) -> np.ndarray:
    """Evolve state rows through the grid; returns (n_records, n_traj, dim)."""
    h0 = scenario.h_system.matrix
    couplings = [ch.coupling.matrix for ch in scenario.channels]
    diag_path = _is_diagonal(h0) and all(_is_diagonal(c) for c in couplings)
    n_traj, dim = psi.shape
    pulses = dict(grid.pulses_after)
    record_at = dict(grid.records)  # steps completed -> time
    out = np.empty((len(grid.records), n_traj, dim), dtype=complex)
    rec = 0
    if 0 in record_at:
        out[rec] = psi
        rec += 1

    if diag_path:
        d0 = np.diag(h0).real
        dc = np.array([np.diag(c).real for c in couplings]) if couplings else np.zeros((0, dim))
    for k, dt in enumerate(grid.durations):
        if diag_path:
            phase = d0[None, :] * np.ones((n_traj, 1))
            for c in range(len(couplings)):
                phase = phase + noise[c, :, k, None] * dc[c][None, :]
            psi = psi * np.exp(-1j * dt * phase)
        else:
            h = np.broadcast_to(h0, (n_traj, dim, dim)).copy()
            for c in range(len(couplings)):
                h += noise[c, :, k, None, None] * couplings[c][None, :, :]
            evals, vecs = np.linalg.eigh(h)
            amp = np.einsum("tji,tj->ti", vecs.conj(), psi)
            amp *= np.exp(-1j * evals * dt)
            psi = np.einsum("tij,tj->ti", vecs, amp)
        done = k + 1
        if done in pulses:
            psi = psi @ pulses[done].T
        if done in record_at:
            out[rec] = psi
            rec += 1
    return out


@dataclass(frozen=True)
class TrajectoryResult:
    times: np.ndarray
    states: np.ndarray          # (n_records, dim)
    final_state: np.ndarray


def propagate_trajectory(
    scenario: NoiseScenario, noise_values: np.ndarray | None = None, trajectory: int = 0
) -> TrajectoryResult:
    """Propagate a single noise realization.

    ``noise_values`` may supply explicit per-channel samples of shape
    ``(n_channels, n_steps)`` on the scenario's step grid; by default the
    trajectory's own seeded noise is used.
    """
    grid = _build_grid(scenario)
    if noise_values is None:
        full = _channel_noise(scenario, grid, trajectory + 1)
        noise = full[:, trajectory : trajectory + 1, :]
    else:
        noise = np.asarray(noise_values, dtype=float)
        if noise.shape != (len(scenario.channels), grid.durations.shape[0]):
            raise ValidationError(
                f"noise_values must have shape {(len(scenario.channels), grid.durations.shape[0])}"
            )
        noise = noise[:, None, :]
    psi = scenario.initial_state[None, :].copy()
    states = _evolve(scenario, noise, psi, grid)
    times = np.array([t for _, t in grid.records])
    return TrajectoryResult(times, states[:, 0, :], states[-1, 0, :])


def trajectory_propagator(
    scenario: NoiseScenario, noise_values: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> Operator:
    """Exact propagator of one noise realization (pulses included)."""
    grid = _build_grid(scenario)
    noise = np.asarray(noise_values, dtype=float)
    if noise.shape != (len(scenario.channels), grid.durations.shape[0]):
        raise ValidationError("noise_values shape does not match the step grid")
    dim = scenario.h_system.dim
    rows = _evolve(
        scenario,
        np.repeat(noise[:, None, :], dim, axis=1),
        np.eye(dim, dtype=complex),
        grid,
    )
    # rows holds the image of each basis vector; columns of U are those images
    u = rows[-1].T
    defect = np.max(np.abs(u @ u.conj().T - np.eye(dim)))
    if defect > 1e-10:
        raise ValidationError(f"trajectory propagator lost unitarity ({defect:.2e})")
    return Operator(u)


@dataclass(frozen=True)
class DecayCurve:
    """Ensemble coherence versus time, with standard errors."""

    times: np.ndarray
    mean: np.ndarray
    std_error: np.ndarray
    n_traj: int

    def to_csv(self, params: Mapping[str, object] | None = None) -> str:
        import json

        lines = []
        if params is not None:
            payload = json.dumps(params, sort_keys=True, default=str)
            lines.append(f"# {payload}")
        lines.append("time_s,mean_coherence,std_error,n_traj")
        for t, m, s in zip(self.times, self.mean, self.std_error):
            lines.append(f"{t:.12g},{m:.12g},{s:.12g},{self.n_traj}")
        return "\n".join(lines) + "\n"


def ensemble_coherence(scenario: NoiseScenario) -> DecayCurve:
    """Monte Carlo decay curve of the scenario observable.

    Per trajectory the observable expectation is real (the observable is
    Hermitian); reported are its ensemble mean and the standard error of
    that mean at each record time.
    """
    grid = _build_grid(scenario)
    n = scenario.ensemble_size
    noise = _channel_noise(scenario, grid, n)
    psi = np.tile(scenario.initial_state, (n, 1))
    states = _evolve(scenario, noise, psi, grid)
    obs = scenario.observable.matrix
    expect = np.einsum("rti,ij,rtj->rt", states.conj(), obs, states).real
    mean = expect.mean(axis=1)
    if n > 1:
        stderr = expect.std(axis=1, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    times = np.array([t for _, t in grid.records])
    return DecayCurve(times, mean, stderr, n)


def final_error(curve: DecayCurve) -> float:
    """Coherence loss at the end of the run: ``1 - |mean(T)|``."""
    return float(1.0 - abs(curve.mean[-1]))


# ---------------------------------------------------------------------------
# scenario library
# ---------------------------------------------------------------------------

def _two_qubit_zeeman(omega1: float, omega2: float) -> Operator:
    return Operator(
        0.5 * omega1 * single_qubit("Z", 1, 2).matrix
        + 0.5 * omega2 * single_qubit("Z", 2, 2).matrix
    )


def build_scenario(name: str, **params) -> NoiseScenario:
    """Construct one of the library noise scenarios.

    All scenarios share the keyword knobs ``cycle_time``, ``repetitions``,
    ``ensemble_size``, ``seed``, ``pulses`` (set False for free decay)
    and ``max_step``; amplitudes are rms couplings in rad/s and
    correlation times default to ``0.05 * T_c`` (fast) and ``20 * T_c``
    (slow), placing the fast bath far beyond the decoupling bandwidth.

    ``hybrid_dephasing``
        Two physical qubits with fast collective plus slow independent
        dephasing.  With ``encoded=True`` (default) the qubit lives on
        the dfs2 code and the schedule applies encoded pi_x pulses; with
        ``encoded=False`` the first physical qubit holds the coherence
        and the same physical pulse train acts on both qubits.
    ``encoded_spin_boson``
        dfs2 qubit with a logical drift ``delta_omega sigma_z^L +
        j_drift sigma_x^L`` (the drift realized by an XY exchange term)
        plus slow independent dephasing; encoded pi_x decoupling.
    ``encoded_depolarizing``
        dfs2 qubit with slow noise on *both* logical axes (z and x);
        paired with the encoded annihilator cycle, which averages both
        error channels to zero at leading order.
    ``four_qubit_blockwise``
        Two dfs2 blocks on qubit pairs (1,2) and (3,4) with fast
        block-collective dephasing plus slow per-qubit dephasing;
        encoded collective pi_x decoupling on both logical qubits.
    """
    if name not in SCENARIO_NAMES:
        raise ValidationError(f"unknown scenario {name!r}; known: {', '.join(SCENARIO_NAMES)}")
    p = dict(params)
    cycle_time = float(p.pop("cycle_time", 1.0))
    repetitions = int(p.pop("repetitions", 16))
    ensemble_size = int(p.pop("ensemble_size", 500))
    seed = int(p.pop("seed", 2024))
    use_pulses = bool(p.pop("pulses", True))
    max_step = p.pop("max_step", None)
    max_step = float(max_step) if max_step is not None else None
    tau_fast = float(p.pop("tau_fast", 0.05 * cycle_time))
    tau_slow = float(p.pop("tau_slow", 20.0 * cycle_time))
    total_time = repetitions * cycle_time

    def slow_pair(n: int) -> list[DephasingChannel]:
        amp = float(p.get("slow_amplitude", 0.1))
        return [
            DephasingChannel(single_qubit("Z", q, n), tau_slow, amp, "independent_slow")
            for q in range(1, n + 1)
        ]

    if name == "hybrid_dephasing":
        encoded = bool(p.pop("encoded", True))
        fast_amp = float(p.get("fast_amplitude", 1.0))
        omega1 = float(p.get("omega1", 1.0))
        omega2 = float(p.get("omega2", 0.6))
        code = build_code("dfs2")
        h = _two_qubit_zeeman(omega1, omega2)
        s_z = Operator(
            single_qubit("Z", 1, 2).matrix + single_qubit("Z", 2, 2).matrix, label="S_z"
        )
        channels = [DephasingChannel(s_z, tau_fast, fast_amp, "collective_fast")]
        channels += slow_pair(2)
        schedule = (
            named_sequence("cp_x", code=code, cycle_time=cycle_time, physical=True)
            if use_pulses
            else None
        )
        if encoded:
            initial = code.plus_state()
            observable = code.observable("x")
        else:
            plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
            zero = np.array([1, 0], dtype=complex)
            initial = np.kron(plus, zero)
            observable = single_qubit("X", 1, 2)
        return NoiseScenario(
            name="hybrid_dephasing",
            h_system=h,
            channels=tuple(channels),
            code=code if encoded else None,
            schedule=schedule,
            repetitions=repetitions if schedule else 0,
            ensemble_size=ensemble_size,
            total_time=total_time,
            seed=seed,
            initial_state=initial,
            observable=observable,
            max_step=max_step,
            params={"encoded": encoded, **{k: v for k, v in p.items()}},
        )

    if name == "encoded_spin_boson":
        delta_omega = float(p.get("delta_omega", 0.5))
        j_drift = float(p.get("j_drift", 0.25))
        code = build_code("dfs2")
        h = Operator(
            _two_qubit_zeeman(delta_omega, -delta_omega).matrix
            + j_drift * code.observable("x").matrix
        )
        channels = slow_pair(2)
        schedule = (
            named_sequence("cp_x", code=code, cycle_time=cycle_time, physical=True)
            if use_pulses
            else None
        )
        return NoiseScenario(
            name="encoded_spin_boson",
            h_system=h,
            channels=tuple(channels),
            code=code,
            schedule=schedule,
            repetitions=repetitions if schedule else 0,
            ensemble_size=ensemble_size,
            total_time=total_time,
            seed=seed,
            initial_state=code.plus_state(),
            observable=code.observable("x"),
            max_step=max_step,
            params=dict(p),
        )

    if name == "encoded_depolarizing":
        code = build_code("dfs2")
        amp = float(p.get("slow_amplitude", 0.1))
        channels = [
            DephasingChannel(code.observable("z"), tau_slow, amp, "logical"),
            DephasingChannel(code.observable("x"), tau_slow, amp, "logical"),
        ]
        schedule = (
            named_sequence("gmax_cycle", code=code, cycle_time=cycle_time, physical=True)
            if use_pulses
            else None
        )
        return NoiseScenario(
            name="encoded_depolarizing",
            h_system=Operator.zero(4),
            channels=tuple(channels),
            code=code,
            schedule=schedule,
            repetitions=repetitions if schedule else 0,
            ensemble_size=ensemble_size,
            total_time=total_time,
            seed=seed,
            initial_state=code.plus_state(),
            observable=code.observable("x"),
            max_step=max_step,
            params=dict(p),
        )

    # four_qubit_blockwise
    code = build_code("dfs2x2")
    fast_amp = float(p.get("fast_amplitude", 1.0))
    omegas = p.get("omegas", (1.0, 0.7, 0.4, 0.2))
    h = Operator(
        sum(0.5 * w * single_qubit("Z", q, 4).matrix for q, w in enumerate(omegas, start=1))
    )
    block1 = Operator(
        single_qubit("Z", 1, 4).matrix + single_qubit("Z", 2, 4).matrix, label="S_z(1,2)"
    )
    block2 = Operator(
        single_qubit("Z", 3, 4).matrix + single_qubit("Z", 4, 4).matrix, label="S_z(3,4)"
    )
    channels = [
        DephasingChannel(block1, tau_fast, fast_amp, "collective_fast"),
        DephasingChannel(block2, tau_fast, fast_amp, "collective_fast"),
    ]
    channels += slow_pair(4)
    schedule = (
        named_sequence("cp_x", code=code, cycle_time=cycle_time, physical=True)
        if use_pulses
        else None
    )
    return NoiseScenario(
        name="four_qubit_blockwise",
        h_system=h,
        channels=tuple(channels),
        code=code,
        schedule=schedule,
        repetitions=repetitions if schedule else 0,
        ensemble_size=ensemble_size,
        total_time=total_time,
        seed=seed,
        initial_state=code.plus_state(),
        observable=code.observable("x", 1),
        max_step=max_step,
        params={"omegas": tuple(omegas), **{k: v for k, v in p.items() if k != "omegas"}},
    )
