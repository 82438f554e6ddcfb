"""Bang-bang decoupling cycles and their effective average Hamiltonians.

A :class:`DecouplingScheme` is one control cycle: an ordered pulse list
with relative free-evolution fractions.  The convention, fixed here and
used everywhere, is *interval first*: ``durations[i]`` is the free
interval evolved under the accumulated frame ``U_i = P_i ... P_1``
(``U_0 = 1``), after which pulse ``P_(i+1)`` fires.  A scheme with as
many durations as pulses therefore ends on a pulse; one extra duration
appends a final free interval governed by the (cyclically trivial) full
product.  Toggling frames are always computed from the pulse list --
they are the object under test, never hard-coded.

The zeroth-order average of a cycle is the weighted conjugation mixture
``sum_k w_k U_k^dag H U_k``; over a decoupling group with uniform
weights this is the projector onto the group's centralizer.  The
first-order (Magnus) correction and the exact cycle propagator complete
the fast-control picture: cycle propagator and ``average + correction``
agree to one order in the cycle time better than the average alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, TYPE_CHECKING

import numpy as np

from .config import DEFAULT_TOL, Tolerances, ValidationError
from .operators import (
    Operator,
    MatrixLike,
    collective,
    expm,
    logm_effective,
    mat,
    phase_insensitive_fidelity,
)

if TYPE_CHECKING:  # pragma: no cover
    from .codes import Code

__all__ = [
    "DecouplingScheme",
    "DecouplingSet",
    "SEQUENCE_NAMES",
    "frames_from_scheme",
    "average_zeroth",
    "project_group",
    "first_order_correction",
    "cycle_propagator",
    "effective_defect",
    "named_sequence",
    "close_group",
    "builtin_groups",
]

SEQUENCE_NAMES = (
    "cp_x",
    "cp_x_symmetric",
    "cp_y",
    "whh4",
    "gmax_cycle",
    "s1_selective_x1",
    "s1_selective_x2",
    "zz_extractor",
)


def phase_canonical_key(u: MatrixLike, decimals: int = 8) -> bytes:
    """Hashable key identifying a unitary modulo global phase.

    The phase is fixed by rotating the determinant to one, which leaves
    a residual ambiguity of exactly the dim-th roots of unity; among
    those candidates the lexicographically smallest rounded byte string
    is taken.  Unlike pivot-entry normalization this has no unstable
    tie-breaks, so projectively equal matrices computed along different
    product paths hash identically (e.g. a pi pulse
    ``exp(-i pi sigma_x / 2) = -i sigma_x`` hashes like ``sigma_x``).
    """
    m = mat(u)
    d = m.shape[0]
    det = np.linalg.det(m)
    if abs(det) < 0.5:
        raise ValidationError("cannot phase-normalize a non-unitary matrix")
    base = m / det ** (1.0 / d)
    best: bytes | None = None
    for k in range(d):
        cand = np.round(base * np.exp(2j * np.pi * k / d), decimals)
        blob = ((cand.real + 0.0) + 1j * (cand.imag + 0.0)).tobytes()  # flush -0.0
        if best is None or blob < best:
            best = blob
    assert best is not None
    return best


def _matrix_key(m: np.ndarray, decimals: int = 8) -> bytes:
    r = np.round(m, decimals)
    return ((r.real + 0.0) + 1j * (r.imag + 0.0)).tobytes()  # flush -0.0


def close_group(
    generators: Iterable[MatrixLike],
    max_order: int = 256,
    projective: bool = False,
) -> list[Operator]:
    """Close a set of unitaries under multiplication.

    With ``projective=False`` elements are counted as distinct matrices
    (so pi pulses ``-i sigma_a`` generate their -1 and produce e.g. the
    24-element closure of the single-qubit transformer generators); with
    ``projective=True`` elements are identified modulo global phase.
    Identity first in the result; raises if closure is not reached
    within ``max_order`` elements.
    """
    gens = [mat(g) for g in generators]
    if not gens:
        raise ValidationError("need at least one generator")
    dim = gens[0].shape[0]
    for g in gens:
        if g.shape != (dim, dim):
            raise ValidationError("generators must share a dimension")
        if np.max(np.abs(g @ g.conj().T - np.eye(dim))) > 1e-10:
            raise ValidationError("generators must be unitary")
    key_of = phase_canonical_key if projective else _matrix_key
    eye = np.eye(dim, dtype=complex)
    elements: dict[bytes, np.ndarray] = {key_of(eye): eye}
    frontier = [eye]
    while frontier:
        fresh = []
        for a in frontier:
            for g in gens:
                for prod in (g @ a, a @ g):
                    key = key_of(prod)
                    if key not in elements:
                        if len(elements) >= max_order:
                            raise ValidationError(
                                f"group closure not reached within {max_order} elements"
                            )
                        elements[key] = prod
                        fresh.append(prod)
        frontier = fresh
    identity_key = key_of(eye)
    out = [Operator(eye)]
    out += [Operator(m) for key, m in elements.items() if key != identity_key]
    return out


@dataclass(frozen=True)
class DecouplingScheme:
    """One bang-bang control cycle: pulses plus relative interval lengths.

    Invariants: every duration is positive and they sum to one; the full
    pulse product is the identity up to a global phase (cyclicity).
    """

    pulses: tuple[Operator, ...]
    durations: tuple[float, ...]
    cycle_time: float = 1.0
    label: str | None = None

    def __post_init__(self):
        if not self.pulses:
            raise ValidationError("a scheme needs at least one pulse (identity counts)")
        if len(self.durations) not in (len(self.pulses), len(self.pulses) + 1):
            raise ValidationError(
                f"{len(self.pulses)} pulses take {len(self.pulses)} or "
                f"{len(self.pulses) + 1} durations, got {len(self.durations)}"
            )
        if self.cycle_time <= 0:
            raise ValidationError("cycle_time must be positive")
        if any(t <= 0 for t in self.durations):
            raise ValidationError("all durations must be positive")
        if abs(sum(self.durations) - 1.0) > 1e-12:
            raise ValidationError(f"durations sum to {sum(self.durations)!r}, expected 1")
        dims = {p.dim for p in self.pulses}
        if len(dims) > 1:
            raise ValidationError("pulses must share a dimension")
        for p in self.pulses:
            if not p.is_unitary():
                raise ValidationError("pulses must be unitary")
        total = np.eye(self.dim, dtype=complex)
        for p in self.pulses:
            total = p.matrix @ total
        if phase_insensitive_fidelity(total, np.eye(self.dim)) < 1 - 1e-10:
            raise ValidationError("pulse cycle does not close to the identity (up to phase)")

    @property
    def dim(self) -> int:
        return self.pulses[0].dim

    def with_cycle_time(self, cycle_time: float) -> "DecouplingScheme":
        return DecouplingScheme(self.pulses, self.durations, cycle_time, self.label)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "cycle_time": self.cycle_time,
            "durations": list(self.durations),
            "pulses_real": [p.matrix.real.tolist() for p in self.pulses],
            "pulses_imag": [p.matrix.imag.tolist() for p in self.pulses],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecouplingScheme":
        pulses = tuple(
            Operator(np.array(re) + 1j * np.array(im))
            for re, im in zip(d["pulses_real"], d["pulses_imag"])
        )
        return cls(pulses, tuple(d["durations"]), d.get("cycle_time", 1.0), d.get("label"))


@dataclass(frozen=True)
class DecouplingSet:
    """Weighted set of composite rotations (toggling frames).

    ``is_group`` asserts that, modulo global phase, the distinct frames
    form a group with equal total weight per element; that is validated
    at construction.
    """

    frames: tuple[Operator, ...]
    weights: tuple[float, ...]
    is_group: bool = False

    def __post_init__(self):
        if len(self.frames) != len(self.weights):
            raise ValidationError("frames and weights must align")
        if not self.frames:
            raise ValidationError("empty decoupling set")
        if any(w < 0 for w in self.weights):
            raise ValidationError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValidationError("weights must sum to 1")
        dims = {f.dim for f in self.frames}
        if len(dims) > 1:
            raise ValidationError("frames must share a dimension")
        if self.is_group and not _is_group(self.frames, self.weights):
            raise ValidationError("frame set is not a uniformly weighted group (mod phase)")

    @property
    def dim(self) -> int:
        return self.frames[0].dim

    @classmethod
    def group(cls, elements: Sequence[MatrixLike]) -> "DecouplingSet":
        ops = tuple(Operator(mat(e)) for e in elements)
        w = 1.0 / len(ops)
        return cls(ops, (w,) * len(ops), is_group=True)

    @classmethod
    def from_frames(
        cls, frames: Sequence[Operator], weights: Sequence[float]
    ) -> "DecouplingSet":
        frames = tuple(frames)
        weights = tuple(float(w) for w in weights)
        return cls(frames, weights, is_group=_is_group(frames, weights))


def _phase_classes(frames: Sequence[Operator], weights: Sequence[float]):
    classes: dict[bytes, tuple[np.ndarray, float]] = {}
    for f, w in zip(frames, weights):
        key = phase_canonical_key(f.matrix)
        if key in classes:
            rep, total = classes[key]
            classes[key] = (rep, total + w)
        else:
            classes[key] = (f.matrix, w)
    return classes


def _is_group(frames: Sequence[Operator], weights: Sequence[float]) -> bool:
    classes = _phase_classes(frames, weights)
    keys = set(classes)
    if phase_canonical_key(np.eye(frames[0].dim)) not in keys:
        return False
    reps = [rep for rep, _ in classes.values()]
    for a in reps:
        for b in reps:
            if phase_canonical_key(a @ b) not in keys:
                return False
    target = 1.0 / len(classes)
    return all(abs(w - target) < 1e-9 for _, w in classes.values())


def frames_from_scheme(scheme: DecouplingScheme) -> DecouplingSet:
    """Composite rotations governing each free interval of a cycle.

    Interval ``i`` is conjugated by ``U_i = P_i ... P_1`` with
    ``U_0 = 1`` (the first pulse acts first in time); when the scheme
    carries a trailing interval, its frame is the full product, which is
    the identity up to phase by cyclicity.
    """
    dim = scheme.dim
    frames = [Operator(np.eye(dim))]
    acc = np.eye(dim, dtype=complex)
    for p in scheme.pulses:
        acc = p.matrix @ acc
        frames.append(Operator(acc))
    frames = frames[: len(scheme.durations)]
    return DecouplingSet.from_frames(frames, scheme.durations)


def average_zeroth(h: MatrixLike, frames: DecouplingSet) -> Operator:
    """Zeroth-order average Hamiltonian ``sum_k w_k U_k^dag H U_k``.

    Trace preserving and unital; Hermitian for Hermitian input.
    """
    hm = mat(h)
    if hm.shape[0] != frames.dim:
        raise ValidationError(f"dimension mismatch: H is {hm.shape[0]}, frames are {frames.dim}")
    total = np.zeros_like(hm)
    for f, w in zip(frames.frames, frames.weights):
        total += w * (f.matrix.conj().T @ hm @ f.matrix)
    return Operator(total)


def project_group(h: MatrixLike, group: DecouplingSet) -> Operator:
    """Projector onto the centralizer of a decoupling group.

    Uniform averaging over a group is idempotent and its output commutes
    with every group element.
    """
    if not group.is_group:
        raise ValidationError("project_group needs a group-valued decoupling set")
    return average_zeroth(h, group)


def _toggled(h: np.ndarray, scheme: DecouplingScheme) -> list[np.ndarray]:
    frames = frames_from_scheme(scheme)
    return [f.matrix.conj().T @ h @ f.matrix for f in frames.frames]


def first_order_correction(h: MatrixLike, scheme: DecouplingScheme) -> Operator:
    """Leading Magnus correction to the zeroth-order average.

    With toggled Hamiltonians ``H_m`` over fractional intervals
    ``tau_m`` (absolute durations ``tau_m T_c``) this is

        ``-(i T_c / 2) sum_{m>n} [H_m, H_n] tau_m tau_n``

    taking hbar = 1.  It vanishes exactly whenever the toggled
    Hamiltonians commute, and is O(T_c) in general.
    """
    hm = mat(h)
    toggled = _toggled(hm, scheme)
    taus = scheme.durations
    acc = np.zeros_like(hm)
    for m in range(len(toggled)):
        for n in range(m):
            acc += taus[m] * taus[n] * (
                toggled[m] @ toggled[n] - toggled[n] @ toggled[m]
            )
    return Operator(-0.5j * scheme.cycle_time * acc)


def cycle_propagator(h: MatrixLike, scheme: DecouplingScheme) -> Operator:
    """Exact propagator of one cycle, pulses treated as instantaneous.

    Events are composed in time order (earliest factor rightmost):
    free evolution under ``H`` for ``durations[i] * cycle_time``, then
    pulse ``i+1`` if there is one.
    """
    hm = mat(h)
    if hm.shape[0] != scheme.dim:
        raise ValidationError("Hamiltonian dimension does not match scheme")
    u = np.eye(hm.shape[0], dtype=complex)
    for i, tau in enumerate(scheme.durations):
        u = expm(hm, tau * scheme.cycle_time).matrix @ u
        if i < len(scheme.pulses):
            u = scheme.pulses[i].matrix @ u
    return Operator(u)


def effective_defect(
    h: MatrixLike,
    scheme: DecouplingScheme,
    include_first_order: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Spectral-norm distance between the cycle's true effective
    Hamiltonian and its zeroth-order (optionally first-order corrected)
    average; the small parameter is the cycle time.

    The cycle propagator may carry an irrelevant global phase (pi pulses
    contribute -i each); it is aligned against the averaged prediction
    before taking the principal log, and the comparison is restricted to
    the traceless parts, since the effective Hamiltonian is only defined
    modulo that freedom.
    """
    u = cycle_propagator(h, scheme)
    approx = average_zeroth(mat(h), frames_from_scheme(scheme)).matrix
    if include_first_order:
        approx = approx + first_order_correction(h, scheme).matrix
    reference = expm(approx, scheme.cycle_time).matrix
    overlap = np.trace(reference.conj().T @ u.matrix)
    if abs(overlap) < 1e-6 * u.dim:
        raise ValidationError(
            "cycle propagator is orthogonal to its averaged prediction; "
            "the cycle time is too large for a defect comparison"
        )
    aligned = u.matrix * (overlap.conjugate() / abs(overlap))
    h_eff = logm_effective(aligned, scheme.cycle_time, tol)
    diff = h_eff.matrix - approx
    diff = diff - np.trace(diff) / diff.shape[0] * np.eye(diff.shape[0])
    return float(np.linalg.norm(diff, 2))


# ---------------------------------------------------------------------------
# named sequences
# ---------------------------------------------------------------------------

def _pi_pulse(letter: str, n: int) -> Operator:
    return expm(collective(letter, n), np.pi / 2)


def _half_pi_pulse(letter: str, n: int, sign: float = 1.0) -> Operator:
    return expm(collective(letter, n), sign * np.pi / 4)


def named_sequence(
    name: str,
    n_qubits: int = 1,
    code: "Code | None" = None,
    cycle_time: float = 1.0,
    physical: bool = False,
) -> DecouplingScheme:
    """Build one of the library pulse sequences.

    Physical sequences (``cp_x``, ``cp_x_symmetric``, ``cp_y``,
    ``whh4``, ``gmax_cycle`` without a code) use collective pulses on
    ``n_qubits`` qubits.  Encoded sequences need a code and by default
    act on its abstract logical space; with ``physical=True`` the pulses
    are taken from the code's realization table instead, so the scheme
    evolves the full physical register.

    Timings follow the standard conventions: ``cp_x`` splits the cycle
    1/2 + 1/2 ending on a pulse, the time-symmetric variant is
    1/4 + 1/2 + 1/4, ``whh4`` uses 1/6, 1/6, 1/3, 1/6, 1/6 around its
    four half-pi pulses, and the encoded selective cycles place their
    four pulses a quarter cycle apart.
    """
    if name not in SEQUENCE_NAMES:
        raise ValidationError(f"unknown sequence {name!r}; known: {', '.join(SEQUENCE_NAMES)}")

    def encoded_pulse(axes: str) -> Operator:
        assert code is not None
        return code.physical_pi(axes) if physical else code.logical_pi(axes)

    if name in ("cp_x", "cp_y", "cp_x_symmetric"):
        letter = "Y" if name == "cp_y" else "X"
        if code is not None:
            pulse = encoded_pulse(letter.lower() * code.n_logical)
        else:
            pulse = _pi_pulse(letter, n_qubits)
        durations = (0.25, 0.5, 0.25) if name == "cp_x_symmetric" else (0.5, 0.5)
        return DecouplingScheme((pulse, pulse), durations, cycle_time, label=name)

    if name == "whh4":
        if code is not None:
            raise ValidationError("whh4 is a physical (collective-pulse) sequence")
        pulses = (
            _half_pi_pulse("X", n_qubits),
            _half_pi_pulse("Y", n_qubits, -1.0),
            _half_pi_pulse("Y", n_qubits),
            _half_pi_pulse("X", n_qubits, -1.0),
        )
        return DecouplingScheme(
            pulses, (1 / 6, 1 / 6, 1 / 3, 1 / 6, 1 / 6), cycle_time, label=name
        )

    if name == "gmax_cycle":
        if code is None:
            x, z = _pi_pulse("X", n_qubits), _pi_pulse("Z", n_qubits)
        else:
            x = encoded_pulse("x" * code.n_logical)
            z = encoded_pulse("z" * code.n_logical)
        return DecouplingScheme((x, z, x, z), (0.25,) * 4, cycle_time, label=name)

    # encoded two-logical-qubit cycles
    if code is None:
        raise ValidationError(f"sequence {name!r} needs a code")
    if code.n_logical != 2:
        raise ValidationError(f"sequence {name!r} needs a two-logical-qubit code")
    second = {"s1_selective_x1": "xz", "s1_selective_x2": "zx", "zz_extractor": "zz"}[name]
    first = "xx"
    pulses = tuple(encoded_pulse(a) for a in (first, second, first, second))
    return DecouplingScheme(pulses, (0.25,) * 4, cycle_time, label=name)


def builtin_groups() -> dict[str, DecouplingSet]:
    """The library's decoupling groups, keyed by name.

    Spans one to four physical qubits plus the logical-space groups of
    the encoded cycles; used by the verification suite to exercise the
    projector laws on every group the package ships.
    """
    from .codes import build_code  # deferred: codes never imports this module

    sx, sy, sz = (np.array(m) for m in (
        [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]],
    ))
    axis = (sx + sy + sz) / np.sqrt(3)
    transformer = close_group(
        [1j * sx, 1j * sy, 1j * sz, expm(axis / 2, 2 * np.pi / 3).matrix], max_order=64
    )

    dfs2 = build_code("dfs2")
    dfs2x2 = build_code("dfs2x2")
    ns3 = build_code("ns3")

    def scheme_group(scheme: DecouplingScheme) -> DecouplingSet:
        s = frames_from_scheme(scheme)
        if not s.is_group:
            raise ValidationError("expected a group-valued cycle")
        return s

    groups = {
        "cp_x": scheme_group(named_sequence("cp_x")),
        "cp_y": scheme_group(named_sequence("cp_y")),
        "gmax": scheme_group(named_sequence("gmax_cycle")),
        "transformer24": DecouplingSet.group([t.matrix for t in transformer]),
        "cp_xx_2q": scheme_group(named_sequence("cp_x", n_qubits=2)),
        "dfs2_gmax_physical": scheme_group(named_sequence("gmax_cycle", code=dfs2, physical=True)),
        "ns3_cp_x_physical": scheme_group(named_sequence("cp_x", code=ns3, physical=True)),
        "dfs2x2_cp_x_logical": scheme_group(named_sequence("cp_x", code=dfs2x2)),
        "s1_logical": scheme_group(named_sequence("s1_selective_x1", code=dfs2x2)),
        "zz_logical": scheme_group(named_sequence("zz_extractor", code=dfs2x2)),
        "s1_physical_4q": scheme_group(
            named_sequence("s1_selective_x1", code=dfs2x2, physical=True)
        ),
    }
    return groups
