"""Encoded qubits: code constructions, logical observables and restrictions.

Three codes are built explicitly rather than derived from a Wedderburn
decomposition of the error algebra:

``dfs2``
    Two physical qubits, logical qubit on the zero-quantum subspace
    ``span{|01>, |10>}``.  Immune to collective z dephasing.
``dfs2x2``
    Two ``dfs2`` blocks on qubit pairs (1,2) and (3,4); a 4-dimensional
    logical space inside the 6-dimensional zero-quantum subspace of four
    qubits.
``ns3``
    Three physical qubits under general collective noise; the logical
    qubit is the multiplicity (noiseless-subsystem) factor of the two
    total-spin-1/2 doublets and carries a two-dimensional syndrome
    co-factor.

Every code records its logical observables as *physical* operators that
preserve the code space, plus a table of physical pulse realizations for
the encoded pi rotations (products of one- and two-qubit Pauli
operators, each an involution so that pulse cycles close exactly).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances, ValidationError
from .operators import (
    Operator,
    PauliString,
    MatrixLike,
    collective,
    commutator,
    exchange,
    mat,
    pauli_sum,
    phase_insensitive_fidelity,
    single_qubit,
)

__all__ = [
    "Code",
    "LogicalAction",
    "CorrespondenceCheck",
    "HeteroCoefficients",
    "CODE_NAMES",
    "build_code",
    "logical_action",
    "ns3_hamiltonian",
    "ns3_logical_hamiltonian",
    "dfs2x2_logical_hamiltonian",
    "nmr_hamiltonian",
    "weak_coupling_truncation",
    "verify_pulse_correspondence",
]

CODE_NAMES = ("ns3", "dfs2", "dfs2x2")

_SIGMA = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class Code:
    """Isometric embedding of a logical (x) syndrome space into n qubits.

    ``isometry`` has shape ``(2**n_physical, logical_dim * syndrome_dim)``
    with orthonormal columns ordered logical-major, i.e. column
    ``l * syndrome_dim + z`` carries ``|l>_L (x) |z>_Z``.
    """

    name: str
    n_physical: int
    logical_dim: int
    syndrome_dim: int
    isometry: np.ndarray
    logical_observables: Mapping[tuple[str, int], Operator]
    pulse_realizations: Mapping[tuple[str, int], Operator]

    def __post_init__(self):
        v = self.isometry
        gram = v.conj().T @ v
        if np.max(np.abs(gram - np.eye(gram.shape[0]))) > DEFAULT_TOL.unitarity:
            raise ValidationError(f"code {self.name}: isometry columns are not orthonormal")
        if v.shape != (2**self.n_physical, self.logical_dim * self.syndrome_dim):
            raise ValidationError(f"code {self.name}: isometry shape {v.shape} inconsistent")
        v.setflags(write=False)

    @property
    def n_logical(self) -> int:
        return int(self.logical_dim).bit_length() - 1

    def projector(self) -> np.ndarray:
        return self.isometry @ self.isometry.conj().T

    def restrict(self, op: MatrixLike) -> np.ndarray:
        """``V^dag O V`` on the embedded logical (x) syndrome space."""
        m = mat(op)
        if m.shape[0] != 2**self.n_physical:
            raise ValidationError(
                f"operator dim {m.shape[0]} does not match code on {self.n_physical} qubits"
            )
        return self.isometry.conj().T @ m @ self.isometry

    def leakage(self, op: MatrixLike) -> float:
        """Spectral norm of the block coupling the code space to its complement."""
        p = self.projector()
        m = mat(op)
        off = (np.eye(m.shape[0]) - p) @ m @ p
        return float(np.linalg.norm(off, 2))

    def observable(self, axis: str, logical_qubit: int = 1) -> Operator:
        key = (axis.lower(), logical_qubit)
        if key not in self.logical_observables:
            raise ValidationError(f"code {self.name} has no observable {key}")
        return self.logical_observables[key]

    def logical_pi(self, axes: str) -> Operator:
        """Encoded pi rotation on the abstract logical space.

        ``axes`` gives one letter from ``ixyz`` per logical qubit; each
        non-identity factor contributes ``exp(-i pi sigma_a / 2) = -i sigma_a``.
        """
        axes = axes.lower()
        if len(axes) != self.n_logical:
            raise ValidationError(f"axes {axes!r} needs {self.n_logical} letters")
        m = np.ones((1, 1), dtype=complex)
        for a in axes:
            factor = _SIGMA["i"] if a == "i" else -1j * _SIGMA[a]
            m = np.kron(m, factor)
        return Operator(m, label=f"pi^L[{axes}]")

    def physical_pi(self, axes: str) -> Operator:
        """Physical realization of :meth:`logical_pi` from the pulse table."""
        axes = axes.lower()
        if len(axes) != self.n_logical:
            raise ValidationError(f"axes {axes!r} needs {self.n_logical} letters")
        m = np.eye(2**self.n_physical, dtype=complex)
        for ell, a in enumerate(axes, start=1):
            if a == "i":
                continue
            key = (a, ell)
            if key not in self.pulse_realizations:
                raise ValidationError(f"code {self.name} has no pulse realization for {key}")
            m = self.pulse_realizations[key].matrix @ m
        return Operator(m, label=f"{self.name}:pi[{axes}]")

    def encode(self, logical_state: np.ndarray, syndrome_index: int = 0) -> np.ndarray:
        """Embed a logical state vector, with the syndrome factor in a basis state."""
        psi = np.asarray(logical_state, dtype=complex).reshape(-1)
        if psi.shape[0] != self.logical_dim:
            raise ValidationError(f"logical state has dim {psi.shape[0]}, need {self.logical_dim}")
        chi = np.zeros(self.syndrome_dim, dtype=complex)
        chi[syndrome_index] = 1.0
        return self.isometry @ np.kron(psi, chi)

    def plus_state(self) -> np.ndarray:
        """Encoded ``|+...+>_L`` (equal superposition of all logical basis states)."""
        psi = np.full(self.logical_dim, 1 / np.sqrt(self.logical_dim), dtype=complex)
        return self.encode(psi)


@dataclass(frozen=True)
class LogicalAction:
    """Result of restricting a physical operator to a code.

    The restriction ``R = V^dag H V`` is split as
    ``L (x) 1_Z + 1_L (x) M + c 1`` whenever that is possible;
    ``logical_part`` is the traceless ``L`` and ``identity_offset`` the
    scalar ``c``.  Pathologies are reported, never raised: a nonzero
    off-code block shows up in ``leakage_norm`` and a non-scalar or
    unfactorizable syndrome action sets ``syndrome_nontrivial``.
    """

    preserves_code: bool
    logical_part: Operator
    identity_offset: float
    leakage_norm: float
    syndrome_nontrivial: bool
    factorizable: bool
    syndrome_part: Operator | None = None

    def to_dict(self) -> dict:
        d = {
            "preserves_code": self.preserves_code,
            "identity_offset": self.identity_offset,
            "leakage_norm": self.leakage_norm,
            "syndrome_nontrivial": self.syndrome_nontrivial,
            "factorizable": self.factorizable,
            "logical_part_real": self.logical_part.matrix.real.tolist(),
            "logical_part_imag": self.logical_part.matrix.imag.tolist(),
        }
        if self.syndrome_part is not None:
            d["syndrome_part_real"] = self.syndrome_part.matrix.real.tolist()
            d["syndrome_part_imag"] = self.syndrome_part.matrix.imag.tolist()
        return d


def logical_action(h: MatrixLike, code: Code, tol: Tolerances = DEFAULT_TOL) -> LogicalAction:
    """Compute the action of a physical operator on a code.

    For subspace codes (``syndrome_dim == 1``) the split is simply
    ``R = L + c 1``.  For subsystem codes the factorization
    ``R - c 1 = L (x) 1 + 1 (x) M`` is detected via the rank of the
    realigned matrix (rank <= 2 iff such a split exists) and then read
    off from partial traces.
    """
    nl, dz = code.logical_dim, code.syndrome_dim
    leak = code.leakage(h)
    r = code.restrict(h)
    c = np.trace(r) / (nl * dz)
    r0 = r - c * np.eye(nl * dz)

    if dz == 1:
        return LogicalAction(
            preserves_code=leak < tol.equality,
            logical_part=Operator(r0),
            identity_offset=float(c.real),
            leakage_norm=leak,
            syndrome_nontrivial=False,
            factorizable=True,
        )

    blocks = r0.reshape(nl, dz, nl, dz)
    realigned = blocks.transpose(0, 2, 1, 3).reshape(nl * nl, dz * dz)
    svals = np.linalg.svd(realigned, compute_uv=False)
    scale = max(svals[0], 1.0)
    rank = int(np.sum(svals > tol.rank * scale))

    logical = np.einsum("izjz->ij", blocks) / dz
    syndrome = np.einsum("iziw->zw", blocks) / nl
    rebuilt = np.kron(logical, np.eye(dz)) + np.kron(np.eye(nl), syndrome)
    factorizable = rank <= 2 and np.max(np.abs(rebuilt - r0)) < max(tol.equality, tol.rank * scale)
    syndrome_nontrivial = (not factorizable) or np.max(np.abs(syndrome)) > tol.equality
    return LogicalAction(
        preserves_code=leak < tol.equality,
        logical_part=Operator(logical),
        identity_offset=float(c.real),
        leakage_norm=leak,
        syndrome_nontrivial=bool(syndrome_nontrivial),
        factorizable=bool(factorizable),
        syndrome_part=Operator(syndrome),
    )


# ---------------------------------------------------------------------------
# code constructions
# ---------------------------------------------------------------------------

def _basis_ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def _build_dfs2() -> Code:
    iso = np.column_stack([_basis_ket("01"), _basis_ket("10")])
    z = 0.5 * (single_qubit("Z", 1, 2) - single_qubit("Z", 2, 2))
    x = 0.5 * (
        pauli_sum([PauliString.from_word("XX", [1, 2], 2), PauliString.from_word("YY", [1, 2], 2)])
    )
    y = 0.5 * (
        pauli_sum(
            [
                PauliString.from_word("YX", [1, 2], 2),
                PauliString.from_word("XY", [1, 2], 2, coefficient=-1),
            ]
        )
    )
    observables = {("x", 1): x, ("y", 1): y, ("z", 1): z}
    realizations = {
        ("x", 1): PauliString.from_word("XX", [1, 2], 2).to_operator(),
        ("y", 1): PauliString.from_word("XY", [1, 2], 2).to_operator(),
        ("z", 1): single_qubit("Z", 2, 2),
    }
    return Code("dfs2", 2, 2, 1, iso, observables, realizations)


def _build_dfs2x2() -> Code:
    block = _build_dfs2()
    iso = np.kron(block.isometry, block.isometry)
    eye4 = np.eye(4, dtype=complex)
    observables: dict[tuple[str, int], Operator] = {}
    realizations: dict[tuple[str, int], Operator] = {}
    for a in "xyz":
        observables[(a, 1)] = Operator(np.kron(block.observable(a).matrix, eye4))
        observables[(a, 2)] = Operator(np.kron(eye4, block.observable(a).matrix))
        realizations[(a, 1)] = Operator(np.kron(block.pulse_realizations[(a, 1)].matrix, eye4))
        realizations[(a, 2)] = Operator(np.kron(eye4, block.pulse_realizations[(a, 1)].matrix))
    return Code("dfs2x2", 4, 4, 1, iso, observables, realizations)


def _build_ns3() -> Code:
    # Total-spin basis by explicit Clebsch-Gordan coupling: qubits 1,2 into
    # singlet/triplet, then qubit 3.  |0> is spin-up (m = +1/2).
    up, down = _basis_ket("0"), _basis_ket("1")
    singlet = (_basis_ket("01") - _basis_ket("10")) / np.sqrt(2)
    t_plus = _basis_ket("00")
    t_zero = (_basis_ket("01") + _basis_ket("10")) / np.sqrt(2)
    t_minus = _basis_ket("11")

    # The two J=1/2 doublets: multiplicity label lambda in {0 (singlet
    # branch), 1 (triplet branch)}, magnetic label m in {+1/2, -1/2}.
    lam0 = [np.kron(singlet, up), np.kron(singlet, down)]
    lam1 = [
        np.sqrt(2 / 3) * np.kron(t_plus, down) - np.sqrt(1 / 3) * np.kron(t_zero, up),
        np.sqrt(1 / 3) * np.kron(t_zero, down) - np.sqrt(2 / 3) * np.kron(t_minus, up),
    ]
    v0 = np.column_stack(lam0 + lam1)  # ordering: lambda major, m minor

    s12, s23, s31 = exchange(1, 2, 3), exchange(2, 3, 3), exchange(3, 1, 3)
    obs_x = Operator((np.eye(8) + s12.matrix) / 2)
    obs_y = Operator(-(np.sqrt(3) / 6) * (s23.matrix - s31.matrix))
    obs_z = Operator(-0.5j * commutator(obs_x, obs_y).matrix)

    def multiplicity_block(op: Operator) -> np.ndarray:
        r = v0.conj().T @ op.matrix @ v0
        blk = r.reshape(2, 2, 2, 2)
        lam_part = np.einsum("izjz->ij", blk) / 2
        if np.max(np.abs(r - np.kron(lam_part, np.eye(2)))) > 1e-12:
            raise AssertionError("ns3 observable does not act trivially on the syndrome factor")
        return lam_part

    a_lam = multiplicity_block(obs_x)
    b_lam = multiplicity_block(obs_y)
    # Rotate the multiplicity basis so the two observable identities hold
    # with the standard Pauli matrices; phases come out consistent
    # automatically because -i a_lam b_lam anticommutes with both.
    c_lam = -1j * a_lam @ b_lam
    evals, evecs = np.linalg.eigh(c_lam)
    v_zero = evecs[:, np.argmax(evals)]
    v_one = a_lam @ v_zero
    w = np.column_stack([v_zero, v_one])
    iso = v0 @ np.kron(w, np.eye(2))

    for op, target in ((obs_x, _SIGMA["x"]), (obs_y, _SIGMA["y"]), (obs_z, _SIGMA["z"])):
        r = iso.conj().T @ op.matrix @ iso
        if np.max(np.abs(r - np.kron(target, np.eye(2)))) > 1e-12:
            raise AssertionError("ns3 logical basis construction failed")

    observables = {("x", 1): obs_x, ("y", 1): obs_y, ("z", 1): obs_z}
    # The encoded pi_x rotation coincides (up to phase) with swapping
    # qubits 1 and 2, which is itself an involutive unitary.
    realizations = {("x", 1): Operator((np.eye(8) + s12.matrix) / 2, label="swap12")}
    return Code("ns3", 3, 2, 2, iso, observables, realizations)


def build_code(name: str) -> Code:
    """Construct one of the named codes: ``ns3``, ``dfs2`` or ``dfs2x2``."""
    builders = {"ns3": _build_ns3, "dfs2": _build_dfs2, "dfs2x2": _build_dfs2x2}
    if name not in builders:
        raise ValidationError(f"unknown code {name!r}; known: {', '.join(CODE_NAMES)}")
    return builders[name]()


# ---------------------------------------------------------------------------
# closed-form logical Hamiltonians
# ---------------------------------------------------------------------------

def ns3_hamiltonian(omega: float, j12: float, j23: float, j31: float) -> Operator:
    """Physical three-spin Hamiltonian: Zeeman term plus pairwise exchange."""
    h = omega * collective("Z", 3).matrix
    h = h + j12 * exchange(1, 2, 3).matrix + j23 * exchange(2, 3, 3).matrix
    h = h + j31 * exchange(3, 1, 3).matrix
    return Operator(h)


def ns3_logical_hamiltonian(omega: float, j12: float, j23: float, j31: float) -> Operator:
    """Closed-form logical action of :func:`ns3_hamiltonian` on the ns3 code.

    The Zeeman and fully symmetric exchange parts act as the identity on
    the logical factor, leaving
    ``(2 j12 - j23 - j31) sigma_x^L + sqrt(3) (j31 - j23) sigma_y^L``.
    """
    del omega  # identity action on the logical factor
    cx = 2 * j12 - j23 - j31
    cy = np.sqrt(3) * (j31 - j23)
    return Operator(cx * _SIGMA["x"] + cy * _SIGMA["y"])


@dataclass(frozen=True)
class HeteroCoefficients:
    """Linear combinations of the four hetero-nuclear couplings.

    ``a`` multiplies the block-collective product, ``b`` and ``c`` the
    mixed collective/logical terms, and ``d`` the purely logical
    ``sigma_z^L1 sigma_z^L2`` coupling.
    """

    a: float
    b: float
    c: float
    d: float


def _normalize_couplings(j: Mapping) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    for key, val in j.items():
        if isinstance(key, str):
            pair = tuple(int(ch) for ch in key)
        else:
            pair = tuple(int(q) for q in key)
        if len(pair) != 2 or pair[0] == pair[1]:
            raise ValidationError(f"bad coupling key {key!r}")
        out[tuple(sorted(pair))] = float(val)
    return out


def hetero_coefficients(j: Mapping) -> HeteroCoefficients:
    jj = _normalize_couplings(j)
    j13 = jj.get((1, 3), 0.0)
    j14 = jj.get((1, 4), 0.0)
    j23 = jj.get((2, 3), 0.0)
    j24 = jj.get((2, 4), 0.0)
    return HeteroCoefficients(
        a=(j13 + j14 + j23 + j24) / 8,
        b=(j13 - j14 + j23 - j24) / 4,
        c=(j13 + j14 - j23 - j24) / 4,
        d=(j13 - j14 - j23 + j24) / 4,
    )


def dfs2x2_logical_hamiltonian(
    nu: Sequence[float], j: Mapping
) -> tuple[Operator, HeteroCoefficients]:
    """Closed-form logical action of the weak-coupling four-spin Hamiltonian.

    Parameters are NMR-style: chemical shifts ``nu`` (Hz, one per
    physical qubit) and scalar couplings ``j`` keyed by qubit pair.  The
    result is the traceless logical operator

    ``pi (dnu12 Z1 + dnu34 Z2 + J12 X1 + J34 X2 + 2 d Z1 Z2)``

    on the two encoded qubits, together with the hetero-coupling
    combinations (a, b, c, d).  Note the logical ZZ coefficient is
    ``2 pi d``: each product ``sigma_z^j sigma_z^j'`` restricts to the
    full ``sigma_z^L1 sigma_z^L2`` with no factor 1/2, unlike the terms
    picking up block-collective factors.
    """
    if len(nu) != 4:
        raise ValidationError("need four chemical shifts")
    jj = _normalize_couplings(j)
    coeffs = hetero_coefficients(jj)
    h = np.pi * (
        (nu[0] - nu[1]) * np.kron(_SIGMA["z"], _SIGMA["i"])
        + (nu[2] - nu[3]) * np.kron(_SIGMA["i"], _SIGMA["z"])
        + jj.get((1, 2), 0.0) * np.kron(_SIGMA["x"], _SIGMA["i"])
        + jj.get((3, 4), 0.0) * np.kron(_SIGMA["i"], _SIGMA["x"])
        + 2 * coeffs.d * np.kron(_SIGMA["z"], _SIGMA["z"])
    )
    return Operator(h), coeffs


def nmr_hamiltonian(nu: Sequence[float], j: Mapping, n: int = 4) -> list[PauliString]:
    """Strong-coupling NMR Hamiltonian as a Pauli-string list.

    ``sum_j pi nu_j sigma_z^j + sum_{j<j'} (pi/2) J_jj' vec(sigma)^j . vec(sigma)^j'``
    with frequencies in Hz (the pi factors convert to rad/s).
    """
    if len(nu) != n:
        raise ValidationError(f"need {n} chemical shifts")
    terms = [
        PauliString.from_word("Z", [q], n, coefficient=np.pi * nu[q - 1])
        for q in range(1, n + 1)
        if nu[q - 1] != 0.0
    ]
    for (a, b), val in sorted(_normalize_couplings(j).items()):
        if val == 0.0:
            continue
        for letter in "XYZ":
            terms.append(
                PauliString.from_word(letter + letter, [a, b], n, coefficient=np.pi * val / 2)
            )
    return terms


def weak_coupling_truncation(
    terms: Iterable[PauliString], species: Sequence[str]
) -> list[PauliString]:
    """Drop the off-diagonal (XX and YY) parts of hetero-species couplings.

    The truncation is the explicit secular approximation step: for every
    two-qubit XX or YY term whose qubits carry different species labels,
    the term is removed; ZZ parts and homo-species couplings survive.
    """
    kept = []
    for t in terms:
        support = [(q, letter) for q, letter in enumerate(t.letters, start=1) if letter != "I"]
        if len(support) == 2:
            (qa, la), (qb, lb) = support
            if la == lb and la in ("X", "Y") and species[qa - 1] != species[qb - 1]:
                continue
        kept.append(t)
    return kept


# ---------------------------------------------------------------------------
# pulse correspondence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrespondenceCheck:
    axes: str
    physical_label: str
    preserves_code: bool
    fidelity: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "axes": self.axes,
            "physical": self.physical_label,
            "preserves_code": self.preserves_code,
            "fidelity": self.fidelity,
            "passed": self.passed,
        }


DFS2X2_PULSE_TABLE = (
    ("xi", "X1 X2"),
    ("ix", "X3 X4"),
    ("xx", "X1 X2 X3 X4"),
    ("xz", "X1 X2 Z4"),
    ("zx", "Z2 X3 X4"),
    ("zz", "Z2 Z4"),
)


def verify_pulse_correspondence(
    code: Code | None = None, tol: Tolerances = DEFAULT_TOL
) -> list[CorrespondenceCheck]:
    """Check the encoded-pi pulse table against direct restriction.

    For each tabulated pair the physical product operator must preserve
    the code space and restrict, up to a global phase, to the encoded pi
    rotation; the fidelity reported is ``|Tr(A^dag B)| / N_L``.
    """
    if code is None:
        code = build_code("dfs2x2")
    checks = []
    for axes, label in DFS2X2_PULSE_TABLE if code.name == "dfs2x2" else _single_code_table(code):
        physical = code.physical_pi(axes)
        target = code.logical_pi(axes)
        leak = code.leakage(physical)
        restricted = code.restrict(physical)
        if code.syndrome_dim > 1:
            # compare on the logical factor only: contract the syndrome
            blocks = restricted.reshape(code.logical_dim, code.syndrome_dim, code.logical_dim, code.syndrome_dim)
            restricted = np.einsum("izjz->ij", blocks) / code.syndrome_dim
        fid = phase_insensitive_fidelity(target.matrix, restricted)
        preserves = leak < tol.equality
        checks.append(
            CorrespondenceCheck(
                axes=axes,
                physical_label=label,
                preserves_code=preserves,
                fidelity=fid,
                passed=preserves and fid >= 1 - tol.equality,
            )
        )
    return checks


def _single_code_table(code: Code):
    for (a, ell), op in sorted(code.pulse_realizations.items()):
        yield a * code.n_logical, op.label or f"{a}{ell}"
