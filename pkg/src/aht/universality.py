"""Lie-algebraic reachability: closures, symmetric splits, transformers.

Whether a pair of Hamiltonians suffices for universal control is decided
here at the algebra level: the real Lie algebra generated by the
(anti-Hermitian) generators is closed under iterated commutators and its
dimension compared against the full traceless algebra.  The verdict is
always reported as a dimension, never as a blanket "universal".

A *transformer* group is a decoupling group whose weighted conjugation
averages can steer any traceless Hamiltonian direction into any other;
feasibility of the required nonnegative weights is solved exactly as a
small nonnegative least-squares problem.  The weights fix the direction
only -- the positive scale is a free parameter and is returned
explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.optimize

from .config import DEFAULT_TOL, Tolerances, ValidationError
from .decoupling import DecouplingSet, close_group, project_group
from .operators import Operator, MatrixLike, mat

__all__ = [
    "LieBasis",
    "ReachabilityResult",
    "lie_closure",
    "cp_split",
    "transformer_reach",
    "generate_group",
    "transformer_generators",
]


@dataclass(frozen=True)
class LieBasis:
    """Orthonormal basis of the real Lie algebra generated by some operators.

    ``truncated`` is set when growth was stopped by ``max_dim`` rather
    than by genuine closure.
    """

    generators: tuple[Operator, ...]
    basis: tuple[Operator, ...]
    dimension: int
    truncated: bool = False


def _vectorize(m: np.ndarray) -> np.ndarray:
    # real coordinates; the generated algebra is a *real* vector space
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def _gram_schmidt_residual(vec: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    # two passes: commutator towers lose ~2 digits per level in double
    for _ in range(2):
        for b in basis:
            vec = vec - (b @ vec) * b
    return vec


def lie_closure(
    generators: Sequence[MatrixLike],
    max_dim: int = 256,
    tol: Tolerances = DEFAULT_TOL,
) -> LieBasis:
    """Close a set of anti-Hermitian generators under commutation.

    Grows an orthonormal basis (normalized trace pairing); a commutator
    counts as a new direction when its Gram-Schmidt residual exceeds
    ``tol.rank``.  The result is independent of generator order and
    invariant under simultaneous unitary conjugation of all generators.
    """
    mats = [mat(g) for g in generators]
    if not mats:
        raise ValidationError("need at least one generator")
    dim = mats[0].shape[0]
    for g in mats:
        if g.shape != (dim, dim):
            raise ValidationError("generators must share a dimension")
        if np.max(np.abs(g + g.conj().T)) > 1e-10:
            raise ValidationError("lie_closure expects anti-Hermitian generators (apply i first)")

    scale = np.sqrt(dim)  # so unit vectors have Tr(A^dag A)/dim = 1
    basis_vecs: list[np.ndarray] = []
    basis_ops: list[np.ndarray] = []
    truncated = False

    def try_add(m: np.ndarray) -> bool:
        nonlocal truncated
        v = _vectorize(m) / scale
        v = _gram_schmidt_residual(v, basis_vecs)
        r = np.linalg.norm(v)
        if r <= tol.rank:
            return False
        if len(basis_vecs) >= max_dim:
            truncated = True
            return False
        v /= r
        basis_vecs.append(v)
        half = dim * dim
        rebuilt = (v[:half] + 1j * v[half:]).reshape(dim, dim) * scale
        basis_ops.append(rebuilt)
        return True

    for g in mats:
        try_add(g)
    frontier = list(range(len(basis_ops)))
    while frontier and not truncated:
        fresh = []
        for i in frontier:
            for j in range(len(basis_ops)):
                if truncated:
                    break
                c = basis_ops[i] @ basis_ops[j] - basis_ops[j] @ basis_ops[i]
                before = len(basis_ops)
                if try_add(c) and len(basis_ops) > before:
                    fresh.append(len(basis_ops) - 1)
        frontier = fresh

    return LieBasis(
        generators=tuple(Operator(g) for g in mats),
        basis=tuple(Operator(b) for b in basis_ops),
        dimension=len(basis_ops),
        truncated=truncated,
    )


def cp_split(h: MatrixLike, pi_pulse: MatrixLike) -> tuple[Operator, Operator]:
    """Split a Hamiltonian into parts symmetric/antisymmetric under a pi pulse.

    ``H = H_s + H_a`` with ``H_s = (H + P^dag H P)/2`` equal to the
    two-element group average over ``{1, P}`` and ``H_a`` flipping sign
    under conjugation.  The pulse must be involutive up to phase.
    """
    hm, pm = mat(h), mat(pi_pulse)
    if hm.shape != pm.shape:
        raise ValidationError("dimension mismatch in cp_split")
    if np.max(np.abs(pm @ pm.conj().T - np.eye(pm.shape[0]))) > 1e-10:
        raise ValidationError("pi pulse must be unitary")
    square = pm @ pm
    phase = np.trace(square) / pm.shape[0]
    if abs(abs(phase) - 1) > 1e-10 or np.max(np.abs(square - phase * np.eye(pm.shape[0]))) > 1e-10:
        raise ValidationError("pulse is not involutive up to a global phase")
    conj = pm.conj().T @ hm @ pm
    return Operator((hm + conj) / 2), Operator((hm - conj) / 2)


@dataclass(frozen=True)
class ReachabilityResult:
    reachable: bool
    weights: tuple[float, ...]
    scale: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "reachable": self.reachable,
            "weights": list(self.weights),
            "scale": self.scale,
            "residual": self.residual,
        }


def transformer_reach(
    group: DecouplingSet,
    a: MatrixLike,
    target: MatrixLike,
    tol: Tolerances = DEFAULT_TOL,
) -> ReachabilityResult:
    """Decide whether weighted conjugation averages of ``a`` reach ``target``.

    Solves ``sum_k tau_k U_k^dag A U_k = lambda * target`` for
    nonnegative ``tau`` summing to one and free positive scale
    ``lambda``, as a plain nonnegative least-squares problem (the sum
    constraint is absorbed into ``lambda``).  Reachability means the
    residual falls below ``tol.rank`` in Frobenius norm.
    """
    if not group.is_group:
        raise ValidationError("transformer_reach expects a decoupling group")
    am, tm = mat(a), mat(target)
    if am.shape != tm.shape or am.shape[0] != group.dim:
        raise ValidationError("dimension mismatch in transformer_reach")
    norm_a = np.linalg.norm(am)
    norm_t = np.linalg.norm(tm)
    if norm_a < 1e-14:
        raise ValidationError("degenerate (zero) starting Hamiltonian")
    if norm_t < 1e-14:
        raise ValidationError("degenerate (zero) target")

    columns = [
        _vectorize(f.matrix.conj().T @ am @ f.matrix) / norm_t for f in group.frames
    ]
    rhs = _vectorize(tm) / norm_t
    design = np.column_stack(columns)
    weights, residual = scipy.optimize.nnls(design, rhs)
    total = float(weights.sum())
    reachable = bool(residual < tol.rank and total > 0)
    if reachable:
        tau = tuple(float(w) / total for w in weights)
        lam = 1.0 / total
    else:
        tau = tuple(float(w) for w in weights)
        lam = 0.0
    return ReachabilityResult(reachable, tau, lam, float(residual))


def generate_group(
    generators: Sequence[MatrixLike], max_order: int = 256
) -> DecouplingSet:
    """Close unitary generators into a uniformly weighted decoupling group.

    Elements are distinct unitaries; phases generated along the way
    (e.g. the -1 from squaring a pi pulse) stay in the set, so the
    single-qubit transformer generators close at order 24.  The group
    *property* of the result is still certified modulo global phase,
    which is all that conjugation averages can see.
    """
    elements = close_group(generators, max_order=max_order)
    return DecouplingSet.group([e.matrix for e in elements])


def transformer_generators() -> list[Operator]:
    """Generators of the order-24 single-qubit transformer group.

    Three pi rotations about the coordinate axes plus the 2 pi / 3
    rotation about (1,1,1)/sqrt(3) that cyclically permutes the Pauli
    matrices.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    axis = (sx + sy + sz) / np.sqrt(3)
    evals, vecs = np.linalg.eigh(axis / 2)
    rot = (vecs * np.exp(-1j * evals * 2 * np.pi / 3)) @ vecs.conj().T
    return [Operator(1j * sx), Operator(1j * sy), Operator(1j * sz), Operator(rot)]


def centralizer_consistency(group: DecouplingSet, h: MatrixLike, tol: Tolerances = DEFAULT_TOL):
    """Cross-check: the group projection of ``h`` lies in the cone probed
    by :func:`transformer_reach` (uniform weights, scale one)."""
    projected = project_group(h, group)
    if np.linalg.norm(projected.matrix) < 1e-12:
        return None
    return transformer_reach(group, h, projected.matrix, tol)
