"""Numerical tolerances and error types shared across the package.

All comparisons in the library go through a single tolerance record so
that the meaning of "equal", "unitary" or "Hermitian" is consistent
everywhere and can be tightened or relaxed in one place.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Central numerical tolerance configuration.

    Attributes
    ----------
    equality : float
        Max-norm tolerance for operator equality checks.
    unitarity : float
        Max-norm tolerance on ``U @ U.conj().T - 1`` for constructors
        that assert unitarity.
    hermiticity : float
        Max-norm tolerance on ``H - H.conj().T``.
    branch_cut : float
        Distance (in radians) of a unitary eigenphase from the log
        branch cut at +/- pi below which the effective Hamiltonian is
        considered ambiguous.
    rank : float
        Relative singular-value threshold used by rank decisions
        (Lie-closure novelty, syndrome factorization).
    """

    equality: float = 1e-10
    unitarity: float = 1e-12
    hermiticity: float = 1e-12
    branch_cut: float = 1e-8
    rank: float = 1e-8


#: Default tolerances used by every module unless an explicit record is passed.
DEFAULT_TOL = Tolerances()


class ValidationError(ValueError):
    """Malformed input: wrong dimensions, broken invariants, unknown names."""


class ToleranceError(ArithmeticError):
    """A numerical contract could not be met at the configured tolerance."""


class BranchCutError(ToleranceError):
    """A unitary eigenphase sits too close to +/- pi for an unambiguous log."""
