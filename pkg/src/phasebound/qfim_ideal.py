"""Lossless information matrix in the phase-sum/phase-difference basis.

The 2x2 matrix over (phi_plus, phi_minus) is determined by the five
photon-number moments; its Schur complements are the attainable
two-parameter bounds and the difference to the bare diagonal is the
overestimation picked up by a single-parameter treatment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import NonpositiveInformation, SingularComplement
from .moments import ModeStatistics

# Positive-semidefiniteness slack for matrices assembled from rounded moments
_PSD_SLACK = 1e-10


class Target(Enum):
    PHASE_SUM = "phase_sum"              # phi_plus, the SU(1,1) estimand
    PHASE_DIFFERENCE = "phase_difference"  # phi_minus, the SU(2) estimand


class EstimationMode(Enum):
    SINGLE_PARAMETER = "single_parameter"
    TWO_PARAMETER = "two_parameter"


@dataclass(frozen=True)
class FisherMatrix:
    """Symmetric 2x2 information matrix (ideal F or lossy C).

    Attributes
    ----------
    f_pp, f_mm:
        Diagonal elements for the phase sum and phase difference.
    f_pm:
        The symmetric off-diagonal element.
    """

    f_pp: float
    f_mm: float
    f_pm: float

    def __post_init__(self) -> None:
        if self.f_pp < 0.0 or self.f_mm < 0.0:
            raise ValueError("diagonal information elements must be >= 0")
        det = self.f_pp * self.f_mm - self.f_pm * self.f_pm
        if det < -_PSD_SLACK * max(self.f_pp, self.f_mm):
            raise ValueError(f"matrix is not positive semidefinite: det={det}")


@dataclass(frozen=True)
class PrecisionBound:
    """A Cramer-Rao bound together with its provenance."""

    info: float
    delta_phi: float
    mode: Optional[EstimationMode]
    target: Optional[Target]
    repeats: int

    def __post_init__(self) -> None:
        if self.info < 0.0:
            raise ValueError("information must be >= 0")
        if self.delta_phi <= 0.0:
            raise ValueError("delta_phi must be > 0")
        if self.repeats < 1:
            raise ValueError("repeats must be a positive integer")
        if self.info > 0.0:
            expected = 1.0 / math.sqrt(self.repeats * self.info)
            if abs(self.delta_phi - expected) > 1e-12 * expected:
                raise ValueError("delta_phi inconsistent with 1/sqrt(m*info)")


def _tol(fm: FisherMatrix) -> float:
    # scale-aware zero threshold for singular denominators
    return 1e-12 * max(1.0, fm.f_pp, fm.f_mm)


def _split(fm: FisherMatrix, target: Target) -> tuple[float, float]:
    """(target diagonal, complementary diagonal) for the given target."""
    if target is Target.PHASE_DIFFERENCE:
        return fm.f_mm, fm.f_pp
    return fm.f_pp, fm.f_mm


def qfim_matrix(stats: ModeStatistics) -> FisherMatrix:
    """Ideal information matrix from photon-number moments.

    The elements are var_a + var_b + 2 cov (sum-sum), var_a + var_b
    - 2 cov (difference-difference) and var_a - var_b (off-diagonal).
    """
    return FisherMatrix(
        f_pp=stats.var_a + stats.var_b + 2.0 * stats.cov,
        f_mm=stats.var_a + stats.var_b - 2.0 * stats.cov,
        f_pm=stats.var_a - stats.var_b,
    )


def two_param_bound(fm: FisherMatrix, target: Target) -> float:
    """Schur complement of the matrix for the given target phase.

    This is the information actually available when the other phase
    combination is unknown too. When the off-diagonal element is zero
    (within tolerance) the diagonal passes through unchanged, which
    also resolves the 0/0 corner where the complementary diagonal
    vanishes as well.

    Raises
    ------
    SingularComplement
        If the complementary diagonal is numerically zero while the
        off-diagonal element is not.
    """
    diag, comp = _split(fm, target)
    tol = _tol(fm)
    if abs(fm.f_pm) <= tol:
        return diag
    if comp <= tol:
        raise SingularComplement(
            f"complementary diagonal {comp} is ~0 while |f_pm|={abs(fm.f_pm)} > tol"
        )
    return diag - fm.f_pm * fm.f_pm / comp


def overestimation(fm: FisherMatrix, target: Target) -> float:
    """Gap between the bare diagonal and the Schur complement.

    Zero exactly when the off-diagonal element is zero within
    tolerance; always >= 0.
    """
    _, comp = _split(fm, target)
    tol = _tol(fm)
    if abs(fm.f_pm) <= tol:
        return 0.0
    if comp <= tol:
        raise SingularComplement(
            f"complementary diagonal {comp} is ~0 while |f_pm|={abs(fm.f_pm)} > tol"
        )
    return fm.f_pm * fm.f_pm / comp


def qcrb(
    info: float,
    repeats: int = 1,
    *,
    mode: Optional[EstimationMode] = None,
    target: Optional[Target] = None,
) -> PrecisionBound:
    """Cramer-Rao bound delta_phi = 1/sqrt(m * info).

    Parameters
    ----------
    info:
        Fisher information for the target parameter; must be > 0.
    repeats:
        Number of independent repetitions m.
    mode, target:
        Optional provenance carried on the returned bound.

    Raises
    ------
    NonpositiveInformation
        If info <= 0.
    """
    if info <= 0.0:
        raise NonpositiveInformation(f"cannot form a precision bound from info={info}")
    if repeats < 1:
        raise ValueError("repeats must be a positive integer")
    return PrecisionBound(
        info=info,
        delta_phi=1.0 / math.sqrt(repeats * info),
        mode=mode,
        target=target,
        repeats=repeats,
    )
