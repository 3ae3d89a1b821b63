"""Photon-number statistics behind every bound in the package.

The state after the first splitter is summarized by five numbers: the
two mean photon numbers, the two variances, and the covariance. For the
coherent (x) squeezed-vacuum input the closed forms are implemented here
for both splitter flavors (passive linear splitter with transmissivity
T, active nonlinear splitter with gain G). Arbitrary states enter the
rest of the package by constructing :class:`ModeStatistics` directly.

Phase matching is hard-coded: the linear-splitter forms assume
2*theta_alpha - theta_r = 0 and the nonlinear forms assume
2*theta_g - 2*theta_alpha - theta_r = pi, so no phase angles are stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import DegenerateStatistics

# Relative slack on the Cauchy-Schwarz check; closed forms can overshoot
# |cov| = sqrt(var_a var_b) by a few ulps at |J| -> 1.
_CS_SLACK = 1e-9


class SplitterKind(Enum):
    LBS = "lbs"  # passive linear beam splitter, parameter T
    NBS = "nbs"  # active nonlinear beam splitter, parameter G


@dataclass(frozen=True)
class SplitterSpec:
    """First-splitter description: LBS transmissivity or NBS gain."""

    kind: SplitterKind
    value: float

    def __post_init__(self) -> None:
        if self.kind is SplitterKind.LBS:
            if not 0.0 <= self.value <= 1.0:
                raise ValueError(f"LBS transmissivity must be in [0, 1], got {self.value}")
        else:
            if self.value < 1.0:
                raise ValueError(f"NBS gain must be >= 1, got {self.value}")

    @classmethod
    def lbs(cls, transmissivity: float) -> "SplitterSpec":
        return cls(SplitterKind.LBS, float(transmissivity))

    @classmethod
    def nbs(cls, gain: float) -> "SplitterSpec":
        return cls(SplitterKind.NBS, float(gain))

    @property
    def transmissivity(self) -> float:
        if self.kind is not SplitterKind.LBS:
            raise ValueError("transmissivity is an LBS parameter")
        return self.value

    @property
    def reflectivity(self) -> float:
        # R = 1 - T exactly
        return 1.0 - self.transmissivity

    @property
    def gain(self) -> float:
        if self.kind is not SplitterKind.NBS:
            raise ValueError("gain is an NBS parameter")
        return self.value

    @property
    def gain_squared_minus_one(self) -> float:
        """g**2 with G**2 - g**2 = 1."""
        g = self.gain
        return g * g - 1.0


@dataclass(frozen=True)
class InterferometerInput:
    """Coherent (x) squeezed-vacuum input plus the first splitter."""

    alpha_mag: float
    squeeze_r: float
    splitter: SplitterSpec

    def __post_init__(self) -> None:
        if self.alpha_mag < 0.0:
            raise ValueError(f"alpha_mag must be >= 0, got {self.alpha_mag}")
        if self.squeeze_r < 0.0:
            raise ValueError(f"squeeze_r must be >= 0, got {self.squeeze_r}")


@dataclass(frozen=True)
class ModeStatistics:
    """First and second photon-number moments of the two-mode state.

    Attributes
    ----------
    mean_a, mean_b:
        Mean photon numbers of the two arms.
    var_a, var_b:
        Photon-number variances.
    cov:
        Covariance of the two arms' photon numbers.
    """

    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    cov: float

    def __post_init__(self) -> None:
        if self.mean_a < 0.0 or self.mean_b < 0.0:
            raise ValueError("mean photon numbers must be >= 0")
        if self.var_a < 0.0 or self.var_b < 0.0:
            raise ValueError("variances must be >= 0")
        # Cauchy-Schwarz with slack for closed-form rounding
        if self.cov * self.cov > self.var_a * self.var_b * (1.0 + _CS_SLACK) + 1e-30:
            raise ValueError(
                f"cov={self.cov} violates |cov| <= sqrt(var_a*var_b)="
                f"{math.sqrt(self.var_a * self.var_b)}"
            )


class Correlations(NamedTuple):
    q_a: float
    q_b: float
    j: float


def lbs_moments(inp: InterferometerInput) -> ModeStatistics:
    """Moments of the coherent (x) squeezed-vacuum input after an LBS.

    Parameters
    ----------
    inp:
        Input with an LBS splitter (transmissivity T, reflectivity
        R = 1 - T).

    Returns
    -------
    ModeStatistics
        The five closed-form moments.
    """
    if inp.splitter.kind is not SplitterKind.LBS:
        raise ValueError("lbs_moments requires an LBS splitter")
    t = inp.splitter.transmissivity
    rr = 1.0 - t
    a2 = inp.alpha_mag ** 2
    sh2 = math.sinh(inp.squeeze_r) ** 2
    ch2 = math.cosh(inp.squeeze_r) ** 2
    e2r = math.exp(2.0 * inp.squeeze_r)
    c2r = math.cosh(2.0 * inp.squeeze_r)
    return ModeStatistics(
        mean_a=t * a2 + rr * sh2,
        mean_b=rr * a2 + t * sh2,
        var_a=t * t * a2 + 2.0 * rr * rr * sh2 * ch2 + t * rr * (a2 * e2r + sh2),
        var_b=rr * rr * a2 + 2.0 * t * t * sh2 * ch2 + t * rr * (a2 * e2r + sh2),
        cov=t * rr * (a2 * (1.0 - e2r) + sh2 * c2r),
    )


def nbs_moments(inp: InterferometerInput) -> ModeStatistics:
    """Moments of the coherent (x) squeezed-vacuum input after an NBS.

    Parameters
    ----------
    inp:
        Input with an NBS splitter (gain G, g**2 = G**2 - 1).

    Returns
    -------
    ModeStatistics
        The five closed-form moments; the covariance is positive (the
        amplifier correlates the arms).
    """
    if inp.splitter.kind is not SplitterKind.NBS:
        raise ValueError("nbs_moments requires an NBS splitter")
    big_g2 = inp.splitter.gain ** 2
    g2 = big_g2 - 1.0
    a2 = inp.alpha_mag ** 2
    sh2 = math.sinh(inp.squeeze_r) ** 2
    ch2 = math.cosh(inp.squeeze_r) ** 2
    e2r = math.exp(2.0 * inp.squeeze_r)
    c2r = math.cosh(2.0 * inp.squeeze_r)
    return ModeStatistics(
        mean_a=big_g2 * a2 + g2 * ch2,
        mean_b=big_g2 * sh2 + g2 * (a2 + 1.0),
        var_a=big_g2 * big_g2 * a2 + 2.0 * g2 * g2 * sh2 * ch2 + big_g2 * g2 * (a2 * e2r + ch2),
        var_b=g2 * g2 * a2 + 2.0 * big_g2 * big_g2 * sh2 * ch2 + big_g2 * g2 * (a2 * e2r + ch2),
        cov=big_g2 * g2 * (a2 * (1.0 + e2r) + ch2 * c2r),
    )


def derived_correlations(stats: ModeStatistics) -> Correlations:
    """Mandel Q of each arm and the intermode correlation J.

    Q_i = (var_i - mean_i)/mean_i and J = cov/sqrt(var_a*var_b); J is
    clamped to [-1, 1] only when the overshoot is numerical noise
    (<= 1e-12).

    Raises
    ------
    DegenerateStatistics
        If a mean (for Q) or a variance product (for J) vanishes.
    """
    if stats.mean_a <= 0.0 or stats.mean_b <= 0.0:
        raise DegenerateStatistics("Mandel Q undefined for zero mean photon number")
    # sqrt before multiplying so subnormal variances do not underflow
    denom = math.sqrt(stats.var_a) * math.sqrt(stats.var_b)
    if denom <= 0.0:
        raise DegenerateStatistics("correlation J undefined for zero variance")
    q_a = (stats.var_a - stats.mean_a) / stats.mean_a
    q_b = (stats.var_b - stats.mean_b) / stats.mean_b
    j = stats.cov / denom
    if 1.0 < abs(j) <= 1.0 + 1e-12:
        j = math.copysign(1.0, j)
    return Correlations(q_a, q_b, j)
