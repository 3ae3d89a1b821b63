"""Brute-force verification engine on a truncated two-mode Fock grid.

Everything here recomputes what the closed-form modules predict, by a
deliberately different route: states are concrete amplitude arrays,
splitters are numerically exponentiated generators, loss is an explicit
sum over Kraus branches. Slow by design and kept out of production
paths; the test suite and the `oracle-check` CLI subcommand are the
only consumers.

A truncation subtlety drives the cutoff policy: the truncated splitter
generators are exactly Hermitian, so their exponentials conserve norm
even when the physical state has outgrown the grid (population
reflects off the cutoff instead of leaking). Norm deficit therefore
cannot detect an inadequate grid for the amplifying splitter; instead
the amplifier is applied on an enlarged working grid and accepted only
when the outermost shell of that grid carries negligible mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import expm_multiply

from .errors import CutoffTooSmall
from .moments import ModeStatistics, SplitterKind, SplitterSpec
from .qfim_ideal import FisherMatrix
from .qfim_lossy import SingleArmLoss, TwoArmLoss

_PREPARE_DEFICIT = 1e-10
_LBS_NORM_DRIFT = 1e-12
_NBS_DEFICIT = 1e-8
_SHELL_MASS = 1e-9
_SHELL_WIDTH = 4
_MAX_WORK = 320


@dataclass(frozen=True, eq=False)
class TruncatedState:
    """Two-mode pure state on the grid 0 <= n_a, n_b <= cutoff."""

    amplitudes: np.ndarray
    cutoff: int

    def __post_init__(self) -> None:
        shape = self.amplitudes.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"amplitudes must be square, got shape {shape}")
        if shape[0] != self.cutoff + 1:
            raise ValueError(
                f"cutoff {self.cutoff} inconsistent with shape {shape}"
            )

    @property
    def norm_deficit(self) -> float:
        return 1.0 - float(np.sum(np.abs(self.amplitudes) ** 2))


def prepare_input(alpha_mag: float, squeeze_r: float, cutoff: int) -> TruncatedState:
    """Coherent state on mode a, squeezed vacuum on mode b.

    Raises
    ------
    CutoffTooSmall
        If the truncated product state misses more than 1e-10 of its
        norm; retry with a larger cutoff.
    """
    if alpha_mag < 0.0 or squeeze_r < 0.0:
        raise ValueError("alpha_mag and squeeze_r must be non-negative")
    if cutoff < 1:
        raise ValueError(f"cutoff must be a positive integer, got {cutoff}")
    n = np.arange(cutoff + 1)
    lg = np.array([math.lgamma(k + 1) for k in n])
    if alpha_mag > 0.0:
        coh = np.exp(-alpha_mag**2 / 2.0 + n * math.log(alpha_mag) - lg / 2.0)
    else:
        coh = np.zeros(cutoff + 1)
        coh[0] = 1.0
    sq = np.zeros(cutoff + 1)
    th = math.tanh(squeeze_r)
    for k in range((cutoff // 2) + 1):
        sq[2 * k] = (-th) ** k * math.exp(
            0.5 * math.lgamma(2 * k + 1) - math.lgamma(k + 1) - k * math.log(2.0)
        ) / math.sqrt(math.cosh(squeeze_r))
    state = TruncatedState(np.outer(coh, sq).astype(complex), cutoff)
    if state.norm_deficit > _PREPARE_DEFICIT:
        raise CutoffTooSmall(
            f"input state norm deficit {state.norm_deficit:.3e} at cutoff {cutoff}"
        )
    return state


def _generator(cutoff: int, kind: SplitterKind, angle: float) -> csr_matrix:
    """i*angle*(a†b + ab†) for the passive splitter, i*angle*(a†b† + ab)
    for the amplifier, as a sparse matrix on the flattened grid."""
    d = cutoff + 1
    na, nb = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    if kind is SplitterKind.LBS:
        mask = (na < cutoff) & (nb > 0)  # a†b reaches (n_a+1, n_b-1)
        rows = (na[mask] + 1) * d + (nb[mask] - 1)
        vals = np.sqrt((na[mask] + 1.0) * nb[mask])
    else:
        mask = (na < cutoff) & (nb < cutoff)  # a†b† reaches (n_a+1, n_b+1)
        rows = (na[mask] + 1) * d + (nb[mask] + 1)
        vals = np.sqrt((na[mask] + 1.0) * (nb[mask] + 1.0))
    cols = na[mask] * d + nb[mask]
    # the conjugate term is the transpose with the same real weights
    gen = coo_matrix(
        (
            np.concatenate([vals, vals]),
            (np.concatenate([rows, cols]), np.concatenate([cols, rows])),
        ),
        shape=(d * d, d * d),
    )
    return csr_matrix(1j * angle * gen)


def _evolve(amplitudes: np.ndarray, kind: SplitterKind, angle: float) -> np.ndarray:
    d = amplitudes.shape[0]
    gen = _generator(d - 1, kind, angle)
    return expm_multiply(gen, amplitudes.reshape(-1)).reshape(d, d)


def _shell_mass(amplitudes: np.ndarray, width: int) -> float:
    prob = np.abs(amplitudes) ** 2
    return float(prob[-width:, :].sum() + prob[:, -width:].sum())


def apply_splitter(state: TruncatedState, splitter: SplitterSpec) -> TruncatedState:
    """Mix the two modes with the numerically exponentiated generator.

    The passive splitter acts on the state's own grid and must conserve
    norm to 1e-12. The amplifier acts on an enlarged working grid
    (growing it as needed) and is accepted only when the outer
    4-row/4-column shell holds at most 1e-9 of the probability and the
    norm deficit stays within 1e-8; the returned state lives on the
    working grid so no amplified population is discarded.

    Raises
    ------
    CutoffTooSmall
        If norm drifts on the passive path, or no working grid up to
        320 passes the shell test on the amplifying path.
    """
    if splitter.kind is SplitterKind.LBS:
        angle = math.acos(math.sqrt(splitter.transmissivity))
        before = 1.0 - state.norm_deficit
        out = _evolve(state.amplitudes, SplitterKind.LBS, angle)
        after = float(np.sum(np.abs(out) ** 2))
        if abs(after - before) > _LBS_NORM_DRIFT:
            raise CutoffTooSmall(
                f"passive splitter norm drift {abs(after - before):.3e}"
            )
        return TruncatedState(out, state.cutoff)
    angle = float(np.arccosh(splitter.gain))
    work = max(2 * state.cutoff, 64)
    while True:
        padded = np.zeros((work + 1, work + 1), dtype=complex)
        padded[: state.cutoff + 1, : state.cutoff + 1] = state.amplitudes
        out = _evolve(padded, SplitterKind.NBS, angle)
        deficit = 1.0 - float(np.sum(np.abs(out) ** 2))
        if _shell_mass(out, _SHELL_WIDTH) <= _SHELL_MASS and abs(deficit) <= _NBS_DEFICIT:
            return TruncatedState(out, work)
        if work >= _MAX_WORK:
            raise CutoffTooSmall(
                f"amplifier outgrew the maximum working grid {_MAX_WORK} "
                f"(gain {splitter.gain}, input cutoff {state.cutoff})"
            )
        work = min(int(work * 1.5) + 8, _MAX_WORK)


def measure_moments(state: TruncatedState) -> ModeStatistics:
    """Photon-number means, variances and covariance by direct summation."""
    prob = np.abs(state.amplitudes) ** 2
    n = np.arange(state.cutoff + 1.0)
    pa = prob.sum(axis=1)
    pb = prob.sum(axis=0)
    mean_a = float(n @ pa)
    mean_b = float(n @ pb)
    var_a = float(n**2 @ pa) - mean_a**2
    var_b = float(n**2 @ pb) - mean_b**2
    cov = float(n @ prob @ n) - mean_a * mean_b
    return ModeStatistics(mean_a, mean_b, max(var_a, 0.0), max(var_b, 0.0), cov)


def derivative_qfim(state: TruncatedState) -> FisherMatrix:
    """Ideal information matrix 4(<g_i g_j> - <g_i><g_j>) with
    g_± = (n_a ± n_b)/2 applied as diagonal operators on the grid."""
    prob = np.abs(state.amplitudes) ** 2
    n = np.arange(state.cutoff + 1.0)
    g_p = 0.5 * (n[:, None] + n[None, :])
    g_m = 0.5 * (n[:, None] - n[None, :])
    e_p = float((prob * g_p).sum())
    e_m = float((prob * g_m).sum())
    return FisherMatrix(
        f_pp=4.0 * (float((prob * g_p * g_p).sum()) - e_p * e_p),
        f_mm=4.0 * (float((prob * g_m * g_m).sum()) - e_m * e_m),
        f_pm=4.0 * (float((prob * g_p * g_m).sum()) - e_p * e_m),
    )


def _loss_weights(cutoff: int, eta: float) -> np.ndarray:
    """W[l, k] = C(k+l, l) (1-eta)^l eta^k: probability weight for
    keeping k photons after losing l, per initial number k+l."""
    d = cutoff + 1
    w = np.zeros((d, d))
    if eta == 0.0:
        w[:, 0] = 1.0
        return w
    if eta == 1.0:
        w[0, :] = 1.0
        return w
    log_eta = math.log(eta)
    log_loss = math.log1p(-eta)
    for l in range(d):
        for k in range(d - l):
            log_comb = (
                math.lgamma(k + l + 1) - math.lgamma(l + 1) - math.lgamma(k + 1)
            )
            w[l, k] = math.exp(log_comb + l * log_loss + k * log_eta)
    return w


def kraus_completeness(state: TruncatedState, loss: Union[SingleArmLoss, TwoArmLoss]) -> float:
    """Sum over loss branches of <Π†Π>; equals the squared norm when the
    truncated series is complete."""
    prob = np.abs(state.amplitudes) ** 2
    if isinstance(loss, SingleArmLoss):
        w = _loss_weights(state.cutoff, loss.eta_a)
        # total weight per initial photon number n: sum over l of W[l, n-l]
        totals = np.array(
            [sum(w[l, n - l] for l in range(n + 1)) for n in range(state.cutoff + 1)]
        )
        return float((prob.sum(axis=1) * totals).sum())
    w_a = _loss_weights(state.cutoff, loss.eta_a)
    w_b = _loss_weights(state.cutoff, loss.eta_b)
    tot_a = np.array(
        [sum(w_a[l, n - l] for l in range(n + 1)) for n in range(state.cutoff + 1)]
    )
    tot_b = np.array(
        [sum(w_b[l, n - l] for l in range(n + 1)) for n in range(state.cutoff + 1)]
    )
    return float(tot_a @ prob @ tot_b)


def kraus_sum_cij(
    state: TruncatedState, loss: Union[SingleArmLoss, TwoArmLoss]
) -> FisherMatrix:
    """Information matrix from the explicit sum over loss branches.

    Each branch contributes expectation values of the two derivative
    exponents D_± (linear in photon numbers and in the loss count via
    gamma); the series over lost quanta is exact on the truncated grid.
    """
    prob = np.abs(state.amplitudes) ** 2
    n = np.arange(state.cutoff + 1.0)
    e_p = e_m = 0.0
    e_pp = e_mm = e_pm = 0.0
    if isinstance(loss, SingleArmLoss):
        w = _loss_weights(state.cutoff, loss.eta_a)
        for l_a in range(state.cutoff + 1):
            kept = state.cutoff + 1 - l_a
            branch = prob[l_a:, :] * w[l_a, :kept][:, None]
            n_kept = n[:kept][:, None]
            m = n[None, :]
            d_m = 0.5 * (n_kept - m - loss.gamma * l_a)
            d_p = 0.5 * (n_kept + m - loss.gamma * l_a)
            e_p += float((branch * d_p).sum())
            e_m += float((branch * d_m).sum())
            e_pp += float((branch * d_p * d_p).sum())
            e_mm += float((branch * d_m * d_m).sum())
            e_pm += float((branch * d_p * d_m).sum())
    else:
        w_a = _loss_weights(state.cutoff, loss.eta_a)
        w_b = _loss_weights(state.cutoff, loss.eta_b)
        for l_a in range(state.cutoff + 1):
            kept_a = state.cutoff + 1 - l_a
            n_kept = n[:kept_a][:, None]
            row = prob[l_a:, :] * w_a[l_a, :kept_a][:, None]
            for l_b in range(state.cutoff + 1):
                kept_b = state.cutoff + 1 - l_b
                branch = row[:, l_b:] * w_b[l_b, :kept_b][None, :]
                m_kept = n[:kept_b][None, :]
                d_m = 0.5 * (
                    n_kept - m_kept - loss.gamma_a * l_a + loss.gamma_b * l_b
                )
                d_p = 0.5 * (
                    n_kept + m_kept - loss.gamma_a * l_a - loss.gamma_b * l_b
                )
                e_p += float((branch * d_p).sum())
                e_m += float((branch * d_m).sum())
                e_pp += float((branch * d_p * d_p).sum())
                e_mm += float((branch * d_m * d_m).sum())
                e_pm += float((branch * d_p * d_m).sum())
    return FisherMatrix(
        f_pp=4.0 * (e_pp - e_p * e_p),
        f_mm=4.0 * (e_mm - e_m * e_m),
        f_pm=4.0 * (e_pm - e_p * e_m),
    )
