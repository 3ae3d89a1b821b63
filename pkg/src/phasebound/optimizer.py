"""Scalar minimization over the loss-distribution parameter gamma.

Every gamma gives a valid information bound, so the reportable number
is the minimum over gamma. The objectives are smooth rationals in
gamma but can develop a second basin near the domain edges at extreme
transmission, so refinement is preceded by a coarse bracketing scan.

The production entry point is :func:`optimize_gamma`; the bare
:func:`minimize_scalar` is exposed because the tests use it as the
oracle for the analytic optima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from .errors import NonFiniteObjective
from .moments import ModeStatistics
from .qfim_ideal import EstimationMode, FisherMatrix, Target, two_param_bound
from .qfim_lossy import SingleArmLoss, TwoArmLoss, c_matrix_single, c_matrix_two

_COARSE_POINTS = 129
_EVAL_BUDGET = 10_000
_GAMMA_LO, _GAMMA_HI = -1.5, 0.5
# widest search window before the expansion gives up (the objective's
# horizontal asymptote can hide the minimum at huge |gamma|)
_MAX_WIDTH = 1e9
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class SingleArm:
    """Loss on arm a only."""

    eta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class TwoArmSymmetric:
    """Equal loss on both arms, one shared gamma."""

    eta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class TwoArmIndependent:
    """Independent loss on both arms, one gamma per arm."""

    eta_a: float
    eta_b: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta_a <= 1.0:
            raise ValueError(f"eta_a must be in [0, 1], got {self.eta_a}")
        if not 0.0 <= self.eta_b <= 1.0:
            raise ValueError(f"eta_b must be in [0, 1], got {self.eta_b}")


LossFamily = Union[SingleArm, TwoArmSymmetric, TwoArmIndependent]


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a gamma minimization.

    argmin is a single gamma for one-dimensional families and a
    (gamma_a, gamma_b) pair for independent two-arm loss.
    """

    argmin: Union[float, tuple[float, float]]
    minimum: float
    evaluations: int
    converged: bool


class _Tracker:
    """Counts evaluations, enforces finiteness, remembers the best point."""

    def __init__(self, objective: Callable[[float], float], budget: int) -> None:
        self.objective = objective
        self.budget = budget
        self.count = 0
        self.best_x = math.nan
        self.best_y = math.inf

    def __call__(self, x: float) -> float:
        self.count += 1
        y = self.objective(x)
        if not math.isfinite(y):
            raise NonFiniteObjective(f"objective returned {y} at gamma={x}")
        if y < self.best_y:
            self.best_x, self.best_y = x, y
        return y

    @property
    def exhausted(self) -> bool:
        return self.count >= self.budget


def minimize_scalar(
    objective: Callable[[float], float], lo: float, hi: float, abs_tol: float = 1e-8
) -> OptimizationResult:
    """Grid-bracketed golden-section minimization on [lo, hi].

    A 129-point scan picks the basin (lowest argument wins ties), then
    golden-section refines it until the bracket width drops below
    abs_tol. Flat objectives short-circuit after the scan. The returned
    minimum is the best evaluation seen, so it never exceeds any grid
    value.

    Raises
    ------
    NonFiniteObjective
        If any evaluation is non-finite.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not abs_tol > 0.0:
        raise ValueError(f"abs_tol must be positive, got {abs_tol}")
    f = _Tracker(objective, _EVAL_BUDGET)
    step = (hi - lo) / (_COARSE_POINTS - 1)
    ys = []
    best_i = 0
    for i in range(_COARSE_POINTS):
        y = f(lo + i * step)
        ys.append(y)
        if y < ys[best_i]:
            best_i = i
    if max(ys) - min(ys) <= 1e-12 * max(1.0, abs(ys[best_i])):
        # constant on the grid: refinement has nothing to do
        return OptimizationResult(f.best_x, f.best_y, f.count, True)
    a = lo + max(best_i - 1, 0) * step
    b = lo + min(best_i + 1, _COARSE_POINTS - 1) * step
    h = b - a
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    yc = f(c)
    yd = f(d)
    while h > abs_tol and not f.exhausted:
        if yc <= yd:  # ties move left, keeping the lowest-gamma rule
            b, d, yd = d, c, yc
            h = b - a
            c = a + _INVPHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INVPHI * h
            yd = f(d)
    return OptimizationResult(f.best_x, f.best_y, f.count, h <= abs_tol)


def _is_flat(
    objective: Callable[[float], float], lo: float, hi: float, minimum: float
) -> bool:
    # three interior probes; a non-constant rational objective cannot
    # match the minimum at all of them to 1e-12 relative
    tol = 1e-12 * max(1.0, abs(minimum))
    return all(
        abs(objective(lo + frac * (hi - lo)) - minimum) <= tol
        for frac in (0.25, 0.5, 0.75)
    )


def _minimize_expanding(
    objective: Callable[[float], float], abs_tol: float
) -> OptimizationResult:
    """One-dimensional minimization with symmetric window growth.

    Starts on the standard gamma window and, while the scan's argmin
    sits on an edge, triples the width about the current window. Growth
    must be two-sided: these objectives share one horizontal asymptote
    in both directions, and near a divergence of the analytic optimum
    the interior minimum can sit far on the opposite side of the slope
    the initial window sees, so chasing the downhill edge alone would
    walk into the asymptote (and, eventually, into cancellation noise)
    instead of bracketing the true dip. Gives up with converged=False
    once the window hits the width cap.
    """
    lo, hi = _GAMMA_LO, _GAMMA_HI
    total_evals = 0
    while True:
        result = minimize_scalar(objective, lo, hi, abs_tol)
        total_evals += result.evaluations
        width = hi - lo
        cell = width / (_COARSE_POINTS - 1)
        on_edge = result.argmin <= lo + cell or result.argmin >= hi - cell
        if not on_edge or _is_flat(objective, lo, hi, result.minimum):
            return OptimizationResult(
                result.argmin, result.minimum, total_evals, result.converged
            )
        if 3.0 * width > _MAX_WIDTH:
            return OptimizationResult(result.argmin, result.minimum, total_evals, False)
        lo -= width
        hi += width


def _bound_value(cm: FisherMatrix, target: Target, mode: EstimationMode) -> float:
    if mode is EstimationMode.TWO_PARAMETER:
        return two_param_bound(cm, target)
    return cm.f_mm if target is Target.PHASE_DIFFERENCE else cm.f_pp


def optimize_gamma(
    stats: ModeStatistics,
    loss_family: LossFamily,
    target: Target,
    mode: EstimationMode = EstimationMode.TWO_PARAMETER,
    abs_tol: float = 1e-8,
) -> OptimizationResult:
    """Minimize the information bound over the loss distribution gamma.

    For SingleArm and TwoArmSymmetric this is one expanding-window
    scalar minimization; for TwoArmIndependent it alternates coordinate
    minimizations of (gamma_a, gamma_b) from (-0.5, -0.5), at most 50
    sweeps, stopping when neither coordinate moves by abs_tol.

    mode selects the quantity being minimized: the two-parameter
    Schur-complement bound (default) or the bare diagonal element used
    by single-parameter estimation.
    """
    if isinstance(loss_family, SingleArm):
        eta = loss_family.eta

        def objective(gamma: float) -> float:
            cm = c_matrix_single(stats, SingleArmLoss(eta, gamma))
            return _bound_value(cm, target, mode)

        return _minimize_expanding(objective, abs_tol)

    if isinstance(loss_family, TwoArmSymmetric):
        eta = loss_family.eta

        def objective(gamma: float) -> float:
            loss = TwoArmLoss(eta, eta, gamma, gamma)
            return _bound_value(c_matrix_two(stats, loss), target, mode)

        return _minimize_expanding(objective, abs_tol)

    if isinstance(loss_family, TwoArmIndependent):
        eta_a, eta_b = loss_family.eta_a, loss_family.eta_b

        def pair_value(gamma_a: float, gamma_b: float) -> float:
            loss = TwoArmLoss(eta_a, eta_b, gamma_a, gamma_b)
            return _bound_value(c_matrix_two(stats, loss), target, mode)

        gamma_a, gamma_b = -0.5, -0.5
        total_evals = 0
        last = OptimizationResult((gamma_a, gamma_b), math.inf, 0, False)
        converged = False
        for _ in range(50):
            res_a = _minimize_expanding(lambda g: pair_value(g, gamma_b), abs_tol)
            moved_a = abs(res_a.argmin - gamma_a)
            gamma_a = res_a.argmin
            res_b = _minimize_expanding(lambda g: pair_value(gamma_a, g), abs_tol)
            moved_b = abs(res_b.argmin - gamma_b)
            gamma_b = res_b.argmin
            total_evals += res_a.evaluations + res_b.evaluations
            last = res_b
            if moved_a < abs_tol and moved_b < abs_tol:
                converged = res_a.converged and res_b.converged
                break
        return OptimizationResult(
            (gamma_a, gamma_b), last.minimum, total_evals, converged
        )

    raise TypeError(f"unknown loss family: {loss_family!r}")
