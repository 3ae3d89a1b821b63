"""Exception types shared across the package."""


class PhaseboundError(Exception):
    """Base class for all package-specific errors."""


class DegenerateStatistics(PhaseboundError):
    """Photon-number statistics make a required quantity undefined.

    Raised when a Mandel Q denominator (a mean photon number) or a
    correlation denominator (a variance product) vanishes, or when the
    intermode correlation sits exactly at |J| = 1 where the analytic
    optimum formulas are singular.
    """


class SingularComplement(PhaseboundError):
    """Schur complement undefined: complementary diagonal element is
    (numerically) zero while the off-diagonal element is not."""


class NonpositiveInformation(PhaseboundError):
    """A Cramer-Rao bound was requested for information <= 0."""


class CutoffTooSmall(PhaseboundError):
    """A truncated Fock-space computation cannot meet its accuracy gate
    at the available cutoff; the oracle refuses rather than silently
    returning truncation-polluted numbers."""


class NonFiniteObjective(PhaseboundError):
    """The scalar minimizer evaluated the objective to NaN or infinity."""


class AssumptionViolation(PhaseboundError, UserWarning):
    """The inputs fall outside a closed form's stated regime of validity.

    Used both ways: raised as an exception for hard domain violations
    (e.g. eta = 1 in the high-loss forms, whose derivation assumes loss)
    and issued via ``warnings.warn`` when statistics merely miss the
    soft regime gates (approximately equal variances, |J| near 1).
    """
