"""Exception hierarchy.

Every error raised by the library derives from :class:`BochnerError`.
Errors that signal a numerical breakdown (singular systems, loss of
positivity) derive from :class:`NumericalBreakdown`; the CLI maps those to
exit code 4.
"""


class BochnerError(Exception):
    """Base class for all library errors."""


class NumericalBreakdown(BochnerError):
    """A linear system or factorization became numerically singular."""


class NonIntegrableWeight(BochnerError, ValueError):
    """A boundary exponent is <= -1, so the weight has no finite moments."""


# alias used by the classification layer
NonIntegrable = NonIntegrableWeight


class PoleOnSupport(BochnerError):
    """A quadrature node hits a pole of a weight's smooth factor."""


class EstimatedError(BochnerError):
    """Quadrature doubling check failed.

    Attributes
    ----------
    coarse, fine : ndarray
        Results at m and 2m nodes.
    """

    def __init__(self, msg, coarse=None, fine=None):
        super().__init__(msg)
        self.coarse = coarse
        self.fine = fine


class TruncationError(BochnerError):
    """A band composition needed coefficients outside the tabulated range."""


class GramBreakdown(NumericalBreakdown):
    """A norm matrix M(n) is numerically singular."""


class SingularUpdate(NumericalBreakdown):
    """The vectorized update system at step n is singular."""

    def __init__(self, n, msg=None):
        super().__init__(msg or f"singular update system at n={n}")
        self.n = n


class SingularH(NumericalBreakdown):
    """H(k) is singular at a point required by the closed form."""

    def __init__(self, k, msg=None):
        super().__init__(msg or f"H({k}) is singular")
        self.k = k


class SingularNorm(NumericalBreakdown):
    """A norm matrix that must be inverted is singular."""


class NonPositiveNorm(NumericalBreakdown):
    """A norm matrix is not positive definite."""


class NoCommutatorError(BochnerError):
    """[B(n), Lambda(n)] vanishes, so the norm cannot be recovered from B."""


class PoleInN(BochnerError):
    """A closed-form rational expression in n is evaluated at a pole."""


class ComplexScale(BochnerError):
    """The squared scale s^2 of a family weight is not positive."""


class DegenerateDenominator(BochnerError):
    """A denominator in a family formula vanishes or has the wrong sign."""


class NoWeightSolution(BochnerError):
    """No (or no unique) weight solves the Pearson and auxiliary equations."""


class NotPositiveDefinite(BochnerError):
    """A constructed weight fails positivity at some quadrature node."""


class DegenerateEigen(BochnerError):
    """A matrix that must be diagonalized has repeated or complex eigenvalues."""


class NormalizationImpossible(BochnerError):
    """No conjugation reaches the requested normal form."""


class NonDiagonalizableA0(BochnerError):
    """A0 is not diagonalizable over the reals."""


class DiagonalityViolated(BochnerError):
    """A factorization product that must be diagonal is not."""

    def __init__(self, which, msg=None):
        super().__init__(msg or f"product {which} is not diagonal")
        self.which = which


class DeterminantMismatch(BochnerError):
    """det(Ax + B) does not equal sign * a2(x)."""


class SymmetryConditionFailed(BochnerError):
    """The Darboux symmetry condition fails on polynomial probes."""

    def __init__(self, residual, msg=None):
        super().__init__(msg or f"symmetry condition residual {residual:.3e}")
        self.residual = residual


class BoundaryTermNonzero(BochnerError):
    """A boundary concomitant does not vanish at an endpoint."""


class SingularIntertwiner(NumericalBreakdown):
    """An + C is singular."""

    def __init__(self, n, msg=None):
        super().__init__(msg or f"An + C singular at n={n}")
        self.n = n


class ConfigError(BochnerError, ValueError):
    """Invalid run configuration or input document."""
