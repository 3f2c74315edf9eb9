"""Exception hierarchy.

Every error raised on bad input derives from ``ValueError`` so that callers
which only care about "the data or configuration was wrong" can catch a
single type. Numerical failures derive from ``ArithmeticError``.
"""


class DomainError(ValueError):
    """An argument lies outside the support or parameter space."""


class NoFailures(DomainError):
    """A component has no observed failures, so its parameter is not identified."""


class InvalidLoss(DomainError):
    """GELF requested with ``c == 0`` or an unknown loss kind."""


class ImproperPosterior(DomainError):
    """The posterior normalizing constant diverges for this sample and prior."""


class GelfDomainError(DomainError):
    """A gamma or beta argument in a GELF expectation is not positive."""


class ImproperProposal(DomainError):
    """An importance-sampling proposal has a nonpositive shape or rate."""


class NonConvergence(ArithmeticError):
    """The ML solver hit its iteration cap.

    The best point found is kept on ``best`` together with the report.
    """

    def __init__(self, message, best=None, report=None):
        super().__init__(message)
        self.best = best
        self.report = report


class SingularInformation(ArithmeticError):
    """The observed information matrix cannot be inverted."""


class DegenerateWeights(ArithmeticError):
    """Importance weights collapsed onto too few draws."""


class PredictiveBracketError(ArithmeticError):
    """A predictive quantile could not be bracketed."""
