"""Exception hierarchy shared by all invmeans modules."""


class MeansError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveInput(MeansError):
    """An argument was not a strictly positive finite real."""


class NumericOverflow(MeansError):
    """An evaluation produced a non-finite result."""


class DegenerateLimit(MeansError):
    """A guarded near-diagonal evaluation failed to produce a finite value."""


class DomainError(MeansError):
    """A transformed argument left the domain of the underlying mean."""


class StepUnderflow(MeansError):
    """A finite-difference stencil left the positive domain or collapsed to zero width."""


class InvalidBaseMean(MeansError):
    """The base mean lacks the flags required by the invariant construction."""


class NoConvergence(MeansError):
    """An iteration exceeded its step budget before reaching tolerance."""


class NoBracket(MeansError):
    """A bisection target does not change sign over the search interval."""


class NonIsotoneM(MeansError):
    """A fixed-point trace reversed direction; the mean is not isotone as flagged."""


class ContractionViolation(MeansError):
    """The fixed-point contraction bound does not hold at the evaluation point."""


class UnknownMean(MeansError):
    """A catalog id did not resolve to a mean."""
