"""Exception hierarchy shared by all pfreq modules."""


class PFreqError(Exception):
    """Base class for every error raised by pfreq."""


class DomainError(PFreqError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NonConvergence(PFreqError, ArithmeticError):
    """An iterative kernel did not reach its tolerance."""


class InvalidBracket(PFreqError, ValueError):
    pass


class BracketFailure(NonConvergence):
    """No sign change could be located while building a bracket."""


class StepSizeUnderflow(NonConvergence):
    pass


class EventNotReached(NonConvergence):
    """An integration reached its safety horizon before the stopping event."""


class ZeroDenominator(PFreqError, ArithmeticError):
    pass
