"""Exception hierarchy.

Two families: bad inputs (``ValidationError``) and numerical breakdowns
(``NumericalError``).  The CLI maps them to exit codes 1 and 2.
"""


class StirapError(Exception):
    pass


class ValidationError(StirapError, ValueError):
    pass


class NumericalError(StirapError, ArithmeticError):
    pass


class InvalidEpsilon(ValidationError):
    pass


class InvalidDelta(ValidationError):
    pass


class SingularAngle(ValidationError):
    """Raised when |sin(gamma)| gets too small for cot(gamma) to be usable."""


class ConfigError(ValidationError):
    pass


class DegeneratePulse(NumericalError):
    """Both Rabi frequencies vanish, so the mixing angle is undefined."""


class QuadratureFailure(NumericalError):
    pass


class StepSizeError(NumericalError):
    pass
