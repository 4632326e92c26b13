"""Exception hierarchy."""


class NCDegreeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(NCDegreeError, ValueError):
    """A parameter lies outside its admissible range."""


class BoundsError(DomainError):
    """A photon number or truncation exceeds the supported cap."""


class TruncationError(DomainError):
    """A truncated expansion would discard too much probability weight.

    ``required`` is the smallest truncation that would have been accepted.
    """

    def __init__(self, message, required):
        super().__init__(message)
        self.required = required


class NormalizationError(DomainError):
    """Coefficients are not normalized (and too far off to renormalize)."""


class ArityError(NCDegreeError, ValueError):
    """A phase-space point or state has the wrong number of modes."""


class ParseError(NCDegreeError, ValueError):
    """Malformed state specification; ``position`` is a 0-based column."""

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class QuadratureConfigError(NCDegreeError, ValueError):
    """Quadrature grid too small, too coarse or too large."""


class BudgetError(NCDegreeError, ValueError):
    """A brute-force scan would exceed its evaluation budget."""


class UndefinedStatisticError(NCDegreeError, ArithmeticError):
    """The Mandel factor is undefined because the mean photon number vanishes."""


class ConvergenceError(NCDegreeError, RuntimeError):
    """No multistart local search converged; ``result`` holds the best so far."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
