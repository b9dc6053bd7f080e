"""Exception types shared across the package.

The CLI maps :class:`ValidationError` subclasses to exit code 2 and every
other :class:`FiberTaperError` to exit code 1.
"""

from fibertaper.specfun import DomainError


class FiberTaperError(Exception):
    """Base class for all package errors."""


class ValidationError(FiberTaperError, ValueError):
    """Invalid input: bad spec, mode name, file contents or parameters."""


class BelowCutoff(FiberTaperError):
    """The requested mode is not guided at this radius."""


class BothBelowCutoff(BelowCutoff):
    """Neither mode of a beating pair is guided where it is needed."""


class NoConvergence(FiberTaperError):
    """A bracket or refinement failed; indicates a solver bug or a pathological spec."""


class EmptyCurve(FiberTaperError):
    """The whole requested radius range lies below the mode cutoff."""


class DegenerateFit(FiberTaperError):
    """The data cannot determine the fit parameters."""


class NyquistViolation(ValidationError):
    """Sample spacing too coarse for the fastest beat in the sweep."""


class WindowTooShort(ValidationError):
    """Analysis window spans too few samples."""


class ScanTooShort(ValidationError):
    """Near-field scan shorter than the slowest resolvable beat."""


class NoGuidedCandidate(FiberTaperError):
    """No candidate mode pair is guided anywhere in the sweep."""


class AmbiguousFit(FiberTaperError):
    """Two assignments fit equally well; the caller must decide.

    ``options`` holds the competing assignments as reported by the fitter.
    """

    def __init__(self, message, options=None):
        super().__init__(message)
        self.options = options or []


class NoFeasibleRadius(FiberTaperError):
    """Some observed index difference exceeds what any candidate can produce."""


__all__ = [
    "AmbiguousFit",
    "BelowCutoff",
    "BothBelowCutoff",
    "DegenerateFit",
    "DomainError",
    "EmptyCurve",
    "FiberTaperError",
    "NoConvergence",
    "NoFeasibleRadius",
    "NoGuidedCandidate",
    "NyquistViolation",
    "ScanTooShort",
    "ValidationError",
    "WindowTooShort",
]
