"""Exception hierarchy shared by all modules."""


class AdiabaticError(Exception):
    """Base class for every error raised by :mod:`adiapert`."""


class NonHermitian(AdiabaticError, ValueError):
    pass


class DegeneracyMismatch(AdiabaticError, ValueError):
    pass


class BlockOverlapSingular(AdiabaticError, ArithmeticError):
    pass


class SameBlock(AdiabaticError, ValueError):
    pass


class ZeroGap(AdiabaticError, ValueError):
    pass


class NonPositiveGap(AdiabaticError, ValueError):
    pass


class NonPositiveInput(AdiabaticError, ValueError):
    pass


class DegenerateLevel(AdiabaticError, ValueError):
    pass


class BlockGapViolation(AdiabaticError, ArithmeticError):
    pass


class SupportViolation(AdiabaticError, ValueError):
    pass


class StepUnderflow(AdiabaticError, ArithmeticError):
    pass


class CrossingDetected(AdiabaticError, ArithmeticError):
    pass


class QubitOverlap(AdiabaticError, ValueError):
    pass


class DimensionOverflow(AdiabaticError, ValueError):
    pass


class OutOfRange(AdiabaticError, ValueError):
    pass


class GapScanFailure(AdiabaticError, ArithmeticError):
    pass


class EndpointMismatch(AdiabaticError, ValueError):
    pass


class ConfigInvalid(AdiabaticError, ValueError):
    pass


class PerturbativeRegimeViolated(UserWarning):
    """Issued (not raised) when hbar/(gap*T) >= 1; results are still returned."""
