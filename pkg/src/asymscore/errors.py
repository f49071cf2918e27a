"""Exception hierarchy shared across the package."""


class AsymscoreError(Exception):
    """Base class for all package errors."""


class UnknownFamily(AsymscoreError):
    pass


class ParameterError(AsymscoreError):
    pass


class Atom(AsymscoreError):
    """Equal quantile values at adjacent probability levels."""

    def __init__(self, level_lo, level_hi):
        super().__init__(f"atom between levels {level_lo} and {level_hi}")
        self.levels = (level_lo, level_hi)


class Crossing(AsymscoreError):
    """Quantile values out of order at adjacent probability levels."""

    def __init__(self, level_lo, level_hi):
        super().__init__(f"crossing between levels {level_lo} and {level_hi}")
        self.levels = (level_lo, level_hi)


class TooFewLevels(AsymscoreError):
    pass


class DegenerateSpacing(AsymscoreError):
    pass


class TooFewSamples(AsymscoreError):
    pass


class ZeroVariance(AsymscoreError):
    pass


class MissingCapability(AsymscoreError):
    """The forecast representation lacks something the loss needs."""


class MomentRequired(AsymscoreError):
    """The loss needs a finite first moment and the distribution lacks one."""


class NonIntegrableWeight(AsymscoreError):
    pass


class NegativeSupportPowerWeight(AsymscoreError):
    pass


class NotSymmetricRescalable(AsymscoreError):
    pass


class NotRescalable(AsymscoreError):
    pass


class NotLogAffinePartition(AsymscoreError):
    pass


class ExpectationOutsideRange(AsymscoreError):
    pass


class NotAShift(AsymscoreError):
    pass


class SeriesTooShort(AsymscoreError):
    pass


class EmptyPairs(AsymscoreError):
    pass


class MinimizerAtBoundary(AsymscoreError):
    pass


class NonIntegrable(AsymscoreError):
    pass


class DataError(AsymscoreError):
    """Malformed input files."""


class NumericFailure(AsymscoreError):
    """Non-convergence of an iterative routine."""
