"""Exception types raised across the package.

Everything derives from EmgPipeError so callers (and the CLI) can catch
data and model errors with a single except clause.
"""


class EmgPipeError(Exception):
    """Base class for all errors raised by this package."""


# signal processing

class WindowTooLong(EmgPipeError):
    """Requested window length exceeds the source series length."""


class InvalidOverlap(EmgPipeError):
    """Overlap fraction outside [0, 1)."""


class TooShort(EmgPipeError):
    """Input has too few samples for the requested operation."""


class InconsistentSubbands(EmgPipeError):
    """Subband lengths cannot reconstruct the stored original length."""


# features

class EmptySpectrum(EmgPipeError):
    """Periodogram with zero total power."""


class LengthMismatch(EmgPipeError):
    """Paired inputs have different lengths."""


# models

class TooFewRows(EmgPipeError):
    """Not enough rows to fit."""


class WidthMismatch(EmgPipeError):
    """Row width differs from the fitted width."""


class EmptyDataset(EmgPipeError):
    """No training rows supplied."""


class LabelMismatch(EmgPipeError):
    """Label count differs from row count."""


class TooFewSamples(EmgPipeError):
    """Fewer samples than cross-validation folds."""


class ShapeMismatch(EmgPipeError):
    """Array shapes disagree."""


# evaluation

class TooFew(EmgPipeError):
    """Too few samples to split."""


class LabelOutOfRange(EmgPipeError):
    """Label outside the configured class range."""


class EmptyMatrix(EmgPipeError):
    """Confusion matrix with zero total count."""


class TooFewReps(EmgPipeError):
    """Benchmark repetition count below the minimum of 5."""


# data handling

class MissingFile(EmgPipeError):
    """Referenced file does not exist."""


class BadHeader(EmgPipeError):
    """CSV header differs from the documented layout."""


class NonUniformSampling(EmgPipeError):
    """Timestamps deviate from a uniform 1 ms grid by more than 1%."""


class NonFiniteValue(EmgPipeError):
    """NaN or infinity encountered where finite values are required."""


class MissingInput(EmgPipeError):
    """A required input file or directory was not supplied or not found."""
