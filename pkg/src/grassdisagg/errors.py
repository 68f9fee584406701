"""Exception hierarchy shared by all modules.

Two broad families matter for the CLI exit codes: data/validation problems
(exit 2) and numerical failures (exit 3).
"""


class GrassDisaggError(Exception):
    """Base class for every error raised by this package."""


class DataError(GrassDisaggError):
    """Invalid input data, configuration, or violated preconditions."""


class NumericalError(GrassDisaggError):
    """A computation failed numerically (non-finite values, degenerate sums)."""


# --- data / validation -----------------------------------------------------

class SchemaError(DataError):
    """CSV header does not provide the required columns."""


class MissingPeriod(DataError):
    """A (site, year) group lacks one of the 37 ten-day periods."""


class NonNumeric(DataError):
    """A cell could not be parsed as a number."""


class InvariantViolation(DataError):
    """A record violates a domain invariant (negative growth, bad ordering...)."""


class ImMismatch(DataError):
    """The aridity-index column disagrees with the value recomputed from rain/temperature."""


class DomainError(DataError):
    """Argument outside the mathematical domain of an operation."""


class LengthError(DataError):
    """A series does not have the expected number of values."""


class LengthMismatch(DataError):
    """Two series that must be aligned have different lengths."""


class EmptySeries(DataError):
    """An operation received an empty series."""


class EmptyDataset(DataError):
    """An operation received a dataset with no records."""


class TooFewSites(DataError):
    """A site-based split needs at least two distinct sites."""


class ConfigError(DataError):
    """Invalid run configuration."""


class MissingCumulative(DataError):
    """The requested reconstruction needs the annual cumulative value."""


class WidthMismatch(DataError):
    """A feature vector does not match the width the model was trained on."""


class ShapeError(DataError):
    """A matrix argument has an unusable shape."""


class IoError(DataError):
    """A file could not be read or written."""


# --- numerical -------------------------------------------------------------

class DegenerateInput(NumericalError):
    """Training data too small or too degenerate to fit the requested model."""


class ZeroSumScale(NumericalError):
    """Sum-preserving rescaling is impossible because the series sums to ~0."""


class PredictionNonFinite(NumericalError):
    """A model returned NaN/Inf during recursive reconstruction."""
