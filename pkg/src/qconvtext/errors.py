"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1, data
problems exit 2, verification failures exit 3.
"""


class QConvTextError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(QConvTextError, ValueError):
    """Invalid register sizes, qubit indices, shapes, or option combinations."""


class NumericError(QConvTextError, ValueError):
    """Non-finite or otherwise unusable numeric input."""


class DegenerateVectorError(QConvTextError, ValueError):
    """A vector whose norm is too small to encode into amplitudes."""


class DataError(QConvTextError, ValueError):
    """Malformed, missing, or inconsistent dataset content."""


class VocabularyError(QConvTextError, KeyError):
    """Token or index outside the vocabulary."""


class VerificationError(QConvTextError):
    """A self-check (e.g. gradient verification) did not meet its tolerance."""
