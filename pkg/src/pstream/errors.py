"""Exception hierarchy shared across the simulator.

The CLI maps these onto exit codes: configuration problems exit 2, data and
contract problems exit 3, numerical problems exit 4.
"""


class PstreamError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PstreamError, ValueError):
    """An argument violates an operation's domain (negative power, zero wavelength, ...)."""


class ConfigError(PstreamError, ValueError):
    """Invalid or inconsistent experiment configuration."""


class DataError(PstreamError, ValueError):
    """Malformed input data: bad files, misaligned series, insufficient samples."""


class ContractError(DataError):
    """An internal contract was violated (unsorted events, invariant-breaking trains)."""


class TraceParseError(DataError):
    """A trace file could not be parsed; the message carries the byte or line offset."""


class NumericalError(PstreamError, ArithmeticError):
    """An estimator has no defined answer for this input (zero denominator, no spectral peak)."""
