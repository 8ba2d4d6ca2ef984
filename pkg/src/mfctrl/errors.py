"""Exception types raised across the toolkit."""


class MfcError(Exception):
    """Base class for all toolkit errors."""


class OutOfOrderSampleError(MfcError):
    """A sample was pushed with a timestamp not strictly after the newest one."""


class InsufficientDataError(MfcError):
    """An estimate was requested from a window with fewer than 2 samples."""


class NonFiniteValueError(MfcError):
    """A NaN or infinity reached a numeric operation."""


class UndefinedScaleError(MfcError):
    """Input/output histories carry no usable magnitude information."""


class ConfigError(MfcError):
    """A scenario or channel configuration violates its invariants."""


class DivergenceError(MfcError):
    """A simulated plant state exceeded the blow-up guard."""


class CsvIoError(MfcError):
    """Reading or writing a record CSV failed; message carries the path."""
