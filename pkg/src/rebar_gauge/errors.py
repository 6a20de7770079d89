"""Exception hierarchy shared across the package."""


class RebarGaugeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RebarGaugeError, ValueError):
    """Argument outside the mathematical or physical domain of an operation."""


class ConvergenceError(RebarGaugeError, ArithmeticError):
    """A series failed its truncation test within the configured order cap."""


class BandError(RebarGaugeError, ValueError):
    """Requested frequency band is empty or exceeds the Nyquist range."""


class GeometryMismatchError(RebarGaugeError, ValueError):
    """Traces, curves or grids that must share sampling do not."""


class DegenerateSignalError(RebarGaugeError, ValueError):
    """Signal or spectrum carries too little energy to be used."""


class OutOfRangeError(RebarGaugeError, ValueError):
    """Measured ratio is outside the image of the theoretical curve."""


class AmbiguityError(RebarGaugeError, ValueError):
    """Ratio falls on a non-monotone part of the curve."""


class BasisError(RebarGaugeError, ValueError):
    """Scattering matrix is in the wrong polarization basis."""


class WindowOverflowError(RebarGaugeError, ValueError):
    """Synthetic echo does not fit inside the trace window."""


class TraceFormatError(RebarGaugeError, ValueError):
    """Trace, B-scan, spectrum or scenario file is malformed."""
