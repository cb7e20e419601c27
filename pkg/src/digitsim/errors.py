"""Exception hierarchy shared by every module."""


class DigitSimError(Exception):
    """Base class for all library errors."""


class FormatError(DigitSimError, ValueError):
    """A file does not follow the expected container layout."""


class TruncationError(FormatError):
    """A file ends before its header says it should."""


class DimensionError(DigitSimError, ValueError):
    """Image dimensions do not match what the operation requires."""


class LabelRangeError(DigitSimError, ValueError):
    """A label byte lies outside 0..9."""


class EmptyClassError(DigitSimError, ValueError):
    """A digit has no samples to split."""


class WindowError(DigitSimError, ValueError):
    """The SSIM window does not fit inside the image."""


class EmptyPoolError(DigitSimError, ValueError):
    """A pool or comparand set has no members."""

    def __init__(self, message: str, digit: "int | None" = None):
        super().__init__(message)
        self.digit = digit


class RangeError(DigitSimError, ValueError):
    """A value falls outside the interval an operation accepts."""


class ConfigError(DigitSimError):
    """The run configuration is invalid or points at missing inputs."""


class StaleModelError(DigitSimError):
    """A persisted model was trained under a different configuration."""
