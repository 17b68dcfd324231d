"""Exception hierarchy shared by all viewmatch modules."""

__all__ = [
    "ViewmatchError",
    "DegenerateDescriptorError",
    "FormatError",
    "CorruptFileError",
    "EmptyMaskError",
    "CorruptRleError",
    "ValidationError",
]


class ViewmatchError(Exception):
    """Base class for errors raised by this package."""


class DegenerateDescriptorError(ViewmatchError):
    """A descriptor with (near-)zero norm cannot be normalized."""


class FormatError(ViewmatchError):
    """A file does not look like the expected format (bad magic, version, rank)."""


class CorruptFileError(ViewmatchError):
    """A file has the right format markers but inconsistent contents."""


class EmptyMaskError(ViewmatchError):
    """A binary mask with no foreground pixels where foreground is required."""


class CorruptRleError(ViewmatchError):
    """A run-length encoding whose counts are inconsistent with its size."""


class ValidationError(ViewmatchError):
    """Inputs that are structurally valid but semantically inconsistent."""
