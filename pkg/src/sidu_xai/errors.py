"""Exception types shared across the package."""


class SiduError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SiduError, ValueError):
    """An argument violates an operation's precondition."""


class TensorFormatError(SiduError):
    """A tensor file is malformed; ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ManifestError(SiduError):
    """A file-adapter manifest failed to parse or validate."""


class RecordNotFoundError(SiduError, KeyError):
    """A file-backed adapter has no record for the queried image hash."""

    def __init__(self, image_hash: str, kind: str):
        super().__init__(f"no stored {kind} for image hash {image_hash}")
        self.image_hash = image_hash


class CapabilityError(SiduError):
    """The adapter does not support the requested operation."""


class AdapterError(SiduError):
    """The adapter backend failed while serving a request."""


class UndefinedCorrelationError(InvalidArgumentError):
    """Correlation is undefined because one of the maps is constant."""
