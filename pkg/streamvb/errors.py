"""Exception hierarchy for streamvb"""


class StreamVBError(Exception):
    """Base class for all streamvb errors"""


class InvalidParameterError(StreamVBError, ValueError):
    """A parameter lies outside its valid domain"""

    def __init__(self, message: str, component: str | None = None):
        self.component = component
        if component is not None:
            message = f"{message} (component: {component})"
        super().__init__(message)


class FamilyMismatchError(StreamVBError):
    """Two natural-parameter vectors belong to different families"""


class SupportError(StreamVBError, ValueError):
    """An observation lies outside the support of a family or likelihood"""


class EmptyBatchError(StreamVBError, ValueError):
    """A fit or metric was requested on an empty batch"""


class ConsistencyError(StreamVBError):
    """Internal invariant violated (for example an ELBO decrease)"""


class UnsupportedModelError(StreamVBError):
    """A learner cannot be applied to the given model"""


class ConfigError(StreamVBError):
    """Invalid or missing configuration"""


class StreamFormatError(StreamVBError):
    """Malformed stream input"""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class TraceFormatError(StreamVBError):
    """Malformed trace file"""

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class UnsupportedFamilyError(StreamVBError):
    """An operation is not defined for the given family"""
