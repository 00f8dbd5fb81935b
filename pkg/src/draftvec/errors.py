"""Exception hierarchy shared across the package."""


class DraftvecError(Exception):
    """Base class for all draftvec-specific errors."""


class UnsupportedFormatError(DraftvecError):
    """Input file is not one of the supported raster formats."""


class CorruptImageError(DraftvecError):
    """Decoder rejected the file contents."""


class ImageTooSmallError(DraftvecError):
    """Operation requires a larger image."""


class ParseError(DraftvecError):
    """Malformed structured input (YOLO sidecar, CSV, config)."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc += f"{path}"
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class UnknownClassIdError(DraftvecError):
    """YOLO class id missing from the class map."""


class MissingSidecarError(DraftvecError):
    """Required detection sidecar file does not exist."""


class EmptyBoxError(DraftvecError):
    """Zero-area box where a positive-area region is required."""


class EmptyTruthError(DraftvecError):
    """Ground-truth string is empty."""


class BackendFailureError(DraftvecError):
    """OCR backend exited nonzero or produced a malformed reply."""


class SpecInfeasibleError(DraftvecError):
    """Rejection sampling could not place the requested entities."""


class ConfigError(DraftvecError):
    """Invalid pipeline configuration."""
