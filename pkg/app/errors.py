"""Exception hierarchy for GUI Verify.

Every error carries a stable ``code`` string. The CLI prints it on the error stream
and batch summaries record it per pair.
"""
from typing import Any, Dict, Optional, Tuple


class GuiVerifyError(Exception):
    """Base class for all errors raised by the verification pipeline."""

    code = "ERROR"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, **self.details}

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class MalformedDocument(GuiVerifyError):
    code = "MALFORMED_DOCUMENT"


class SchemaViolation(GuiVerifyError):
    code = "SCHEMA_VIOLATION"


class EmptyScreen(GuiVerifyError):
    code = "EMPTY_SCREEN"


class DecodeError(GuiVerifyError):
    code = "DECODE_ERROR"


class ZeroDimension(GuiVerifyError):
    code = "ZERO_DIMENSION"


class DimensionMismatch(GuiVerifyError):
    """Hierarchy and screenshot disagree on screen size."""

    code = "DIMENSION_MISMATCH"

    def __init__(
        self,
        hierarchy_size: Tuple[int, int],
        image_size: Tuple[int, int],
        origin: Optional[str] = None,
    ):
        where = f" ({origin})" if origin else ""
        super().__init__(
            f"hierarchy is {hierarchy_size[0]}x{hierarchy_size[1]} but image is "
            f"{image_size[0]}x{image_size[1]}{where}",
            hierarchy_size=list(hierarchy_size),
            image_size=list(image_size),
        )
        self.hierarchy_size = hierarchy_size
        self.image_size = image_size


class OutOfBounds(GuiVerifyError):
    code = "OUT_OF_BOUNDS"


class EmptyRegion(GuiVerifyError):
    code = "EMPTY_REGION"


class EmptyHistogram(GuiVerifyError):
    code = "EMPTY_HISTOGRAM"


class UnknownCategory(GuiVerifyError):
    code = "UNKNOWN_CATEGORY"


class VersionMismatch(GuiVerifyError):
    code = "VERSION_MISMATCH"


class IOFailure(GuiVerifyError):
    """Reading inputs or writing outputs failed."""

    code = "IO_ERROR"


class TargetNotFound(GuiVerifyError):
    code = "TARGET_NOT_FOUND"


class MutationOutOfBounds(GuiVerifyError):
    code = "MUTATION_OUT_OF_BOUNDS"


class InsufficientTargets(GuiVerifyError):
    code = "INSUFFICIENT_TARGETS"


class ConfigError(GuiVerifyError):
    code = "CONFIG_ERROR"
