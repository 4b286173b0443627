"""Exception types shared across the package.

Errors that carry a ``path`` point at the offending location in a scene
document or edit payload, e.g. ``blobs[0].aspect[1]``.
"""


class BlobfieldError(Exception):
    """Base class for every error raised by this package."""


class MalformedDocument(BlobfieldError):
    """Input bytes are not a syntactically valid document."""


class _PathedError(BlobfieldError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.detail = message


class SchemaViolation(_PathedError):
    """Document structure is wrong: missing, unknown, or mistyped fields."""


class InvariantViolation(_PathedError):
    """A well-formed value violates a documented invariant."""


class InvalidArgument(BlobfieldError):
    """An argument is outside the operation's documented domain."""


class OutOfBounds(BlobfieldError):
    """Pixel coordinates lie outside the image."""


class BehindCamera(BlobfieldError):
    """A point to be projected has non-positive camera-space depth."""


class OutOfImage(BlobfieldError):
    """A projected point lands outside the image rectangle."""


class EmptyScene(BlobfieldError):
    """An operation requires at least one active blob."""


class ShapeMismatch(BlobfieldError):
    """Array arguments have inconsistent shapes."""


class ResolutionMismatch(ShapeMismatch):
    """Image-shaped arguments disagree on resolution."""


class DimensionMismatch(ShapeMismatch):
    """Vector arguments disagree on channel dimension."""


class IndivisibleResolution(BlobfieldError):
    """A pyramid base resolution is not divisible by the requested factor."""


class ChannelsNotDivisible(BlobfieldError):
    """Channel count is not divisible as the rearrangement requires."""


class PaletteTooShort(BlobfieldError):
    """Fewer palette entries than blobs to colorize."""


class IndexOutOfRange(BlobfieldError):
    """A blob index does not exist in the scene."""


class NonFiniteObjective(BlobfieldError):
    """An objective evaluated to NaN or infinity."""


# Errors caused by bad user input; the CLI maps these to exit code 2.
VALIDATION_ERRORS = (
    MalformedDocument,
    SchemaViolation,
    InvariantViolation,
    InvalidArgument,
    OutOfBounds,
    BehindCamera,
    OutOfImage,
    EmptyScene,
    ShapeMismatch,
    IndivisibleResolution,
    ChannelsNotDivisible,
    PaletteTooShort,
    IndexOutOfRange,
)
