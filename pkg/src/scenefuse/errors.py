"""Exception taxonomy shared by every scenefuse module.

Each condition a caller can reasonably branch on gets its own class; all of
them derive from :class:`SceneFuseError` so blanket handling stays easy.
"""


class SceneFuseError(Exception):
    """Base class for all scenefuse domain errors."""


# --- audio ingestion -------------------------------------------------------

class MalformedRiff(SceneFuseError):
    """RIFF/WAVE container is structurally broken (magic, chunk sizes)."""


class UnsupportedFormat(SceneFuseError):
    """WAV is intact but not 16-bit integer PCM with 1-2 channels."""


class EmptyData(SceneFuseError):
    """WAV data chunk holds zero samples."""


class ClipTooShort(SceneFuseError):
    """Clip is shorter than the requested analysis window."""


class BadProfile(SceneFuseError):
    """Synthesis envelope is empty or has an invalid band/gain."""


# --- clustering ------------------------------------------------------------

class ZeroK(SceneFuseError):
    """Requested cluster count is below one."""


class TooFewPoints(SceneFuseError):
    """Fewer training points than clusters."""


class DimensionMismatch(SceneFuseError):
    """Vectors of different lengths were mixed together."""


# --- image ingestion -------------------------------------------------------

class BadMagic(SceneFuseError):
    """Image bytes do not start with the P6 magic."""


class BadHeader(SceneFuseError):
    """PPM header fields are unparseable or out of range."""


class UnsupportedMaxval(SceneFuseError):
    """PPM maxval other than 255."""


class TruncatedPixelData(SceneFuseError):
    """Pixel payload length disagrees with the header dimensions."""


class DegenerateImage(SceneFuseError):
    """Image has fewer distinct colors than the palette asks for."""


class BadSpec(SceneFuseError):
    """Synthetic image spec has bad colors or fractions not summing to 1."""


# --- scene model -----------------------------------------------------------

class InconsistentDims(SceneFuseError):
    """Training vectors do not all share one length."""


class TooFewExamples(SceneFuseError):
    """Not enough labeled examples to fit one cluster per scene."""


class ModalityMismatch(SceneFuseError):
    """Acoustic data handed to a visual consumer or vice versa."""


# --- fusion ----------------------------------------------------------------

class ClockSkew(SceneFuseError):
    """An event carried a timestamp earlier than one already observed."""


# --- action learning -------------------------------------------------------

class EmptyTrainingSet(SceneFuseError):
    """No scene/action pairs were provided."""


class ConflictingExamples(SceneFuseError):
    """The same scene label maps to two different action codes."""


class UnknownLabel(SceneFuseError):
    """Scene label absent from the trained vocabulary."""


# --- persistence / CLI -----------------------------------------------------

class IoError(SceneFuseError):
    """Bundle or script file could not be read or written.

    Distinct from the builtin ``IOError`` alias; this one is raised only by
    scenefuse persistence helpers and wraps the underlying ``OSError``.
    """


class BadVersion(SceneFuseError):
    """Bundle format_version is not one this build understands."""


class SchemaError(SceneFuseError):
    """Bundle or event script parsed but does not match the schema."""


class MissingClassifier(SceneFuseError):
    """Bundle lacks the classifier or net the command needs."""
