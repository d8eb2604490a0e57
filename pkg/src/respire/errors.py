"""Exception types shared across the pipeline stages.

Plain I/O failures (missing files, unreadable paths) raise the builtin
OSError family; everything domain-specific lives here so callers can map
failures to exit codes without string matching.
"""


class RespireError(Exception):
    """Base class for all domain errors raised by this package."""


# -- corpus parsing ---------------------------------------------------------

class MalformedFilename(RespireError):
    """Base filename does not split into the five expected fields."""


class NonNumericAge(MalformedFilename):
    """Age field of a filename is not a nonnegative number."""


class SchemaError(RespireError):
    """Annotation document is missing required keys or uses unknown labels."""


class RangeError(RespireError):
    """Annotated event interval is inverted or negative."""


class EmptyCorpus(RespireError):
    """Corpus root contains no audio files at all."""


# -- audio ------------------------------------------------------------------

class UnsupportedFormat(RespireError):
    """WAV file uses a codec or layout outside PCM16 / float32, 1-2 channels."""


class TruncatedFile(RespireError):
    """WAV file ends before the declared chunk data."""


class EventOutOfBounds(RespireError):
    """Annotated event extends past the end of the decoded waveform."""


# -- embedding --------------------------------------------------------------

class ProviderUnavailable(RespireError):
    """Embedding endpoint kept failing after the configured retries."""


class DimensionMismatch(RespireError):
    """Vector length differs from what the model or provider requires."""


class NpyHeaderError(RespireError):
    """File is not a well-formed NPY v1.0 array."""


class DtypeUnsupported(RespireError):
    """Array dtype outside the supported {float32, int64} pair."""


# -- training / evaluation --------------------------------------------------

class SingleClassData(RespireError):
    """Labels contain only one class where both are required."""


class NonFiniteFeature(RespireError):
    """Feature matrix contains NaN or infinite entries."""


class LengthMismatch(RespireError):
    """Paired sequences differ in length."""


class NotFitted(RespireError):
    """Estimator used before fit()."""


class VersionMismatch(RespireError):
    """Model file has a wrong magic header or an unsupported format version."""


class DegenerateData(RespireError):
    """Data has zero total variance; projection is undefined."""


# -- review -----------------------------------------------------------------

class UnknownClipId(RespireError):
    """Verdict references a clip id absent from the label set."""
