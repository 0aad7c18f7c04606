"""Exception hierarchy shared by all semcom modules."""


class SemcomError(Exception):
    """Base class for every error raised by this package."""


# library
class DuplicateId(SemcomError):
    """Two node specs claim the same symbol id."""


class DanglingChild(SemcomError):
    """A node references a child id that does not exist in the library."""


class CycleDetected(SemcomError):
    """A node is reachable from itself through child edges."""


class UnknownSymbol(SemcomError):
    """A symbol id is not present in the library."""


class SchemaError(SemcomError):
    """A library file does not match the expected JSON schema."""


class LibraryIOError(SemcomError):
    """A library file could not be read or written."""


# transform
class NonLeafInput(SemcomError):
    """The recognizer was fed a sequence containing non-leaf symbols."""


# codec
class EmptyVocabulary(SemcomError):
    """A codebook was requested for an empty vocabulary."""


class SymbolNotInCodebook(SemcomError):
    """Tried to encode a symbol the codebook has no code for."""


class DanglingBits(SemcomError):
    """The bit stream ended in the middle of a codeword."""


class UnknownCodeword(SemcomError):
    """A fixed/robust chunk matched no codeword exactly."""


class LengthNotMultiple(SemcomError):
    """The stream length is not a multiple of the robust code length."""


# protocol
class LeafNotShared(SemcomError):
    """A leaf symbol of the message is missing from one of the libraries."""


# metrics
class LengthMismatch(SemcomError):
    """Positional accuracy needs two sequences of equal length."""


class EmptySequence(SemcomError):
    """Positional accuracy is undefined for empty sequences."""


# configuration
class ConfigError(SemcomError):
    """An experiment or session configuration is invalid."""
