"""Exceptions thrown"""
from typing import Optional


class RomlineageException(Exception):
    """Base class for every error raised by romlineage"""


# --- ROM images and catalogs ---

class RomException(RomlineageException):
    """Error loading or addressing a ROM image"""


class EmptyRomError(RomException):
    """ROM image has no bytes"""


class RomIoError(RomException):
    """ROM file could not be read"""


class RomTooLargeError(RomException):
    """ROM image exceeds the 1 MiB limit"""


class WindowError(RomException):
    """Requested window lies outside the image or the 16-bit address space"""


class WindowRequiredError(RomException):
    """Image does not fit the 16-bit address space; select a window first"""


class CatalogParseError(RomlineageException):
    """Malformed line in a machine catalog"""

    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


# --- Instruction decoding ---

class DecodeException(RomlineageException):
    """Error decoding a control-transfer instruction"""


class TruncatedInstructionError(DecodeException):
    """Instruction runs past the end of the image"""


class UnsupportedArchitectureError(DecodeException):
    """CPU family has no decoder"""


class EncodeException(RomlineageException):
    """Error encoding a control-transfer instruction"""


class DisplacementRangeError(EncodeException):
    """Relative displacement does not fit in a signed byte"""


class UnencodableTransferError(EncodeException):
    """Transfer kind/condition has no encoding on the architecture"""


# --- Patterns ---

class PatternException(RomlineageException):
    """Error compiling or applying a pattern"""


class DslSyntaxError(PatternException):
    """Unparseable pattern token"""

    def __init__(self, token: str, position: int, message: str = "bad token") -> None:
        self.token = token
        self.position = position
        super().__init__(f"{message}: {token!r} at token {position}")


class WeakPatternError(PatternException):
    """Pattern has fewer literal bytes than the false-positive floor"""


class DuplicateSlotError(PatternException):
    """Capture slot name used twice in one pattern"""


class PatternSizeError(PatternException):
    """Pattern window is wider than 64 bytes"""


class PatternTooLongError(PatternException):
    """Pattern is longer than the image it is applied to"""


# --- Signature database ---

class SignatureLoadError(RomlineageException):
    """Signature file entry failed to load"""

    def __init__(self, signature: Optional[str], cause: str, line: Optional[int] = None) -> None:
        self.signature = signature
        self.cause = cause
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"signature {signature or '<none>'}{where}: {cause}")


# --- Lineage ---

class ArchMismatchError(RomlineageException):
    """Signature database has nothing for the image architecture"""


class ThresholdError(RomlineageException):
    """Classification thresholds violate T_derived > T_original >= 0"""


# --- Similarity ---

class SimilarityException(RomlineageException):
    """Error fingerprinting or comparing images"""


class TooShortError(SimilarityException):
    """Image shorter than the gram length, or gram length below 4"""


class ParamMismatchError(SimilarityException):
    """Fingerprints were built with different parameters"""


# --- Reports ---

class NothingToEmitError(RomlineageException):
    """Routine map is empty, no symbol definitions to write"""
