"""Typed enums and data structures for the project."""
from enum import Enum
from typing import Optional


class Architecture(Enum):
    """
    CPU families with a control-transfer decoder.
    Both use little-endian 16-bit operands.
    """

    Z80 = "z80"
    M6502 = "6502"

    @classmethod
    def parse(cls, text: str) -> "Architecture":
        key = text.strip().lower()
        for arch in cls:
            if key in (arch.value, arch.name.lower()):
                return arch
        raise ValueError(f"Unknown architecture: {text!r}")


class Family(Enum):
    """
    BASIC interpreter families that signatures are bound to
    """

    MICROSOFT = "microsoft"
    SINCLAIR = "sinclair"
    HUBASIC = "hubasic"

    @property
    def label(self) -> str:
        return {"microsoft": "Microsoft", "sinclair": "Sinclair", "hubasic": "HuBasic"}[self.value]

    @classmethod
    def parse(cls, text: str) -> "Family":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"Unknown family: {text!r}") from None


class ExpectedLineage(Enum):
    """
    Lineage a catalog entry is expected to show
    """

    MICROSOFT = "microsoft"
    SINCLAIR = "sinclair"
    HUBASIC = "hubasic"
    ORIGINAL = "original"
    UNKNOWN = "unknown"

    @property
    def family(self) -> Optional[Family]:
        """Family for the derived-from values, None for original/unknown."""
        try:
            return Family(self.value)
        except ValueError:
            return None

    @classmethod
    def parse(cls, text: str) -> "ExpectedLineage":
        key = text.strip().lower() or "unknown"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"Unknown lineage: {text!r}") from None


class TransferKind(Enum):
    """
    Classification of a decoded instruction
    """

    CALL_ABS = "CallAbs"
    JUMP_ABS = "JumpAbs"
    JUMP_REL = "JumpRel"
    BRANCH_REL = "BranchRel"
    RTS_RETURN = "RtsReturn"
    OTHER = "Other"

    @property
    def has_target(self) -> bool:
        return self in (TransferKind.CALL_ABS, TransferKind.JUMP_ABS,
                        TransferKind.JUMP_REL, TransferKind.BRANCH_REL)

    @property
    def is_relative(self) -> bool:
        return self in (TransferKind.JUMP_REL, TransferKind.BRANCH_REL)


class VerdictKind(Enum):
    """
    Outcome of lineage classification
    """

    DERIVED_FROM = "DerivedFrom"
    ORIGINAL = "Original"
    INCONCLUSIVE = "Inconclusive"


class Confidence(Enum):
    HIGH = "High"
    LOW = "Low"


class DefsFormat(Enum):
    """
    Output dialect for emit_defs
    """

    ASM = "asm"
    HEADER = "header"
