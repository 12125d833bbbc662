"""Masked byte patterns: DSL compiler and ROM scanner with capture slots."""
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

import numpy as np

from .isa_decode import signext8
from .rom_image import ADDRESS_SPACE, RomImage
from .types_ import exceptions

if TYPE_CHECKING:
    from .signature_db import SignatureDb

log = logging.getLogger(__name__)

MIN_LITERALS = 6
MAX_PATTERN_BYTES = 64

_LITERAL_RE = re.compile(r"^[0-9A-Fa-f]{2}$")
_SLOT_RE = re.compile(r"^@([A-Za-z_][A-Za-z0-9_]*):([A-Za-z0-9]+)$")


class ElementKind(Enum):
    LITERAL = "literal"
    ANY = "any"
    CAPTURE_ABS16 = "abs16"
    CAPTURE_REL8 = "rel8"
    CAPTURE_BYTE = "byte"

    @property
    def width(self) -> int:
        return 2 if self is ElementKind.CAPTURE_ABS16 else 1

    @property
    def is_capture(self) -> bool:
        return self not in (ElementKind.LITERAL, ElementKind.ANY)


_SLOT_KINDS = {k.value: k for k in ElementKind if k.is_capture}


@dataclass(frozen=True)
class PatternElement:
    kind: ElementKind
    value: Optional[int] = None
    slot: Optional[str] = None

    @property
    def width(self) -> int:
        return self.kind.width

    def __str__(self) -> str:
        if self.kind is ElementKind.LITERAL:
            return f"{self.value:02X}"
        if self.kind is ElementKind.ANY:
            return "??"
        return f"@{self.slot}:{self.kind.value}"


@dataclass(frozen=True)
class Slot:
    name: str
    position: int
    kind: ElementKind


@dataclass(frozen=True)
class Pattern:
    """
    Compiled pattern. literals and slots hold window positions,
    so scanning never walks the element list again.
    """
    elements: Tuple[PatternElement, ...]
    source_text: str
    name: str = ""
    # --- Derived ---
    byte_len: int = field(init=False)
    literal_count: int = field(init=False)
    literals: Tuple[Tuple[int, int], ...] = field(init=False, repr=False)
    slots: Tuple[Slot, ...] = field(init=False, repr=False)

    def __post_init__(self):
        position = 0
        literals = []
        slots = []
        for element in self.elements:
            if element.kind is ElementKind.LITERAL:
                literals.append((position, element.value))
            elif element.kind.is_capture:
                slots.append(Slot(element.slot, position, element.kind))
            position += element.width
        object.__setattr__(self, "byte_len", position)
        object.__setattr__(self, "literal_count", len(literals))
        object.__setattr__(self, "literals", tuple(literals))
        object.__setattr__(self, "slots", tuple(slots))

    @property
    def slot_names(self) -> List[str]:
        return [s.name for s in self.slots]

    def canonical_text(self) -> str:
        return " ".join(str(e) for e in self.elements)


@dataclass(frozen=True)
class MatchHit:
    """One pattern occurrence; captures map slot name to its resolved 16-bit value."""
    offset: int
    address: int
    captures: Dict[str, int]
    pattern_name: str

    def sort_key(self) -> Tuple[int, str]:
        return self.offset, self.pattern_name


def compile_pattern(dsl_text: str, *, name: str = "", min_literals: int = MIN_LITERALS) -> Pattern:
    """
    Compiles whitespace-separated pattern tokens.

    Tokens: `HH` literal byte (hex, any case), `??` any byte,
    `@name:abs16` little-endian address, `@name:rel8` relative displacement
    resolved to an absolute address, `@name:byte` raw byte.

    Args:
        dsl_text: pattern source
        name: label carried into match hits
        min_literals: false-positive floor; tests may lower it

    Raises:
        DslSyntaxError: unknown token or empty pattern
        DuplicateSlotError: slot name repeated
        WeakPatternError: fewer literal bytes than min_literals
        PatternSizeError: window wider than 64 bytes
    """
    tokens = dsl_text.split()
    if not tokens:
        raise exceptions.DslSyntaxError(dsl_text, 0, "empty pattern")

    elements: List[PatternElement] = []
    seen_slots = set()
    for position, token in enumerate(tokens):
        if _LITERAL_RE.match(token):
            elements.append(PatternElement(ElementKind.LITERAL, int(token, 16)))
            continue
        if token == "??":
            elements.append(PatternElement(ElementKind.ANY))
            continue
        slot_match = _SLOT_RE.match(token)
        if not slot_match:
            raise exceptions.DslSyntaxError(token, position)
        slot_name, kind_text = slot_match.groups()
        kind = _SLOT_KINDS.get(kind_text.lower())
        if kind is None:
            raise exceptions.DslSyntaxError(token, position, f"unknown slot type {kind_text!r}")
        if slot_name in seen_slots:
            raise exceptions.DuplicateSlotError(f"Slot '{slot_name}' appears twice in pattern {dsl_text!r}")
        seen_slots.add(slot_name)
        elements.append(PatternElement(kind, slot=slot_name))

    pattern = Pattern(tuple(elements), dsl_text.strip(), name)
    if pattern.byte_len > MAX_PATTERN_BYTES:
        raise exceptions.PatternSizeError(
            f"Pattern {dsl_text!r} spans {pattern.byte_len} bytes, limit is {MAX_PATTERN_BYTES}")
    if pattern.literal_count < min_literals:
        raise exceptions.WeakPatternError(
            f"Pattern {dsl_text!r} has {pattern.literal_count} literal bytes, at least {min_literals} required")
    return pattern


def _resolve_slot(rom: RomImage, offset: int, slot: Slot) -> int:
    at = offset + slot.position
    if slot.kind is ElementKind.CAPTURE_ABS16:
        return rom.data[at] | rom.data[at + 1] << 8
    if slot.kind is ElementKind.CAPTURE_REL8:
        # relative to the byte after the operand, as Z80 JR and 6502 Bxx
        return (rom.address_of(at) + 1 + signext8(rom.data[at])) % ADDRESS_SPACE
    return rom.data[at]


def scan(rom: RomImage, pattern: Pattern, *, name: Optional[str] = None) -> List[MatchHit]:
    """
    Finds every offset where all literal bytes of the pattern match.

    Args:
        rom: image to scan (its 16-bit window must hold)
        pattern: compiled pattern
        name: pattern_name for the hits, defaults to the pattern's name or source

    Returns:
        List[MatchHit]: ascending offsets, overlapping hits included

    Raises:
        PatternTooLongError: pattern wider than the image
        WindowRequiredError: image overflows 0xFFFF
    """
    rom.require_window()
    if pattern.byte_len > len(rom.data):
        raise exceptions.PatternTooLongError(
            f"Pattern of {pattern.byte_len} bytes is longer than '{rom.source_name}' ({len(rom.data)} bytes)")

    data = np.frombuffer(rom.data, dtype=np.uint8)
    count = len(data) - pattern.byte_len + 1
    if pattern.literals:
        # first literal selects candidates, the rest filter them
        first_pos, first_value = pattern.literals[0]
        candidates = np.flatnonzero(data[first_pos:first_pos + count] == first_value)
        for position, value in pattern.literals[1:]:
            if not candidates.size:
                break
            candidates = candidates[data[candidates + position] == value]
    else:
        candidates = np.arange(count)

    label = name or pattern.name or pattern.source_text
    hits = []
    for offset in candidates.tolist():
        captures = {slot.name: _resolve_slot(rom, offset, slot) for slot in pattern.slots}
        hits.append(MatchHit(offset, rom.address_of(offset), captures, label))
    log.debug(f"Pattern '{label}' matched {len(hits)} time(s) in {rom.source_name}")
    return hits


def scan_all(rom: RomImage, db: "SignatureDb") -> List[MatchHit]:
    """
    Scans with every signature of the database.

    Signatures wider than the image cannot match and contribute nothing.

    Returns:
        List[MatchHit]: hits tagged with signature names, ordered by (offset, pattern_name)
    """
    hits: List[MatchHit] = []
    for signature in db.signatures:
        if signature.pattern.byte_len > len(rom.data):
            log.debug(f"Skipping '{signature.name}': {signature.pattern.byte_len} bytes, image is {len(rom.data)}")
            continue
        hits.extend(scan(rom, signature.pattern, name=signature.name))
    hits.sort(key=MatchHit.sort_key)
    log.info(f"Scanned {rom.source_name} with {len(db.signatures)} signature(s): {len(hits)} hit(s)")
    return hits
