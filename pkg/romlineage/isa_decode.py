"""Z80 and 6502 control-transfer decoding: CALL/JP/JR, JSR/JMP/Bxx and returns."""
import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

from .rom_image import ADDRESS_SPACE, RomImage
from .types_ import exceptions
from .types_.types import Architecture, TransferKind

log = logging.getLogger(__name__)

INDIRECT = "indirect"
RST = "rst"


class OpcodeInfo(NamedTuple):
    kind: TransferKind
    length: int
    condition: Optional[str]


def _z80_table() -> Dict[int, OpcodeInfo]:
    table = {
        0xCD: OpcodeInfo(TransferKind.CALL_ABS, 3, None),
        0xC3: OpcodeInfo(TransferKind.JUMP_ABS, 3, None),
        0x18: OpcodeInfo(TransferKind.JUMP_REL, 2, None),
        0xC9: OpcodeInfo(TransferKind.RTS_RETURN, 1, None),
    }
    # cc field in bits 3..5
    for cc, name in enumerate(("NZ", "Z", "NC", "C", "PO", "PE", "P", "M")):
        table[0xC4 | cc << 3] = OpcodeInfo(TransferKind.CALL_ABS, 3, name)
        table[0xC2 | cc << 3] = OpcodeInfo(TransferKind.JUMP_ABS, 3, name)
    for opcode, name in ((0x20, "NZ"), (0x28, "Z"), (0x30, "NC"), (0x38, "C")):
        table[opcode] = OpcodeInfo(TransferKind.JUMP_REL, 2, name)
    for vector in range(0x00, 0x40, 0x08):
        table[0xC7 | vector] = OpcodeInfo(TransferKind.CALL_ABS, 1, RST)
    return table


def _m6502_table() -> Dict[int, OpcodeInfo]:
    table = {
        0x20: OpcodeInfo(TransferKind.CALL_ABS, 3, None),
        0x4C: OpcodeInfo(TransferKind.JUMP_ABS, 3, None),
        0x6C: OpcodeInfo(TransferKind.JUMP_ABS, 3, INDIRECT),
        0x60: OpcodeInfo(TransferKind.RTS_RETURN, 1, None),
    }
    for opcode, name in ((0x10, "PL"), (0x30, "MI"), (0x50, "VC"), (0x70, "VS"),
                         (0x90, "CC"), (0xB0, "CS"), (0xD0, "NE"), (0xF0, "EQ")):
        table[opcode] = OpcodeInfo(TransferKind.BRANCH_REL, 2, name)
    return table


OPCODE_TABLES: Dict[Architecture, Dict[int, OpcodeInfo]] = {
    Architecture.Z80: _z80_table(),
    Architecture.M6502: _m6502_table(),
}

# (kind, condition) -> opcode; RST vectors are encoded separately
_ENCODINGS: Dict[Architecture, Dict[Tuple[TransferKind, Optional[str]], int]] = {
    arch: {(info.kind, info.condition): opcode
           for opcode, info in table.items() if info.condition != RST}
    for arch, table in OPCODE_TABLES.items()
}


@dataclass(frozen=True)
class ControlTransfer:
    """
    A decoded instruction. target is set exactly for the four transfer kinds;
    condition carries the condition code, or 'indirect' / 'rst' markers.
    """
    kind: TransferKind
    opcode: int
    length: int
    target: Optional[int] = None
    condition: Optional[str] = None

    @property
    def indirect(self) -> bool:
        return self.condition == INDIRECT


def signext8(value: int) -> int:
    return value - 0x100 if value & 0x80 else value


def _table(arch: Architecture) -> Dict[int, OpcodeInfo]:
    try:
        return OPCODE_TABLES[arch]
    except KeyError:
        raise exceptions.UnsupportedArchitectureError(f"No decoder for {arch!r}") from None


def absolute_operand_opcodes(arch: Architecture) -> List[int]:
    """Opcodes followed by a 16-bit absolute target (CALL/JP, JSR/JMP)."""
    return sorted(opcode for opcode, info in _table(arch).items() if info.length == 3)


def decode_bytes(data: bytes, offset: int, address: int, arch: Architecture) -> ControlTransfer:
    """
    Decodes the instruction at data[offset] assuming it sits at `address`.

    Raises:
        TruncatedInstructionError: the instruction needs more bytes than remain
    """
    opcode = data[offset]
    info = _table(arch).get(opcode)
    if info is None:
        return ControlTransfer(TransferKind.OTHER, opcode, 1)
    if offset + info.length > len(data):
        raise exceptions.TruncatedInstructionError(
            f"{arch.name} opcode {opcode:02X} at 0x{address:04X} needs {info.length} bytes, "
            f"{len(data) - offset} left")

    if info.condition == RST:
        target = opcode & 0x38
    elif info.length == 3:
        target = data[offset + 1] | data[offset + 2] << 8
    elif info.kind.is_relative:
        target = (address + 2 + signext8(data[offset + 1])) % ADDRESS_SPACE
    else:
        target = None
    return ControlTransfer(info.kind, opcode, info.length, target, info.condition)


def decode_at(rom: RomImage, offset: int) -> ControlTransfer:
    """
    Classifies the instruction at rom.data[offset] and resolves its target.

    Args:
        rom: image (its 16-bit window must hold)
        offset: index into rom.data

    Returns:
        ControlTransfer: kind Other (length 1) for anything that is not a transfer

    Raises:
        TruncatedInstructionError: instruction runs past the image end
        WindowRequiredError: image overflows 0xFFFF
    """
    rom.require_window()
    if not 0 <= offset < len(rom.data):
        raise IndexError(f"Offset {offset} outside '{rom.source_name}' ({len(rom.data)} bytes)")
    return decode_bytes(rom.data, offset, rom.address_of(offset), rom.arch)


def encode_transfer(kind: TransferKind,
                    target: int,
                    at_address: int,
                    arch: Architecture,
                    condition: Optional[str] = None) -> bytes:
    """
    Encodes a transfer so that decoding it at `at_address` gives back (kind, target).

    Args:
        kind: transfer kind
        target: 16-bit destination (ignored for RtsReturn)
        at_address: address of the opcode byte
        arch: CPU family
        condition: condition code, 'indirect' for 6502 JMP (abs), 'rst' for Z80 restarts

    Raises:
        DisplacementRangeError: relative displacement outside -128..127
        UnencodableTransferError: no such instruction on the architecture
    """
    if not 0 <= target <= 0xFFFF:
        raise exceptions.UnencodableTransferError(f"Target {target:#x} is not a 16-bit address")
    if condition == RST:
        if kind is not TransferKind.CALL_ABS or arch is not Architecture.Z80 or target & ~0x38:
            raise exceptions.UnencodableTransferError(f"No restart instruction for {kind.value} 0x{target:04X}")
        return bytes([0xC7 | target])

    opcode = _ENCODINGS[arch].get((kind, condition))
    if opcode is None:
        raise exceptions.UnencodableTransferError(
            f"{arch.name} has no {kind.value} with condition {condition!r}")
    length = OPCODE_TABLES[arch][opcode].length
    if length == 1:
        return bytes([opcode])
    if length == 3:
        return bytes([opcode, target & 0xFF, target >> 8])

    displacement = (target - at_address - 2) % ADDRESS_SPACE
    if displacement >= 0x8000:
        displacement -= ADDRESS_SPACE
    if not -128 <= displacement <= 127:
        raise exceptions.DisplacementRangeError(
            f"0x{target:04X} is {displacement:+d} bytes from 0x{at_address:04X}+2, outside -128..127")
    return bytes([opcode, displacement & 0xFF])
