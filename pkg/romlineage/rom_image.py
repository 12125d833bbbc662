"""ROM images: loading, identity hashing and 16-bit windowing."""
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .types_ import exceptions
from .types_.types import Architecture

log = logging.getLogger(__name__)

MAX_ROM_SIZE = 1_048_576
ADDRESS_SPACE = 0x10000

RomSource = Union[str, Path, bytes, bytearray, memoryview]


@dataclass(frozen=True)
class RomImage:
    """
    Immutable ROM payload bound to a CPU family and a load address.
    Equality ignores source_name, so the same bytes at the same address compare equal.
    """
    data: bytes
    arch: Architecture
    base_addr: int = 0
    source_name: str = field(default="<bytes>", compare=False)
    # --- Derived ---
    content_hash: str = field(init=False)

    def __post_init__(self):
        if not self.data:
            raise exceptions.EmptyRomError(f"ROM image '{self.source_name}' is empty")
        if len(self.data) > MAX_ROM_SIZE:
            raise exceptions.RomTooLargeError(
                f"ROM image '{self.source_name}' is {len(self.data)} bytes, limit is {MAX_ROM_SIZE}")
        if not 0 <= self.base_addr <= 0xFFFF:
            raise exceptions.WindowError(f"Base address {self.base_addr:#x} is not a 16-bit value")
        # frozen dataclass, so assign through object.__setattr__
        object.__setattr__(self, "data", bytes(self.data))
        object.__setattr__(self, "content_hash", hashlib.sha256(self.data).hexdigest())

    def __len__(self) -> int:
        return len(self.data)

    def __repr__(self) -> str:
        return (f"RomImage({self.source_name!r}, {self.arch.name}, base=0x{self.base_addr:04X}, "
                f"len={len(self.data)}, sha256={self.content_hash[:12]})")

    @property
    def end_addr(self) -> int:
        """Last address covered by the image (may exceed 0xFFFF for banked dumps)."""
        return self.base_addr + len(self.data) - 1

    @property
    def window_ok(self) -> bool:
        """True when every byte has a 16-bit address."""
        return self.end_addr <= 0xFFFF

    def require_window(self) -> None:
        """
        Raises:
            WindowRequiredError: image overflows the 16-bit address space.
        """
        if not self.window_ok:
            raise exceptions.WindowRequiredError(
                f"ROM image '{self.source_name}' spans 0x{self.base_addr:04X}..0x{self.end_addr:X}; "
                f"select a 16-bit window before address-resolving analysis")

    def address_of(self, offset: int) -> int:
        return (self.base_addr + offset) % ADDRESS_SPACE

    def offset_of(self, address: int) -> int:
        """
        Args:
            address: 16-bit address inside the image

        Raises:
            WindowError: address not covered by the image
        """
        offset = address - self.base_addr
        if not 0 <= offset < len(self.data):
            raise exceptions.WindowError(
                f"Address 0x{address:04X} is outside '{self.source_name}' "
                f"(0x{self.base_addr:04X}..0x{self.end_addr:04X})")
        return offset


def load_rom(source: RomSource,
             arch: Architecture,
             base_addr: int = 0,
             *,
             name: str = None) -> RomImage:
    """
    Loads a raw binary ROM image.

    Args:
        source: path to a raw binary file, or the bytes themselves
        arch: CPU family the code targets
        base_addr: address of the first byte
        name: label used in reports, defaults to the file name

    Returns:
        RomImage: image with its SHA-256 content hash

    Raises:
        EmptyRomError: no bytes
        RomIoError: file missing or unreadable
        WindowError: base_addr outside 0..0xFFFF
    """
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
        label = name or "<bytes>"
    else:
        path = Path(source)
        try:
            data = path.read_bytes()
        except OSError as e:
            raise exceptions.RomIoError(f"Cannot read ROM file '{path}': {e}") from e
        label = name or path.name
    rom = RomImage(data, arch, base_addr, source_name=label)
    log.debug(f"Loaded {rom!r}")
    return rom


def select_window(rom: RomImage, offset: int, length: int, base_addr: int) -> RomImage:
    """
    Cuts a sub-range of an image and rebases it, e.g. one bank of a banked ROM dump.

    Args:
        rom: source image
        offset: first byte of the window within rom.data
        length: window size, at least 1
        base_addr: address of the first window byte

    Returns:
        RomImage: new image over rom.data[offset:offset+length]

    Raises:
        WindowError: window outside the image or past 0xFFFF
    """
    if length < 1 or offset < 0 or offset + length > len(rom.data):
        raise exceptions.WindowError(
            f"Window offset={offset} len={length} is outside '{rom.source_name}' ({len(rom.data)} bytes)")
    if not 0 <= base_addr <= 0xFFFF or base_addr + length - 1 > 0xFFFF:
        raise exceptions.WindowError(
            f"Window of {length} bytes at 0x{base_addr:04X} overflows the 16-bit address space")
    if offset == 0 and length == len(rom.data):
        label = rom.source_name
    else:
        label = f"{rom.source_name}[{offset:#x}:{offset + length:#x}]"
    return RomImage(rom.data[offset:offset + length], rom.arch, base_addr, source_name=label)
