import hashlib
import random

import pytest

from romlineage.rom_image import MAX_ROM_SIZE, RomImage, load_rom, select_window
from romlineage.types_ import exceptions
from romlineage.types_.types import Architecture


def test_load_rom_hashes_content(rom_file):
    data = bytes(range(256)) * 64
    rom = load_rom(rom_file(data), Architecture.Z80)
    assert len(rom) == 16384
    assert rom.base_addr == 0
    assert rom.content_hash == hashlib.sha256(data).hexdigest()
    assert rom.source_name == "rom.bin"


def test_same_bytes_same_identity_whatever_the_name():
    a = RomImage(b"\x01\x02\x03", Architecture.Z80, source_name="a")
    b = load_rom(b"\x01\x02\x03", Architecture.Z80, name="b")
    assert a == b
    assert a.content_hash == b.content_hash


def test_single_byte_rom_is_valid():
    rom = load_rom(b"\xc9", Architecture.Z80)
    assert len(rom) == 1
    assert rom.end_addr == 0


def test_empty_rom_rejected():
    with pytest.raises(exceptions.EmptyRomError):
        load_rom(b"", Architecture.Z80)


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(exceptions.RomIoError):
        load_rom(tmp_path / "absent.bin", Architecture.Z80)


def test_size_limit():
    RomImage(bytes(MAX_ROM_SIZE), Architecture.Z80)
    with pytest.raises(exceptions.RomTooLargeError):
        RomImage(bytes(MAX_ROM_SIZE + 1), Architecture.Z80)


def test_base_addr_must_be_16_bit():
    with pytest.raises(exceptions.WindowError):
        RomImage(b"\x00", Architecture.Z80, base_addr=0x10000)


def test_window_ok_boundary():
    assert RomImage(bytes(0x4000), Architecture.Z80, base_addr=0xC000).window_ok
    rom = RomImage(bytes(0x4001), Architecture.Z80, base_addr=0xC000)
    assert not rom.window_ok
    with pytest.raises(exceptions.WindowRequiredError):
        rom.require_window()


def test_address_and_offset_mapping():
    rom = RomImage(bytes(0x2000), Architecture.M6502, base_addr=0xE000)
    assert rom.address_of(0) == 0xE000
    assert rom.address_of(0x1FFF) == 0xFFFF
    assert rom.offset_of(0xE123) == 0x123
    with pytest.raises(exceptions.WindowError):
        rom.offset_of(0xD000)


def test_select_window_rebases():
    data = bytes(range(256)) * 256
    rom = RomImage(data, Architecture.Z80)
    bank = select_window(rom, 0x4000, 0x4000, 0xC000)
    assert bank.data == data[0x4000:0x8000]
    assert bank.base_addr == 0xC000
    assert bank.window_ok
    assert "[0x4000:0x8000]" in bank.source_name


@pytest.mark.parametrize("offset,length,base", [
    (0, 0, 0),
    (-1, 16, 0),
    (0xFFF0, 0x20, 0),
    (0, 0x100, 0xFF80),
])
def test_select_window_rejects_bad_ranges(offset, length, base):
    rom = RomImage(bytes(0x10000), Architecture.Z80)
    with pytest.raises(exceptions.WindowError):
        select_window(rom, offset, length, base)


@pytest.mark.parametrize("seed", range(20))
def test_nested_windows_equal_one_window(seed):
    rng = random.Random(seed)
    rom = RomImage(rng.randbytes(rng.randrange(2, 0x20000)), Architecture.Z80)
    outer_offset = rng.randrange(len(rom))
    outer_length = rng.randint(1, min(len(rom) - outer_offset, 0x10000))
    outer = select_window(rom, outer_offset, outer_length, rng.randrange(0x10000 - outer_length + 1))
    inner_offset = rng.randrange(outer_length)
    inner_length = rng.randint(1, outer_length - inner_offset)
    base = rng.randrange(0x10000 - inner_length + 1)
    nested = select_window(outer, inner_offset, inner_length, base)
    direct = select_window(rom, outer_offset + inner_offset, inner_length, base)
    assert nested == direct
    assert nested.content_hash == direct.content_hash
