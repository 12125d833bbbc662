"""Shared fixtures: synthetic ROM builders and signature planting."""
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import pytest

from romlineage.pattern import ElementKind, Pattern
from romlineage.signature_db import Signature, SignatureDb, builtin_db
from romlineage.types_.types import Architecture, Family

# Room between planted signatures; every builtin pattern is shorter.
PLANT_STRIDE = 0x80
FIRST_PLANT = 0x100


def plant(buf: bytearray, offset: int, pattern: Pattern, values: Optional[Dict[str, int]] = None,
          base_addr: int = 0) -> None:
    """
    Writes one occurrence of `pattern` at `offset`.
    Wildcards become 00; abs16/byte slots take values[slot]; rel8 slots take the target address.
    """
    values = values or {}
    position = offset
    for element in pattern.elements:
        if element.kind is ElementKind.LITERAL:
            buf[position] = element.value
        elif element.kind is ElementKind.ANY:
            buf[position] = 0x00
        elif element.kind is ElementKind.CAPTURE_ABS16:
            value = values.get(element.slot, 0x1234)
            buf[position] = value & 0xFF
            buf[position + 1] = value >> 8
        elif element.kind is ElementKind.CAPTURE_REL8:
            target = values.get(element.slot, base_addr + position + 1)
            displacement = target - (base_addr + position + 1)
            assert -128 <= displacement <= 127
            buf[position] = displacement & 0xFF
        else:
            buf[position] = values.get(element.slot, 0)
        position += element.width


def plant_signatures(signatures: Iterable[Signature], size: int = 0x4000, base_addr: int = 0,
                     start: int = FIRST_PLANT) -> Tuple[bytes, List[Tuple[Signature, int, Dict[str, int]]]]:
    """
    Zero-filled image holding each signature once, PLANT_STRIDE bytes apart.
    Address slots point at a distinct address per signature and slot.

    Returns:
        (image bytes, [(signature, offset, slot values)])
    """
    buf = bytearray(size)
    placed = []
    for n, signature in enumerate(signatures):
        offset = start + n * PLANT_STRIDE
        values = {}
        for index, slot in enumerate(signature.pattern.slots):
            if slot.kind is ElementKind.CAPTURE_ABS16:
                values[slot.name] = 0x2000 + n * 0x10 + index * 2
            elif slot.kind is ElementKind.CAPTURE_REL8:
                values[slot.name] = base_addr + offset + slot.position + 1 + 0x20
            else:
                values[slot.name] = 0x42
        plant(buf, offset, signature.pattern, values, base_addr)
        placed.append((signature, offset, values))
    return bytes(buf), placed


def family_signatures(db: SignatureDb, family: Family, arch: Architecture = Architecture.Z80) -> List[Signature]:
    return list(db.filter(arch=arch, family=family))


@pytest.fixture(scope="session")
def builtin() -> SignatureDb:
    return builtin_db()


@pytest.fixture
def microsoft_rom(builtin) -> bytes:
    data, _ = plant_signatures(family_signatures(builtin, Family.MICROSOFT))
    return data


@pytest.fixture
def sinclair_rom(builtin) -> bytes:
    data, _ = plant_signatures(family_signatures(builtin, Family.SINCLAIR))
    return data


@pytest.fixture
def rom_file(tmp_path):
    """Writes bytes to a file under tmp_path and returns its path."""

    def _write(data: bytes, name: str = "rom.bin") -> Path:
        path = tmp_path / name
        path.write_bytes(data)
        return path

    return _write


@pytest.fixture
def catalog_file(tmp_path):
    """Writes catalog text (header added) and returns its path."""

    def _write(rows: Iterable[str], name: str = "catalog.csv", base_column: bool = False) -> Path:
        header = "name,country,cpu,year,expected_lineage,rom_path" + (",base_addr" if base_column else "")
        path = tmp_path / name
        path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
        return path

    return _write
