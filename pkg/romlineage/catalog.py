"""Machine catalog: CSV transcription of the computers a corpus run covers."""
import csv
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import polars as pl

from .types_ import exceptions
from .types_.types import Architecture, ExpectedLineage
from .utils.utils import parse_address

log = logging.getLogger(__name__)

CATALOG_COLUMNS = ["name", "country", "cpu", "year", "expected_lineage", "rom_path"]
OPTIONAL_COLUMNS = ["base_addr"]
ROM_PATH_SEPARATOR = ";"
YEAR_RANGE = (1975, 1999)
BUILTIN_CATALOG = "eastern_europe.csv"

# Binary-compatible second sources map onto the decoder they share.
CPU_ARCHITECTURES: Dict[str, Architecture] = {
    "Z80": Architecture.Z80,
    "U880": Architecture.Z80,
    "MMN80": Architecture.Z80,
    "LH0080": Architecture.Z80,
    "T34VM1": Architecture.Z80,
    "6502": Architecture.M6502,
    "UM6502": Architecture.M6502,
    "SY6502": Architecture.M6502,
}


def cpu_architecture(cpu: str) -> Optional[Architecture]:
    """Maps a catalog CPU label to its decoder, None for families without one."""
    return CPU_ARCHITECTURES.get(cpu.strip().upper().replace(" ", ""))


@dataclass(frozen=True)
class MachineRecord:
    """One catalog row: a machine model and the ROM dumps available for it."""
    name: str
    country: str
    cpu: str
    year: int
    expected_lineage: ExpectedLineage = ExpectedLineage.UNKNOWN
    rom_paths: Tuple[str, ...] = ()
    base_addr: int = 0
    # --- Derived ---
    arch: Optional[Architecture] = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rom_paths", tuple(self.rom_paths))
        object.__setattr__(self, "arch", cpu_architecture(self.cpu))

    @property
    def analyzable(self) -> bool:
        return self.arch is not None

    def resolve_rom_paths(self, root: Union[str, Path, None] = None) -> List[Path]:
        """Absolute ROM paths; relative entries resolve against root (the catalog directory)."""
        base = Path(root) if root is not None else Path.cwd()
        return [p if p.is_absolute() else base / p for p in map(Path, self.rom_paths)]


def _parse_row(row: List[str], line: int, has_base: bool) -> MachineRecord:
    width = len(CATALOG_COLUMNS) + (1 if has_base else 0)
    if len(row) != width:
        raise exceptions.CatalogParseError(line, f"expected {width} fields, got {len(row)}")
    name, country, cpu, year_text, lineage_text, rom_text = (f.strip() for f in row[:6])
    if not name:
        raise exceptions.CatalogParseError(line, "empty machine name")
    if not cpu:
        raise exceptions.CatalogParseError(line, f"empty cpu for '{name}'")
    try:
        year = int(year_text)
    except ValueError:
        raise exceptions.CatalogParseError(line, f"year {year_text!r} is not an integer") from None
    if not YEAR_RANGE[0] <= year <= YEAR_RANGE[1]:
        raise exceptions.CatalogParseError(line, f"year {year} outside {YEAR_RANGE[0]}..{YEAR_RANGE[1]}")
    try:
        lineage = ExpectedLineage.parse(lineage_text)
    except ValueError as e:
        raise exceptions.CatalogParseError(line, str(e)) from None
    rom_paths = tuple(p.strip() for p in rom_text.split(ROM_PATH_SEPARATOR) if p.strip())
    base_addr = 0
    if has_base and row[6].strip():
        try:
            base_addr = parse_address(row[6])
        except ValueError:
            raise exceptions.CatalogParseError(line, f"base_addr {row[6]!r} is not a 16-bit hex address") from None
    return MachineRecord(name, country, cpu, year, lineage, rom_paths, base_addr)


def parse_catalog(lines: Iterable[str]) -> List[MachineRecord]:
    """
    Parses catalog text. Lines starting with '#' are comments.

    Raises:
        CatalogParseError: bad header, wrong field count, bad value or duplicate name
    """
    reader = csv.reader(lines)
    records: List[MachineRecord] = []
    seen: Dict[str, int] = {}
    has_base: Optional[bool] = None

    for row in reader:
        line = reader.line_num
        if not row or not any(f.strip() for f in row) or row[0].lstrip().startswith("#"):
            continue
        if has_base is None:
            header = [h.strip().lower() for h in row]
            if header == CATALOG_COLUMNS:
                has_base = False
            elif header == CATALOG_COLUMNS + OPTIONAL_COLUMNS:
                has_base = True
            else:
                raise exceptions.CatalogParseError(
                    line, f"expected header {','.join(CATALOG_COLUMNS)}[,base_addr], got {','.join(row)}")
            continue
        record = _parse_row(row, line, has_base)
        if record.name in seen:
            raise exceptions.CatalogParseError(
                line, f"duplicate machine '{record.name}' (first on line {seen[record.name]})")
        seen[record.name] = line
        if not record.analyzable:
            log.debug(f"Catalog line {line}: CPU '{record.cpu}' of '{record.name}' has no decoder")
        records.append(record)
    return records


def load_catalog(path: Union[str, Path]) -> List[MachineRecord]:
    """
    Loads a machine catalog file.

    Args:
        path: UTF-8 CSV with header name,country,cpu,year,expected_lineage,rom_path[,base_addr]

    Returns:
        List[MachineRecord]: records in file order; an empty file gives an empty list

    Raises:
        RomIoError: file unreadable
        CatalogParseError: malformed line
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            records = parse_catalog(f)
    except OSError as e:
        raise exceptions.RomIoError(f"Cannot read catalog '{path}': {e}") from e
    flagged = sum(1 for r in records if not r.analyzable)
    log.info(f"Loaded {len(records)} machines from {path} ({flagged} without a decoder)")
    return records


def load_builtin_catalog() -> List[MachineRecord]:
    """The shipped transcription of East-European 8-bit machines."""
    text = resources.files("romlineage.data").joinpath(BUILTIN_CATALOG).read_text(encoding="utf-8")
    return parse_catalog(text.splitlines())


def catalog_dataframe(records: Iterable[MachineRecord]) -> pl.DataFrame:
    """Catalog as a polars table, one column per CSV field plus the mapped architecture."""
    records = list(records)
    return pl.DataFrame(
        {
            "name": [r.name for r in records],
            "country": [r.country for r in records],
            "cpu": [r.cpu for r in records],
            "year": [r.year for r in records],
            "expected_lineage": [r.expected_lineage.value for r in records],
            "rom_path": [ROM_PATH_SEPARATOR.join(r.rom_paths) for r in records],
            "base_addr": [f"{r.base_addr:04X}" for r in records],
            "arch": [r.arch.value if r.arch else "" for r in records],
        },
        schema={"name": pl.Utf8, "country": pl.Utf8, "cpu": pl.Utf8, "year": pl.Int64,
                "expected_lineage": pl.Utf8, "rom_path": pl.Utf8, "base_addr": pl.Utf8,
                "arch": pl.Utf8},
    )


def write_catalog(records: Iterable[MachineRecord], path: Union[str, Path]) -> None:
    """
    Writes records in the catalog format; load_catalog reads them back equal.
    The base_addr column is written only when some record needs it.
    """
    records = list(records)
    columns = list(CATALOG_COLUMNS)
    if any(r.base_addr for r in records):
        columns += OPTIONAL_COLUMNS
    path_obj = Path(path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)
    catalog_dataframe(records).select(columns).write_csv(path_obj, include_header=True)
    log.info(f"Wrote {len(records)} machines to {path_obj}")
