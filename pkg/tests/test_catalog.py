import pytest

from romlineage.catalog import (CPU_ARCHITECTURES, MachineRecord, catalog_dataframe, load_builtin_catalog,
                                load_catalog, parse_catalog, write_catalog)
from romlineage.types_ import exceptions
from romlineage.types_.types import Architecture, ExpectedLineage

HEADER = "name,country,cpu,year,expected_lineage,rom_path"


def test_parse_rows():
    records = parse_catalog([
        HEADER,
        "Galaksija,Yugoslavia,Z80,1983,Original,",
        "Primo A,Hungary,U880,1984,Microsoft,",
    ])
    galaksija, primo = records
    assert galaksija.name == "Galaksija"
    assert galaksija.expected_lineage is ExpectedLineage.ORIGINAL
    assert galaksija.rom_paths == ()
    assert primo.arch is Architecture.Z80
    assert primo.expected_lineage is ExpectedLineage.MICROSOFT


def test_non_analyzable_cpu_is_kept():
    (record,) = parse_catalog([HEADER, "Elektronika BK-0010,USSR,K1801,1985,,"])
    assert record.arch is None
    assert not record.analyzable
    assert record.expected_lineage is ExpectedLineage.UNKNOWN


def test_comments_and_blank_lines_skipped():
    records = parse_catalog(["# transcription", HEADER, "", "# note", "Z1013,GDR,U880,1985,original,z1013.bin"])
    assert [r.name for r in records] == ["Z1013"]
    assert records[0].rom_paths == ("z1013.bin",)


def test_empty_catalog_is_empty_list(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    assert load_catalog(path) == []


@pytest.mark.parametrize("row,line", [
    ("Galaksija,Yugoslavia,Z80,1983", 2),
    ("Galaksija,Yugoslavia,Z80,nineteen,Original,", 2),
    ("Galaksija,Yugoslavia,Z80,1960,Original,", 2),
    ("Galaksija,Yugoslavia,Z80,1983,Commodore,", 2),
])
def test_malformed_rows_report_line(row, line):
    with pytest.raises(exceptions.CatalogParseError) as info:
        parse_catalog([HEADER, row])
    assert info.value.line == line


def test_duplicate_name_rejected():
    with pytest.raises(exceptions.CatalogParseError) as info:
        parse_catalog([HEADER, "Orao,Yugoslavia,6502,1984,,", "Orao,Yugoslavia,6502,1985,,"])
    assert info.value.line == 3
    assert "duplicate" in str(info.value)


def test_bad_header_rejected():
    with pytest.raises(exceptions.CatalogParseError):
        parse_catalog(["machine,cpu", "Orao,6502"])


def test_multiple_revisions_and_base_addr(catalog_file, tmp_path):
    path = catalog_file(['Orao,Yugoslavia,6502,1984,,"orao_a.bin;roms/orao_b.bin",C000'], base_column=True)
    (record,) = load_catalog(path)
    assert record.rom_paths == ("orao_a.bin", "roms/orao_b.bin")
    assert record.base_addr == 0xC000
    assert record.resolve_rom_paths(tmp_path) == [tmp_path / "orao_a.bin", tmp_path / "roms" / "orao_b.bin"]


def test_missing_catalog_file(tmp_path):
    with pytest.raises(exceptions.RomIoError):
        load_catalog(tmp_path / "nope.csv")


def test_write_then_load_gives_equal_records(tmp_path):
    records = [
        MachineRecord("Meritum I, II", "Poland", "U880", 1983, ExpectedLineage.MICROSOFT, ("meritum.rom",)),
        MachineRecord("Orao", "Yugoslavia", "6502", 1984, ExpectedLineage.UNKNOWN, ("a.bin", "b.bin"), 0xC000),
        MachineRecord("Elwro 800 Junior", "Poland", "Z80", 1986, ExpectedLineage.SINCLAIR),
    ]
    path = tmp_path / "out.csv"
    write_catalog(records, path)
    assert load_catalog(path) == records


def test_write_omits_base_column_when_unused(tmp_path):
    path = tmp_path / "out.csv"
    write_catalog([MachineRecord("Galaksija", "Yugoslavia", "Z80", 1983, ExpectedLineage.ORIGINAL)], path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == HEADER


def test_builtin_catalog_rows():
    records = {r.name: r for r in load_builtin_catalog()}
    assert records["Galaksija"].expected_lineage is ExpectedLineage.ORIGINAL
    assert records["Z1013"].expected_lineage is ExpectedLineage.ORIGINAL
    assert records["Primo A"].expected_lineage is ExpectedLineage.MICROSOFT
    assert records["Pentagon"].expected_lineage is ExpectedLineage.SINCLAIR
    assert all(1975 <= r.year <= 1999 for r in records.values())
    assert any(not r.analyzable for r in records.values())


def test_cpu_mapping_covers_second_sources():
    assert CPU_ARCHITECTURES["U880"] is Architecture.Z80
    assert CPU_ARCHITECTURES["MMN80"] is Architecture.Z80
    assert CPU_ARCHITECTURES["UM6502"] is Architecture.M6502


def test_catalog_dataframe_columns():
    df = catalog_dataframe(load_builtin_catalog())
    assert df.columns == ["name", "country", "cpu", "year", "expected_lineage", "rom_path", "base_addr", "arch"]
    assert df.height == len(load_builtin_catalog())
