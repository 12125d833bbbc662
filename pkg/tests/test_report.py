import json
from pathlib import Path

import polars as pl

from romlineage.lineage import classify, locate_routines
from romlineage.pattern import compile_pattern, scan
from romlineage.report import (SCHEMA_VERSION, Report, classify_report, hits_dataframe, render_table,
                               routine_map_from_entries, routine_entries)
from romlineage.rom_image import RomImage
from romlineage.types_.types import Architecture

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "docs" / "report.schema.json"


def _classified(builtin, data):
    rom = RomImage(data, Architecture.Z80, 0x0000, source_name="planted.bin")
    hits, rmap = locate_routines(rom, builtin)
    return rom, hits, rmap, classify(rmap)


def test_report_json_round_trip(builtin, microsoft_rom):
    rom, hits, rmap, verdict = _classified(builtin, microsoft_rom)
    report = classify_report("0.0.test", rom, builtin, hits, rmap, verdict, 0.25)
    restored = Report.model_validate_json(report.to_json())
    assert restored == report
    assert restored.to_routine_map() == rmap


def test_timing_can_be_left_out(builtin, microsoft_rom):
    rom, hits, rmap, verdict = _classified(builtin, microsoft_rom)
    report = classify_report("0.0.test", rom, builtin, hits, rmap, verdict, 1.5)
    assert "timing" not in json.loads(report.to_json(include_timing=False))
    assert json.loads(report.to_json())["timing"] == {"seconds": 1.5}


def test_report_identity_fields(builtin, microsoft_rom):
    rom, hits, rmap, verdict = _classified(builtin, microsoft_rom)
    document = json.loads(classify_report("0.0.test", rom, builtin, hits, rmap, verdict).to_json())
    assert document["schema_version"] == SCHEMA_VERSION
    assert document["db_version"] == builtin.db_version
    assert document["rom"] == {"name": "planted.bin", "content_hash": rom.content_hash, "arch": "z80",
                               "base_addr": "0x0000", "size": len(microsoft_rom)}
    assert len(document["hits"]) == len(hits)


def test_routine_entries_round_trip(builtin, sinclair_rom):
    _, _, rmap, _ = _classified(builtin, sinclair_rom)
    assert routine_map_from_entries(routine_entries(rmap)) == rmap


def test_documented_schema_matches_model():
    schema = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
    assert set(schema["properties"]) == set(Report.model_fields)
    assert schema["properties"]["schema_version"]["default"] == SCHEMA_VERSION


def test_tables_are_not_elided():
    data = b"\xcd\x00\x30" * 40
    hits = scan(RomImage(data, Architecture.Z80), compile_pattern("CD @t:abs16", min_literals=1))
    df = hits_dataframe(hits)
    assert isinstance(df, pl.DataFrame)
    assert df.height == 40
    text = render_table(df)
    assert "00075" in text
    assert "…" not in text
