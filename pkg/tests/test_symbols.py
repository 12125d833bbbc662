import pytest

from romlineage.lineage import EntryPoint, RoutineMap
from romlineage.symbols import emit_defs, symbol_name
from romlineage.types_ import exceptions
from romlineage.types_.types import DefsFormat, Family


def routine_map(**addresses) -> RoutineMap:
    points = []
    for name, values in addresses.items():
        for n, address in enumerate(values if isinstance(values, list) else [values]):
            points.append((name, EntryPoint(address, Family.MICROSOFT, "", 0x100 * n, 1, name, f"sig/{name}")))
    return RoutineMap.from_entries(points)


def test_asm_line():
    assert emit_defs(routine_map(FP_ADD=0x3014)) == "defc FP_ADD = $3014\n"


def test_header_line_with_prefix():
    text = emit_defs(routine_map(FP_ADD=0x3014), DefsFormat.HEADER, prefix="ROM_")
    assert text == "#define ROM_FP_ADD 0x3014\n"


def test_multiple_addresses_get_suffixes_and_warning():
    lines = emit_defs(routine_map(FP_ADD=[0x4014, 0x3014])).splitlines()
    assert lines[0].startswith("; WARNING: FP_ADD has 2 distinct entry points")
    assert lines[1:] == ["defc FP_ADD_1 = $3014", "defc FP_ADD_2 = $4014"]


def test_header_warning_is_c_comment():
    lines = emit_defs(routine_map(FP_ADD=[0x3014, 0x4014]), DefsFormat.HEADER).splitlines()
    assert lines[0].startswith("/* WARNING") and lines[0].endswith("*/")


def test_same_address_twice_is_one_definition():
    assert emit_defs(routine_map(CHRGET=[0x1D78, 0x1D78])) == "defc CHRGET = $1D78\n"


def test_slot_names_become_identifiers():
    assert symbol_name("SYNCHR.chrget") == "SYNCHR_CHRGET"
    assert symbol_name("print-a", "x_") == "x_PRINT_A"


def test_header_comment_first():
    text = emit_defs(routine_map(FP_ADD=0x3014), header="rom.bin 0123456789ab db 2026.1")
    assert text.splitlines()[0] == "; rom.bin 0123456789ab db 2026.1"


def test_empty_map():
    with pytest.raises(exceptions.NothingToEmitError):
        emit_defs(RoutineMap())


def defined_symbols(text: str) -> list:
    return [line.split()[1] for line in text.splitlines() if line.startswith("defc ")]


def test_sanitized_names_that_collide_are_renamed():
    text = emit_defs(routine_map(**{"SYNCHR.chrget": 0x1000, "SYNCHR_CHRGET": 0x2000}))
    assert text.splitlines() == [
        "defc SYNCHR_CHRGET = $1000",
        "; WARNING: SYNCHR_CHRGET for SYNCHR_CHRGET is already defined; renamed SYNCHR_CHRGET_2",
        "defc SYNCHR_CHRGET_2 = $2000",
    ]


def test_suffix_clash_with_real_routine_is_renamed():
    text = emit_defs(routine_map(FOO=[0x3014, 0x4014], FOO_1=0x5000))
    symbols = defined_symbols(text)
    assert symbols == ["FOO_1", "FOO_2", "FOO_1_2"]
    assert "defc FOO_1_2 = $5000" in text.splitlines()


def test_emitted_symbols_are_unique():
    rmap = routine_map(**{"A.b": 0x10, "A_B": [0x20, 0x30], "A_B_1": 0x40, "A_B_2": 0x50, "a-b": 0x60})
    symbols = defined_symbols(emit_defs(rmap))
    assert len(symbols) == 6
    assert len(set(symbols)) == len(symbols)
