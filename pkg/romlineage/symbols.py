"""Symbol definitions for cross-compiler libraries (z88dk defc / C #define)."""
import logging
import re
from typing import List, Optional, Set

from .lineage import RoutineMap
from .types_ import exceptions
from .types_.types import DefsFormat

log = logging.getLogger(__name__)

_SYMBOL_CHARS = re.compile(r"[^A-Za-z0-9_]")


def symbol_name(routine: str, prefix: str = "") -> str:
    """FIND_FOR -> FIND_FOR, SYNCHR.chrget -> SYNCHR_CHRGET"""
    return prefix + _SYMBOL_CHARS.sub("_", routine).upper()


def _definition(fmt: DefsFormat, symbol: str, address: int) -> str:
    if fmt is DefsFormat.ASM:
        return f"defc {symbol} = ${address:04X}"
    return f"#define {symbol} 0x{address:04X}"


def _comment(fmt: DefsFormat, text: str) -> str:
    return f"; {text}" if fmt is DefsFormat.ASM else f"/* {text} */"


def _claim(symbol: str, used: Set[str]) -> str:
    """Returns symbol, or symbol_2, symbol_3... when an earlier definition already took it."""
    candidate, n = symbol, 2
    while candidate in used:
        candidate = f"{symbol}_{n}"
        n += 1
    used.add(candidate)
    return candidate


def emit_defs(rmap: RoutineMap,
              fmt: DefsFormat = DefsFormat.ASM,
              prefix: str = "",
              *,
              header: Optional[str] = None) -> str:
    """
    Renders one definition per routine.
    Routines with several distinct addresses get _1, _2... suffixes after a warning comment.
    A symbol already emitted for another routine (SYNCHR.chrget and SYNCHR_CHRGET, or FOO_1 next to
    a two-address FOO) is renamed with a further _2, _3... suffix after a warning comment.

    Args:
        rmap: routine map to export
        fmt: asm (z88dk `defc`) or header (`#define`)
        prefix: prepended to every symbol
        header: optional comment placed first

    Raises:
        NothingToEmitError: empty routine map
    """
    if not rmap:
        raise exceptions.NothingToEmitError("Routine map is empty; nothing to emit")

    lines: List[str] = []
    used: Set[str] = set()
    if header:
        lines.append(_comment(fmt, header))

    def define(routine: str, symbol: str, address: int) -> None:
        emitted = _claim(symbol, used)
        if emitted != symbol:
            log.warning(f"Symbol {symbol} for {routine} is already defined; emitting {emitted}")
            lines.append(_comment(fmt, f"WARNING: {symbol} for {routine} is already defined; renamed {emitted}"))
        lines.append(_definition(fmt, emitted, address))

    for routine in rmap:
        symbol = symbol_name(routine, prefix)
        addresses = rmap.addresses(routine)
        if len(addresses) == 1:
            define(routine, symbol, addresses[0])
            continue
        listed = ", ".join(f"{a:04X}" for a in addresses)
        lines.append(_comment(fmt, f"WARNING: {symbol} has {len(addresses)} distinct entry points ({listed})"))
        for n, address in enumerate(addresses, start=1):
            define(routine, f"{symbol}_{n}", address)
    log.info(f"Emitted {len(used)} definition(s) for {len(rmap)} routine(s) as {fmt.value}")
    return "\n".join(lines) + "\n"
