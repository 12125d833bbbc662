"""General utility functions used across the project."""
import logging
import sys

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def configure_logging(verbose: int = 0, quiet: bool = False) -> None:
    """
    Sends library logging to standard error.

    Args:
        verbose (int): 0 warnings, 1 info, 2+ debug
        quiet (bool): errors only, wins over verbose
    """
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def parse_address(text: str) -> int:
    """
    Parses a 16-bit address written as C000, 0xC000, $C000 or &C000.

    Raises:
        ValueError: not hexadecimal or outside 0..0xFFFF
    """
    value = text.strip()
    for prefix in ("0x", "0X", "$", "&"):
        if value.startswith(prefix):
            value = value[len(prefix):]
            break
    address = int(value, 16)
    if not 0 <= address <= 0xFFFF:
        raise ValueError(f"{text!r} is not a 16-bit address")
    return address


def hex4(value: int) -> str:
    return f"0x{value:04X}"
