"""
.. include:: ../README.md
"""

__version__ = "0.1.0"

from .rom_image import RomImage, load_rom, select_window
from .catalog import MachineRecord, load_catalog, load_builtin_catalog, parse_catalog, write_catalog
from .isa_decode import ControlTransfer, decode_at, encode_transfer
from .pattern import MatchHit, Pattern, compile_pattern, scan, scan_all
from .signature_db import Signature, SignatureDb, builtin_db, dump_signatures, load_signatures
from .lineage import (BatchResult, EntryPoint, LineageVerdict, RoutineMap, Thresholds, batch_classify, classify,
                      extract_entry_points)
from .similarity import FingerprintSet, SimilarityScore, compare, fingerprint
from .symbols import emit_defs
from .report import Report
from .types_.types import Architecture, DefsFormat, ExpectedLineage, Family, TransferKind, VerdictKind
from .types_ import exceptions
from .parallel import run_parallel, ParallelRunner
