"""Report documents (JSON) and human-readable tables for the command line."""
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

import polars as pl
from pydantic import BaseModel, ConfigDict

from .lineage import BatchResult, BatchRow, EntryPoint, LineageVerdict, RoutineMap, Thresholds
from .pattern import MatchHit
from .rom_image import RomImage
from .signature_db import SignatureDb
from .similarity import FingerprintSet, SimilarityScore
from .types_.types import Family
from .utils.utils import hex4, parse_address

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"


class _ReportModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class RomIdentity(_ReportModel):
    name: str
    content_hash: str
    arch: str
    base_addr: str
    size: int


class HitEntry(_ReportModel):
    offset: int
    address: str
    pattern_name: str
    routine: Optional[str] = None
    family: Optional[str] = None
    captures: Dict[str, str] = {}


class RoutineEntry(_ReportModel):
    address: str
    routine: str
    family: str
    variant_tag: str
    hit_offset: int
    weight: int
    signature: str
    slot: Optional[str] = None


class ThresholdsEntry(_ReportModel):
    t_derived: int
    t_original: int


class VerdictEntry(_ReportModel):
    label: str
    kind: str
    family: Optional[str] = None
    confidence: str
    description: str
    scores: Dict[str, int]
    matched_routines: Dict[str, List[str]]


class SimilarityEntry(_ReportModel):
    """Ratios as floats for dashboards plus the exact fraction text."""
    other: RomIdentity
    k: int
    winnow: Optional[int] = None
    mask_operands: bool
    jaccard: float
    jaccard_exact: str
    containment_a_in_b: float
    containment_b_in_a: float
    shared_grams: int


class BatchEntry(_ReportModel):
    machine: str
    country: str
    cpu: str
    year: int
    expected_lineage: str
    rom_path: Optional[str] = None
    status: str
    reason: str
    content_hash: Optional[str] = None
    verdict: Optional[VerdictEntry] = None
    agreement: Optional[bool] = None
    routine_map: Optional[Dict[str, List[RoutineEntry]]] = None


class Timing(_ReportModel):
    seconds: float


class Report(_ReportModel):
    """
    One command's result. Everything except `timing` is a pure function of the inputs,
    so two runs over the same files serialize identically once timing is excluded.
    """
    schema_version: str = SCHEMA_VERSION
    tool_version: str
    command: str
    db_version: Optional[str] = None
    rom: Optional[RomIdentity] = None
    hits: Optional[List[HitEntry]] = None
    routine_map: Optional[Dict[str, List[RoutineEntry]]] = None
    equivalents: Optional[Dict[str, List[str]]] = None
    verdict: Optional[VerdictEntry] = None
    thresholds: Optional[ThresholdsEntry] = None
    similarity: Optional[SimilarityEntry] = None
    batch: Optional[List[BatchEntry]] = None
    timing: Optional[Timing] = None

    def to_json(self, *, include_timing: bool = True) -> str:
        exclude = None if include_timing else {"timing"}
        return self.model_dump_json(indent=2, exclude=exclude, exclude_none=False)

    def to_routine_map(self) -> RoutineMap:
        """Rebuilds the routine map of a single-ROM report; empty when the report has none."""
        return routine_map_from_entries(self.routine_map or {})


# --- Conversions from analysis objects ---

def rom_identity(rom: RomImage) -> RomIdentity:
    return RomIdentity(name=rom.source_name, content_hash=rom.content_hash, arch=rom.arch.value,
                       base_addr=hex4(rom.base_addr), size=len(rom))


def hit_entries(hits: Iterable[MatchHit], db: Optional[SignatureDb] = None) -> List[HitEntry]:
    by_name = {s.name: s for s in db} if db is not None else {}
    entries = []
    for hit in hits:
        signature = by_name.get(hit.pattern_name)
        entries.append(HitEntry(
            offset=hit.offset,
            address=hex4(hit.address),
            pattern_name=hit.pattern_name,
            routine=signature.routine if signature else None,
            family=signature.family.label if signature else None,
            captures={slot: hex4(value) for slot, value in hit.captures.items()},
        ))
    return entries


def routine_entries(rmap: RoutineMap) -> Dict[str, List[RoutineEntry]]:
    return {
        name: [RoutineEntry(address=hex4(p.entry_address), routine=p.routine, family=p.family.value,
                            variant_tag=p.variant_tag, hit_offset=p.hit_offset, weight=p.weight,
                            signature=p.signature, slot=p.slot)
               for p in points]
        for name, points in rmap.entries.items()
    }


def routine_map_from_entries(entries: Dict[str, List[RoutineEntry]]) -> RoutineMap:
    points = []
    for name, items in entries.items():
        for item in items:
            points.append((name, EntryPoint(parse_address(item.address), Family.parse(item.family),
                                            item.variant_tag, item.hit_offset, item.weight,
                                            item.routine, item.signature, item.slot)))
    return RoutineMap.from_entries(points)


def verdict_entry(verdict: LineageVerdict) -> VerdictEntry:
    return VerdictEntry(
        label=verdict.label,
        kind=verdict.kind.value,
        family=verdict.family.label if verdict.family else None,
        confidence=verdict.confidence.value,
        description=verdict.description,
        scores={family.label: verdict.scores[family] for family in Family},
        matched_routines={family.label: sorted(verdict.matched_routines[family]) for family in Family},
    )


def thresholds_entry(thresholds: Thresholds) -> ThresholdsEntry:
    return ThresholdsEntry(t_derived=thresholds.t_derived, t_original=thresholds.t_original)


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def similarity_entry(other: RomImage, fp: FingerprintSet, score: SimilarityScore) -> SimilarityEntry:
    return SimilarityEntry(
        other=rom_identity(other),
        k=fp.k,
        winnow=fp.winnow_w,
        mask_operands=fp.masked,
        jaccard=float(score.jaccard),
        jaccard_exact=_fraction_text(score.jaccard),
        containment_a_in_b=float(score.containment_a_in_b),
        containment_b_in_a=float(score.containment_b_in_a),
        shared_grams=score.shared_grams,
    )


def batch_entry(row: BatchRow) -> BatchEntry:
    record = row.record
    return BatchEntry(
        machine=record.name,
        country=record.country,
        cpu=record.cpu,
        year=record.year,
        expected_lineage=record.expected_lineage.value,
        rom_path=row.rom_path,
        status=row.status,
        reason=row.reason,
        content_hash=row.content_hash,
        verdict=verdict_entry(row.verdict) if row.verdict else None,
        agreement=row.agreement,
        routine_map=routine_entries(row.routine_map) if row.routine_map is not None else None,
    )


def _equivalents(rmap: RoutineMap) -> Dict[str, List[str]]:
    return {hex4(address): names for address, names in rmap.equivalents().items()}


# --- Report builders, one per command ---

def scan_report(tool_version: str, rom: RomImage, db: SignatureDb, hits: List[MatchHit],
                seconds: Optional[float] = None) -> Report:
    return Report(tool_version=tool_version, command="scan", db_version=db.db_version, rom=rom_identity(rom),
                  hits=hit_entries(hits, db), timing=_timing(seconds))


def classify_report(tool_version: str, rom: RomImage, db: SignatureDb, hits: List[MatchHit],
                    rmap: RoutineMap, verdict: LineageVerdict, seconds: Optional[float] = None) -> Report:
    return Report(tool_version=tool_version, command="classify", db_version=db.db_version,
                  rom=rom_identity(rom), hits=hit_entries(hits, db), routine_map=routine_entries(rmap),
                  equivalents=_equivalents(rmap), verdict=verdict_entry(verdict),
                  thresholds=thresholds_entry(verdict.thresholds), timing=_timing(seconds))


def batch_report(tool_version: str, db: SignatureDb, thresholds: Thresholds, result: BatchResult,
                 seconds: Optional[float] = None) -> Report:
    return Report(tool_version=tool_version, command="classify", db_version=db.db_version,
                  thresholds=thresholds_entry(thresholds), batch=[batch_entry(r) for r in result.rows],
                  timing=_timing(seconds))


def compare_report(tool_version: str, rom_a: RomImage, rom_b: RomImage, fp: FingerprintSet,
                   score: SimilarityScore, seconds: Optional[float] = None) -> Report:
    return Report(tool_version=tool_version, command="compare", rom=rom_identity(rom_a),
                  similarity=similarity_entry(rom_b, fp, score), timing=_timing(seconds))


def _timing(seconds: Optional[float]) -> Optional[Timing]:
    return Timing(seconds=round(seconds, 6)) if seconds is not None else None


# --- Human-readable tables ---

def hits_dataframe(hits: Iterable[MatchHit], db: Optional[SignatureDb] = None) -> pl.DataFrame:
    entries = hit_entries(hits, db)
    return pl.DataFrame(
        {
            "offset": [f"{e.offset:05X}" for e in entries],
            "address": [e.address for e in entries],
            "family": [e.family or "-" for e in entries],
            "routine": [e.routine or e.pattern_name for e in entries],
            "captures": [" ".join(f"{k}={v}" for k, v in e.captures.items()) for e in entries],
        },
        schema={c: pl.Utf8 for c in ("offset", "address", "family", "routine", "captures")},
    )


def similarity_dataframe(score: SimilarityScore) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "metric": ["jaccard", "containment_a_in_b", "containment_b_in_a", "shared_grams"],
            "value": [f"{float(score.jaccard):.3f}", f"{float(score.containment_a_in_b):.3f}",
                      f"{float(score.containment_b_in_a):.3f}", str(score.shared_grams)],
        },
        schema={"metric": pl.Utf8, "value": pl.Utf8},
    )


def render_table(df: pl.DataFrame) -> str:
    """Prints every row; polars would otherwise elide the middle of long tables."""
    with pl.Config(tbl_rows=-1, tbl_cols=-1, tbl_hide_dataframe_shape=True, fmt_str_lengths=100,
                   tbl_width_chars=200):
        return str(df)
