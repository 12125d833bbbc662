"""Entry-point extraction and BASIC lineage classification."""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import pandas
import polars as pl

from .catalog import MachineRecord
from .parallel import run_parallel
from .pattern import ElementKind, MatchHit, scan_all
from .rom_image import RomImage, load_rom
from .signature_db import Signature, SignatureDb
from .types_ import exceptions
from .types_.types import Confidence, ExpectedLineage, Family, VerdictKind

log = logging.getLogger(__name__)

ADDRESS_SLOTS = (ElementKind.CAPTURE_ABS16, ElementKind.CAPTURE_REL8)


@dataclass(frozen=True)
class EntryPoint:
    """One routine entry address together with the hit it came from."""
    entry_address: int
    family: Family
    variant_tag: str
    hit_offset: int
    weight: int
    routine: str
    signature: str
    slot: Optional[str] = None

    def sort_key(self) -> Tuple[int, int, str, str]:
        return self.entry_address, self.hit_offset, self.signature, self.slot or ""


@dataclass(frozen=True)
class RoutineMap:
    """Routine name -> entry points sorted by address."""
    entries: Dict[str, Tuple[EntryPoint, ...]] = field(default_factory=dict)

    @classmethod
    def from_entries(cls, points: Iterable[Tuple[str, EntryPoint]]) -> "RoutineMap":
        grouped: Dict[str, List[EntryPoint]] = defaultdict(list)
        for name, point in points:
            grouped[name].append(point)
        return cls({name: tuple(sorted(grouped[name], key=EntryPoint.sort_key)) for name in sorted(grouped)})

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def addresses(self, name: str) -> List[int]:
        """Distinct entry addresses of a routine, ascending."""
        return sorted({p.entry_address for p in self.entries.get(name, ())})

    def rows(self) -> List[Tuple[str, EntryPoint]]:
        return [(name, point) for name in self.entries for point in self.entries[name]]

    def equivalents(self) -> Dict[int, List[str]]:
        """Addresses reached under more than one routine name."""
        by_address: Dict[int, set] = defaultdict(set)
        for name, point in self.rows():
            by_address[point.entry_address].add(name)
        return {address: sorted(names) for address, names in sorted(by_address.items()) if len(names) > 1}

    def to_polars_dataframe(self) -> pl.DataFrame:
        rows = self.rows()
        return pl.DataFrame(
            {
                "routine": [name for name, _ in rows],
                "entry": [f"{p.entry_address:04X}" for _, p in rows],
                "family": [p.family.label for _, p in rows],
                "variant": [p.variant_tag for _, p in rows],
                "hit_offset": [p.hit_offset for _, p in rows],
                "weight": [p.weight for _, p in rows],
            },
            schema={"routine": pl.Utf8, "entry": pl.Utf8, "family": pl.Utf8, "variant": pl.Utf8,
                    "hit_offset": pl.Int64, "weight": pl.Int64},
        )


@dataclass(frozen=True)
class Thresholds:
    """Derived-from needs at least t_derived; original needs at most t_original."""
    t_derived: int = 4
    t_original: int = 1

    def __post_init__(self):
        if not self.t_derived > self.t_original >= 0:
            raise exceptions.ThresholdError(
                f"Thresholds must satisfy T_derived > T_original >= 0, got {self.t_derived}/{self.t_original}")


@dataclass(frozen=True)
class LineageVerdict:
    scores: Dict[Family, int]
    matched_routines: Dict[Family, FrozenSet[str]]
    kind: VerdictKind
    family: Optional[Family]
    confidence: Confidence
    thresholds: Thresholds

    @property
    def label(self) -> str:
        if self.kind is VerdictKind.DERIVED_FROM:
            return f"DerivedFrom({self.family.label})"
        return self.kind.value

    @property
    def description(self) -> str:
        """Report wording; original only means nothing in the db matched."""
        if self.kind is VerdictKind.ORIGINAL:
            return "Original (no known-family match)"
        if self.kind is VerdictKind.INCONCLUSIVE:
            return "Inconclusive (no unique family above threshold)"
        return f"Derived from {self.family.label} BASIC"

    def agrees_with(self, expected: ExpectedLineage) -> Optional[bool]:
        """None when the expectation is unknown."""
        if expected is ExpectedLineage.UNKNOWN:
            return None
        if expected is ExpectedLineage.ORIGINAL:
            return self.kind is VerdictKind.ORIGINAL
        return self.kind is VerdictKind.DERIVED_FROM and self.family is expected.family


def _entries_for_hit(hit: MatchHit, signature: Signature) -> List[Tuple[str, EntryPoint]]:
    slots = [s for s in signature.pattern.slots if s.kind in ADDRESS_SLOTS]

    def point(address: int, slot: Optional[str]) -> EntryPoint:
        return EntryPoint(address, signature.family, signature.variant_tag, hit.offset,
                          signature.weight, signature.routine, signature.name, slot)

    if not slots:
        # body signature: the routine starts at the match
        return [(signature.routine, point(hit.address, None))]
    if len(slots) == 1:
        return [(signature.routine, point(hit.captures[slots[0].name], slots[0].name))]
    return [(f"{signature.routine}.{s.name}", point(hit.captures[s.name], s.name)) for s in slots]


def routine_map_from_hits(hits: Iterable[MatchHit], db: SignatureDb) -> RoutineMap:
    """Folds scan hits into a RoutineMap; every entry keeps its hit offset and signature."""
    by_name = {s.name: s for s in db.signatures}
    points = []
    for hit in hits:
        signature = by_name.get(hit.pattern_name)
        if signature is None:
            log.warning(f"Hit at offset {hit.offset} names unknown signature '{hit.pattern_name}'")
            continue
        points.extend(_entries_for_hit(hit, signature))
    return RoutineMap.from_entries(points)


def locate_routines(rom: RomImage, db: SignatureDb) -> Tuple[List[MatchHit], RoutineMap]:
    """
    Scans an image with the signatures for its architecture.

    Returns:
        (hits, routine map), both empty when nothing matched

    Raises:
        ArchMismatchError: db holds no signatures for rom.arch
    """
    arch_db = db.filter(arch=rom.arch)
    if not arch_db:
        raise exceptions.ArchMismatchError(
            f"Signature db {db.db_version} has no {rom.arch.name} signatures for '{rom.source_name}'")
    hits = scan_all(rom, arch_db)
    rmap = routine_map_from_hits(hits, arch_db)
    log.info(f"{rom.source_name}: {len(hits)} hit(s), {len(rmap)} routine(s) located")
    return hits, rmap


def extract_entry_points(rom: RomImage, db: SignatureDb) -> RoutineMap:
    """
    Maps routine names to entry addresses found in an image.

    Args:
        rom: image within the 16-bit window
        db: signature database

    Returns:
        RoutineMap: empty when nothing matched

    Raises:
        ArchMismatchError: db holds no signatures for rom.arch
    """
    return locate_routines(rom, db)[1]


def classify(rmap: RoutineMap, thresholds: Thresholds = Thresholds()) -> LineageVerdict:
    """
    Scores each family by the weights of its distinct matched routines and decides the lineage.

    A routine counts once per family however many sites matched; when variants
    disagree on weight the highest applies.
    """
    weights: Dict[Family, Dict[str, int]] = {family: {} for family in Family}
    for _, point in rmap.rows():
        per_family = weights[point.family]
        per_family[point.routine] = max(per_family.get(point.routine, 0), point.weight)

    scores = {family: sum(routines.values()) for family, routines in weights.items()}
    matched = {family: frozenset(routines) for family, routines in weights.items()}

    ranked = sorted(scores.values(), reverse=True)
    top, runner_up = ranked[0], ranked[1]
    leaders = [family for family, score in scores.items() if score == top]

    if top <= thresholds.t_original:
        kind, family = VerdictKind.ORIGINAL, None
    elif len(leaders) == 1 and top >= thresholds.t_derived:
        kind, family = VerdictKind.DERIVED_FROM, leaders[0]
    else:
        kind, family = VerdictKind.INCONCLUSIVE, None

    confidence = Confidence.HIGH if not rmap or top - runner_up >= 2 else Confidence.LOW
    verdict = LineageVerdict(scores, matched, kind, family, confidence, thresholds)
    score_text = ", ".join(f"{f.label}={s}" for f, s in scores.items())
    log.debug(f"Scores {score_text} -> {verdict.label} ({confidence.value})")
    return verdict


# --- Batch classification over a machine catalog ---

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped"
STATUS_ERROR = "error"


@dataclass(frozen=True)
class BatchRow:
    """Outcome for one ROM revision of one catalog machine."""
    record: MachineRecord
    rom_path: Optional[str]
    status: str
    reason: str = ""
    verdict: Optional[LineageVerdict] = None
    routine_map: Optional[RoutineMap] = None
    content_hash: Optional[str] = None

    @property
    def agreement(self) -> Optional[bool]:
        return self.verdict.agrees_with(self.record.expected_lineage) if self.verdict else None


@dataclass(frozen=True)
class BatchResult:
    rows: Tuple[BatchRow, ...]

    @property
    def verdicts(self) -> List[Tuple[MachineRecord, LineageVerdict, Optional[bool]]]:
        """(record, verdict, agreement) for every analysed ROM, in catalog order."""
        return [(r.record, r.verdict, r.agreement) for r in self.rows if r.verdict is not None]

    @property
    def skipped(self) -> List[BatchRow]:
        return [r for r in self.rows if r.status == STATUS_SKIPPED]

    @property
    def errors(self) -> List[BatchRow]:
        return [r for r in self.rows if r.status == STATUS_ERROR]

    def to_polars_dataframe(self) -> pl.DataFrame:
        def agreement_text(row: BatchRow) -> str:
            if row.agreement is None:
                return "n/a"
            return "yes" if row.agreement else "NO"

        return pl.DataFrame(
            {
                "machine": [r.record.name for r in self.rows],
                "cpu": [r.record.cpu for r in self.rows],
                "rom": [r.rom_path or "" for r in self.rows],
                "status": [r.status for r in self.rows],
                "expected": [r.record.expected_lineage.value for r in self.rows],
                "verdict": [r.verdict.label if r.verdict else "" for r in self.rows],
                "confidence": [r.verdict.confidence.value if r.verdict else "" for r in self.rows],
                "agreement": [agreement_text(r) for r in self.rows],
                "reason": [r.reason for r in self.rows],
            },
            schema={c: pl.Utf8 for c in ("machine", "cpu", "rom", "status", "expected", "verdict",
                                         "confidence", "agreement", "reason")},
        )

    def to_pandas_dataframe(self) -> pandas.DataFrame:
        df = self.to_polars_dataframe()
        return pandas.DataFrame.from_records(df.to_dicts(), columns=df.columns)

    def to_csv(self, file_path: Union[str, Path], separator: str = ",") -> None:
        path_obj = Path(file_path)
        path_obj.parent.mkdir(parents=True, exist_ok=True)
        self.to_polars_dataframe().write_csv(path_obj, separator=separator)
        log.info(f"Saved batch results to {path_obj.resolve()}")


def _classify_task(task) -> BatchRow:
    """Worker for one (record, rom path) pair; never raises."""
    record, rom_path, display_path, db, thresholds = task
    path = Path(rom_path)
    if not path.is_file():
        log.warning(f"{record.name}: ROM file missing: {path}")
        return BatchRow(record, display_path, STATUS_SKIPPED, f"ROM file missing: {display_path}")
    try:
        rom = load_rom(path, record.arch, record.base_addr, name=f"{record.name}:{path.name}")
        rmap = extract_entry_points(rom, db)
        verdict = classify(rmap, thresholds)
    except exceptions.RomlineageException as e:
        log.error(f"{record.name}: {type(e).__name__}: {e}")
        return BatchRow(record, display_path, STATUS_ERROR, f"{type(e).__name__}: {e}")
    log.info(f"{record.name} ({display_path}): {verdict.label}")
    return BatchRow(record, display_path, STATUS_OK, verdict.description, verdict, rmap, rom.content_hash)


def batch_classify(catalog: Iterable[MachineRecord],
                   db: SignatureDb,
                   *,
                   thresholds: Thresholds = Thresholds(),
                   root: Union[str, Path, None] = None,
                   processes: int = 1) -> BatchResult:
    """
    Classifies every ROM listed in a catalog.

    Args:
        catalog: machine records
        db: signature database
        thresholds: classification thresholds
        root: directory that relative rom paths resolve against
        processes: worker processes; rows stay in catalog order

    Returns:
        BatchResult: one row per ROM revision; machines without ROMs or without a
        decoder appear as skipped rows, failures as error rows
    """
    rows: List[Optional[BatchRow]] = []
    tasks = []
    for record in catalog:
        if not record.analyzable:
            rows.append(BatchRow(record, None, STATUS_SKIPPED, f"CPU {record.cpu} has no decoder"))
            continue
        if not record.rom_paths:
            rows.append(BatchRow(record, None, STATUS_SKIPPED, "no ROM files listed"))
            continue
        for display_path, path in zip(record.rom_paths, record.resolve_rom_paths(root)):
            tasks.append((len(rows), (record, str(path), display_path, db, thresholds)))
            rows.append(None)

    log.info(f"Batch: {len(tasks)} ROM(s) to classify, {len(rows) - len(tasks)} machine(s) skipped")
    results = run_parallel(processes > 1, processes, _classify_task, [task for _, task in tasks])
    for (index, _), row in zip(tasks, results):
        rows[index] = row
    return BatchResult(tuple(rows))
