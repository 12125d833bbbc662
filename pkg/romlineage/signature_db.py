"""Signature database: named routine patterns per BASIC family, text-file backed."""
import hashlib
import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple, Union

from .pattern import Pattern, compile_pattern
from .types_ import exceptions
from .types_.types import Architecture, Family

log = logging.getLogger(__name__)

BUILTIN_SOURCE = "builtin"
BUILTIN_FILE = "builtin.sig"
VERSION_DIRECTIVE = "#@ db_version"
FIELD_SEPARATOR = "|"
WEIGHT_RANGE = (1, 10)


@dataclass(frozen=True)
class Signature:
    """A routine pattern bound to a firmware family. note keeps the provenance comment."""
    routine: str
    family: Family
    arch: Architecture
    pattern: Pattern
    variant_tag: str = ""
    weight: int = 1
    note: str = ""

    @property
    def key(self) -> Tuple[str, Family, Architecture, str]:
        return self.routine, self.family, self.arch, self.variant_tag

    @property
    def name(self) -> str:
        """Unique label used as pattern_name on match hits."""
        return f"{self.family.value}/{self.arch.value}/{self.routine}/{self.variant_tag}"

    def to_line(self) -> str:
        return FIELD_SEPARATOR.join([self.family.value, self.arch.value, self.routine,
                                     self.variant_tag, str(self.weight), self.pattern.source_text])


@dataclass(frozen=True)
class SignatureDb:
    """Versioned, ordered collection of signatures."""
    signatures: Tuple[Signature, ...]
    db_version: str
    source: str = BUILTIN_SOURCE

    def __len__(self) -> int:
        return len(self.signatures)

    def __iter__(self) -> Iterator[Signature]:
        return iter(self.signatures)

    def __bool__(self) -> bool:
        return bool(self.signatures)

    @property
    def families(self) -> List[Family]:
        return sorted({s.family for s in self.signatures}, key=lambda f: f.value)

    @property
    def architectures(self) -> List[Architecture]:
        return sorted({s.arch for s in self.signatures}, key=lambda a: a.value)

    def filter(self, arch: Optional[Architecture] = None, family: Optional[Family] = None) -> "SignatureDb":
        """Subset keeping order; None means no restriction on that field."""
        kept = tuple(s for s in self.signatures
                     if (arch is None or s.arch is arch) and (family is None or s.family is family))
        return SignatureDb(kept, self.db_version, self.source)

    def merged(self, extra: Iterable[Signature]) -> "SignatureDb":
        """Database with extra signatures appended (duplicate keys rejected)."""
        combined = self.signatures + tuple(extra)
        _check_unique(combined)
        return SignatureDb(combined, self.db_version, self.source)

    def dumps(self) -> str:
        """Serializes to the signature file format; loads() reads it back equal."""
        lines = [f"{VERSION_DIRECTIVE} = {self.db_version}"]
        for signature in self.signatures:
            lines.append("")
            lines.extend(f"# {text}".rstrip() for text in signature.note.splitlines())
            lines.append(signature.to_line())
        return "\n".join(lines) + "\n"


def _check_unique(signatures: Iterable[Signature]) -> None:
    seen = set()
    for signature in signatures:
        if signature.key in seen:
            raise exceptions.SignatureLoadError(
                signature.routine,
                f"duplicate (routine, family, arch, variant) {signature.routine}/{signature.family.value}/"
                f"{signature.arch.value}/{signature.variant_tag!r}")
        seen.add(signature.key)


def _parse_entry(line: str, number: int, note: str) -> Signature:
    fields = line.split(FIELD_SEPARATOR, 5)
    if len(fields) != 6:
        raise exceptions.SignatureLoadError(None, f"expected 6 '|'-separated fields, got {len(fields)}", number)
    family_text, arch_text, routine, variant_tag, weight_text, dsl = (f.strip() for f in fields)
    if not routine:
        raise exceptions.SignatureLoadError(None, "empty routine name", number)
    try:
        family = Family.parse(family_text)
        arch = Architecture.parse(arch_text)
        weight = int(weight_text)
    except ValueError as e:
        raise exceptions.SignatureLoadError(routine, str(e), number) from None
    if not WEIGHT_RANGE[0] <= weight <= WEIGHT_RANGE[1]:
        raise exceptions.SignatureLoadError(routine, f"weight {weight} outside {WEIGHT_RANGE[0]}..{WEIGHT_RANGE[1]}", number)
    try:
        pattern = compile_pattern(dsl, name=routine)
    except exceptions.PatternException as e:
        raise exceptions.SignatureLoadError(routine, f"{type(e).__name__}: {e}", number) from e
    return Signature(routine, family, arch, pattern, variant_tag, weight, note)


def loads(text: str, source: str = BUILTIN_SOURCE) -> SignatureDb:
    """
    Parses signature file text.

    Format: `family|arch|routine|variant_tag|weight|pattern` per line, `#` comments,
    blank lines ignored. The comment block directly above an entry becomes its note;
    `#@ db_version = X` sets the version.

    Raises:
        SignatureLoadError: bad entry, duplicate key or no entries (cause EmptyDb)
    """
    signatures: List[Signature] = []
    db_version: Optional[str] = None
    pending_note: List[str] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            pending_note = []
            continue
        if line.startswith(VERSION_DIRECTIVE):
            _, _, value = line.partition("=")
            db_version = value.strip() or db_version
            continue
        if line.startswith("#"):
            pending_note.append(line[1:].strip())
            continue
        signatures.append(_parse_entry(line, number, "\n".join(pending_note)))
        pending_note = []

    if not signatures:
        raise exceptions.SignatureLoadError(None, "EmptyDb")
    _check_unique(signatures)
    if db_version is None:
        db_version = "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
    return SignatureDb(tuple(signatures), db_version, source)


def load_signatures(path: Union[str, Path]) -> SignatureDb:
    """
    Loads a signature file.

    Raises:
        SignatureLoadError: unreadable file (cause carries the OS error) or bad content
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise exceptions.SignatureLoadError(None, f"cannot read '{path}': {e}") from e
    db = loads(text, source=str(path))
    log.info(f"Loaded {len(db)} signatures from {path} (version {db.db_version})")
    return db


def dump_signatures(db: SignatureDb, path: Union[str, Path]) -> None:
    Path(path).write_text(db.dumps(), encoding="utf-8")


@lru_cache(maxsize=1)
def builtin_db() -> SignatureDb:
    """The shipped default signatures (romlineage/data/builtin.sig)."""
    text = resources.files("romlineage.data").joinpath(BUILTIN_FILE).read_text(encoding="utf-8")
    db = loads(text, source=BUILTIN_SOURCE)
    log.debug(f"Builtin signature db {db.db_version}: {len(db)} entries")
    return db
