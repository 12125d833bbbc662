"""Command-line interface: scan, classify, compare, emit-defs and catalog validate."""
import functools
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

import click
import polars as pl

from . import __version__
from .catalog import catalog_dataframe, load_builtin_catalog, load_catalog
from .lineage import Thresholds, batch_classify, classify, locate_routines
from .pattern import compile_pattern, scan, scan_all
from .report import (Report, batch_report, classify_report, compare_report, hits_dataframe, render_table,
                     scan_report, similarity_dataframe)
from .rom_image import RomImage, load_rom, select_window
from .signature_db import SignatureDb, builtin_db, load_signatures
from .similarity import compare as compare_fingerprints
from .similarity import fingerprint
from .symbols import emit_defs
from .types_ import exceptions
from .types_.types import Architecture, DefsFormat
from .utils.config import AnalysisSettings, RomlineageConfig
from .utils.utils import configure_logging, parse_address

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_EMPTY = 4

ARCH_CHOICE = click.Choice([a.value for a in Architecture], case_sensitive=False)


class AddressParam(click.ParamType):
    """16-bit address in hex: C000, 0xC000 or $C000."""
    name = "address"

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            return value
        try:
            return parse_address(value)
        except ValueError:
            self.fail(f"{value!r} is not a 16-bit hex address", param, ctx)


class WindowParam(click.ParamType):
    """OFFSET:LENGTH into the ROM file, decimal or 0x-prefixed."""
    name = "offset:length"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            offset_text, length_text = value.split(":")
            return int(offset_text, 0), int(length_text, 0)
        except ValueError:
            self.fail(f"{value!r} is not OFFSET:LENGTH", param, ctx)


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, exceptions.NothingToEmitError):
        return EXIT_EMPTY
    if isinstance(error, (exceptions.RomIoError, OSError)):
        return EXIT_IO
    if isinstance(error, exceptions.SignatureLoadError) and isinstance(error.__cause__, OSError):
        return EXIT_IO
    return EXIT_USAGE


def handle_errors(func):
    """Turns library exceptions into a one-line diagnostic on stderr and the matching exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (exceptions.RomlineageException, OSError) as e:
            log.debug(f"{func.__name__} failed", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            sys.exit(exit_code_for(e))

    return wrapper


def rom_options(func):
    func = click.option("--window", type=WindowParam(), default=None,
                        help="Analyse only OFFSET:LENGTH of the file (one bank of a larger dump).")(func)
    func = click.option("--base", "base_addr", type=AddressParam(), default=0, show_default=True,
                        help="Load address of the first analysed byte.")(func)
    func = click.option("--arch", type=ARCH_CHOICE, default=None, help="CPU family of the ROM code.")(func)
    return func


def _settings(ctx: click.Context, **overrides) -> AnalysisSettings:
    config: RomlineageConfig = ctx.obj
    return config.settings(**overrides)


def _open_rom(path: str, arch: Optional[str], base_addr: int, window: Optional[Tuple[int, int]]) -> RomImage:
    if arch is None:
        raise click.UsageError("--arch is required when analysing a ROM file")
    architecture = Architecture.parse(arch)
    if window is None:
        return load_rom(path, architecture, base_addr)
    rom = load_rom(path, architecture, 0)
    return select_window(rom, window[0], window[1], base_addr)


def _load_db(settings: AnalysisSettings) -> SignatureDb:
    return load_signatures(settings.db_path) if settings.db_path else builtin_db()


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
        log.info(f"Wrote {output}")
    else:
        click.echo(text, nl=not text.endswith("\n"))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="romlineage")
@click.option("--config", "config_paths", type=click.Path(dir_okay=False), multiple=True,
              help="INI file with analysis defaults; repeatable. $ROMLINEAGE_CONFIG is read first.")
@click.option("-v", "--verbose", count=True, help="More logging on stderr (-vv for debug).")
@click.option("-q", "--quiet", is_flag=True, help="Only errors on stderr.")
@click.pass_context
def cli(ctx: click.Context, config_paths: Tuple[str, ...], verbose: int, quiet: bool) -> None:
    """Locate BASIC interpreter routines in 8-bit ROM images and classify their lineage."""
    configure_logging(verbose, quiet)
    ctx.obj = RomlineageConfig.from_environment(*config_paths)


@cli.command("scan")
@click.argument("rom_path", type=click.Path(dir_okay=False))
@rom_options
@click.option("--db", "db_path", type=click.Path(dir_okay=False), default=None,
              help="Signature file used instead of the builtin database.")
@click.option("--pattern", "patterns", multiple=True,
              help="Extra ad-hoc pattern, e.g. 'CD @target:abs16'. No minimum literal count applies.")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON report instead of a table.")
@click.pass_context
@handle_errors
def scan_command(ctx, rom_path, arch, base_addr, window, db_path, patterns, as_json):
    """List every signature hit in ROM_PATH."""
    started = time.perf_counter()
    settings = _settings(ctx, db_path=db_path)
    rom = _open_rom(rom_path, arch, base_addr, window)
    db = _load_db(settings)
    compiled = [compile_pattern(text, name=f"pattern:{n}", min_literals=1) for n, text in enumerate(patterns, 1)]

    arch_db = db.filter(arch=rom.arch)
    if not arch_db:
        log.warning(f"Signature db {db.db_version} has no {rom.arch.value} signatures")
    hits = scan_all(rom, arch_db) if arch_db else []
    for pattern in compiled:
        if pattern.byte_len <= len(rom):
            hits.extend(scan(rom, pattern))
    hits.sort(key=lambda h: h.sort_key())

    report = scan_report(__version__, rom, db, hits, time.perf_counter() - started)
    if as_json:
        click.echo(report.to_json())
        return
    click.echo(f"{rom.source_name} ({rom.arch.value}, base ${rom.base_addr:04X}, "
               f"db {db.db_version}): {len(hits)} hit(s)")
    if hits:
        click.echo(render_table(hits_dataframe(hits, db)))


@cli.command("classify")
@click.argument("rom_path", type=click.Path(dir_okay=False), required=False)
@rom_options
@click.option("--catalog", "catalog_path", type=click.Path(dir_okay=False), default=None,
              help="Classify every ROM listed in a machine catalog instead of one file.")
@click.option("--root", type=click.Path(file_okay=False), default=None,
              help="Directory relative catalog ROM paths resolve against (default: the catalog's).")
@click.option("--db", "db_path", type=click.Path(dir_okay=False), default=None,
              help="Signature file used instead of the builtin database.")
@click.option("--t-derived", type=int, default=None, help="Minimum score for DerivedFrom [4].")
@click.option("--t-original", type=int, default=None, help="Maximum top score for Original [1].")
@click.option("--processes", type=click.IntRange(min=1), default=None, help="Worker processes in batch mode [1].")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON report instead of a table.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write batch rows to this CSV file.")
@click.pass_context
@handle_errors
def classify_command(ctx, rom_path, arch, base_addr, window, catalog_path, root, db_path,
                     t_derived, t_original, processes, as_json, csv_path):
    """Decide whether ROM_PATH (or every catalog ROM) derives from a known BASIC."""
    if (rom_path is None) == (catalog_path is None):
        raise click.UsageError("Give either ROM_PATH or --catalog, not both")
    started = time.perf_counter()
    settings = _settings(ctx, db_path=db_path, t_derived=t_derived, t_original=t_original, processes=processes)
    thresholds = Thresholds(settings.t_derived, settings.t_original)
    db = _load_db(settings)

    if catalog_path is not None:
        records = load_catalog(catalog_path)
        result = batch_classify(records, db, thresholds=thresholds,
                                root=root or Path(catalog_path).resolve().parent,
                                processes=settings.processes)
        if csv_path:
            result.to_csv(csv_path)
        report = batch_report(__version__, db, thresholds, result, time.perf_counter() - started)
        if as_json:
            click.echo(report.to_json())
            return
        click.echo(f"{len(result.verdicts)} classified, {len(result.skipped)} skipped, "
                   f"{len(result.errors)} error(s) (db {db.db_version}, T_derived={thresholds.t_derived}, "
                   f"T_original={thresholds.t_original})")
        click.echo(render_table(result.to_polars_dataframe()))
        return

    rom = _open_rom(rom_path, arch, base_addr, window)
    hits, rmap = locate_routines(rom, db)
    verdict = classify(rmap, thresholds)
    report = classify_report(__version__, rom, db, hits, rmap, verdict, time.perf_counter() - started)
    if as_json:
        click.echo(report.to_json())
        return
    click.echo(f"{rom.source_name}: {verdict.label} [{verdict.confidence.value} confidence]")
    click.echo(verdict.description)
    click.echo("Scores: " + ", ".join(f"{family.label}={score}" for family, score in verdict.scores.items()))
    if rmap:
        click.echo(render_table(rmap.to_polars_dataframe()))
    for address, names in rmap.equivalents().items():
        click.echo(f"Equivalent entry ${address:04X}: {', '.join(names)}")


@cli.command("compare")
@click.argument("rom_a", type=click.Path(dir_okay=False))
@click.argument("rom_b", type=click.Path(dir_okay=False))
@click.option("--arch", type=ARCH_CHOICE, default=Architecture.Z80.value, show_default=True,
              help="CPU family, used by --mask-operands.")
@click.option("--k", "k", type=int, default=None, help="Gram length in bytes, at least 4 [16].")
@click.option("--winnow", type=int, default=None, help="Winnowing window; off by default.")
@click.option("--mask-operands/--no-mask-operands", "mask", default=None,
              help="Zero absolute call/jump operands before hashing.")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON report instead of a table.")
@click.pass_context
@handle_errors
def compare_command(ctx, rom_a, rom_b, arch, k, winnow, mask, as_json):
    """Byte-level k-gram similarity of two ROM images."""
    started = time.perf_counter()
    settings = _settings(ctx, k=k, winnow=winnow, mask_operands=mask)
    architecture = Architecture.parse(arch)
    image_a = load_rom(rom_a, architecture)
    image_b = load_rom(rom_b, architecture)
    fp_a = fingerprint(image_a, settings.k, settings.winnow, mask=settings.mask_operands)
    fp_b = fingerprint(image_b, settings.k, settings.winnow, mask=settings.mask_operands)
    score = compare_fingerprints(fp_a, fp_b)
    report = compare_report(__version__, image_a, image_b, fp_a, score, time.perf_counter() - started)
    if as_json:
        click.echo(report.to_json())
        return
    click.echo(f"{image_a.source_name} vs {image_b.source_name} "
               f"(k={fp_a.k}, winnow={fp_a.winnow_w or 'off'}, mask={'on' if fp_a.masked else 'off'})")
    click.echo(render_table(similarity_dataframe(score)))


@cli.command("emit-defs")
@click.argument("rom_path", type=click.Path(dir_okay=False), required=False)
@rom_options
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Take the routine map from a saved classify --json report.")
@click.option("--db", "db_path", type=click.Path(dir_okay=False), default=None,
              help="Signature file used instead of the builtin database.")
@click.option("--format", "fmt", type=click.Choice([f.value for f in DefsFormat]), default=DefsFormat.ASM.value,
              show_default=True, help="asm: z88dk defc lines; header: C #define lines.")
@click.option("--prefix", default="", help="Prefix for every symbol.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Write to a file.")
@click.pass_context
@handle_errors
def emit_defs_command(ctx, rom_path, arch, base_addr, window, report_path, db_path, fmt, prefix, output):
    """Export located routine addresses as symbol definitions."""
    if (rom_path is None) == (report_path is None):
        raise click.UsageError("Give either ROM_PATH or --report, not both")
    if report_path is not None:
        try:
            text = Path(report_path).read_text(encoding="utf-8")
        except OSError as e:
            raise exceptions.RomIoError(f"Cannot read report '{report_path}': {e}") from e
        try:
            saved = Report.model_validate_json(text)
        except ValueError as e:
            raise click.UsageError(f"'{report_path}' is not a romlineage report: {e}")
        rmap = saved.to_routine_map()
        header = f"{saved.rom.name} {saved.rom.content_hash[:12]} db {saved.db_version}" if saved.rom else None
    else:
        settings = _settings(ctx, db_path=db_path)
        rom = _open_rom(rom_path, arch, base_addr, window)
        db = _load_db(settings)
        _, rmap = locate_routines(rom, db)
        header = f"{rom.source_name} {rom.content_hash[:12]} db {db.db_version}"
    _emit(emit_defs(rmap, DefsFormat(fmt), prefix, header=header), output)


@cli.group("catalog")
def catalog_group() -> None:
    """Machine catalog utilities."""


@catalog_group.command("validate")
@click.argument("catalog_path", type=click.Path(dir_okay=False), required=False)
@click.option("--root", type=click.Path(file_okay=False), default=None,
              help="Directory relative ROM paths resolve against (default: the catalog's).")
@handle_errors
def catalog_validate_command(catalog_path, root):
    """Parse CATALOG_PATH (default: the shipped catalog) and list its machines."""
    if catalog_path is None:
        records = load_builtin_catalog()
        root_dir = Path(root) if root else Path.cwd()
    else:
        records = load_catalog(catalog_path)
        root_dir = Path(root) if root else Path(catalog_path).resolve().parent

    available: List[str] = []
    for record in records:
        paths = record.resolve_rom_paths(root_dir)
        available.append(f"{sum(1 for p in paths if p.is_file())}/{len(paths)}")
    df = catalog_dataframe(records).select("name", "cpu", "year", "expected_lineage", "arch")
    df = df.with_columns(
        analyzable=df["arch"] != "",
        roms=pl.Series(available, dtype=pl.Utf8),
    )
    analyzable = sum(1 for r in records if r.analyzable)
    click.echo(f"{len(records)} machine(s), {analyzable} analyzable")
    if records:
        click.echo(render_table(df))
