"""
Lineage checks against real ROM dumps.

Set ROMLINEAGE_CORPUS to a catalog whose rom_path cells point at dumps you own.
Machines without an expected lineage, or without readable dumps, are skipped.
"""
import os
from pathlib import Path

import pytest

from romlineage.catalog import load_catalog
from romlineage.lineage import STATUS_OK, batch_classify
from romlineage.signature_db import builtin_db
from romlineage.types_.types import ExpectedLineage

CORPUS_ENV = "ROMLINEAGE_CORPUS"

pytestmark = pytest.mark.corpus


def _corpus_rows():
    catalog_path = os.environ.get(CORPUS_ENV)
    if not catalog_path:
        return []
    path = Path(catalog_path)
    records = [r for r in load_catalog(path) if r.expected_lineage is not ExpectedLineage.UNKNOWN]
    result = batch_classify(records, builtin_db(), root=path.resolve().parent)
    return [row for row in result.rows if row.status == STATUS_OK]


_ROWS = _corpus_rows()


@pytest.mark.skipif(not _ROWS, reason=f"{CORPUS_ENV} not set or no ROM dumps available")
@pytest.mark.parametrize("row", _ROWS, ids=[f"{r.record.name}:{r.rom_path}" for r in _ROWS])
def test_verdict_matches_expected_lineage(row):
    assert row.agreement is True, f"{row.record.name}: expected {row.record.expected_lineage.value}, got {row.verdict.label}"


def _reference_families():
    """(family, arch) pairs the supplied images are expected to contain."""
    return {(row.record.expected_lineage.family, row.record.arch) for row in _ROWS
            if row.record.expected_lineage.family is not None}


@pytest.mark.skipif(not _ROWS, reason=f"{CORPUS_ENV} not set or no ROM dumps available")
def test_every_builtin_signature_hits_a_reference_image():
    references = _reference_families()
    hit = {point.signature for row in _ROWS for _, point in row.routine_map.rows()}
    expected = [s for s in builtin_db() if (s.family, s.arch) in references]
    if not expected:
        pytest.skip("no supplied image has a lineage the builtin db covers")
    missing = [s.name for s in expected if s.name not in hit]
    assert not missing, f"signatures without a hit in any reference image: {missing}"
