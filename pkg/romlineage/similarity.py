"""k-gram fingerprints and set similarity between ROM images."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .isa_decode import absolute_operand_opcodes
from .rom_image import RomImage
from .types_ import exceptions

log = logging.getLogger(__name__)

DEFAULT_K = 16
MIN_K = 4

# Fixed constants: fingerprints must compare across runs and machines.
HASH_BASE = np.uint64(0x100000001B3)
MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_2 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class FingerprintSet:
    k: int
    winnow_w: Optional[int]
    masked: bool
    hashes: FrozenSet[int]
    source_hash: str

    @property
    def params(self) -> Tuple[int, Optional[int], bool]:
        return self.k, self.winnow_w, self.masked

    def __len__(self) -> int:
        return len(self.hashes)


@dataclass(frozen=True)
class SimilarityScore:
    """Exact set ratios; use float() for display."""
    jaccard: Fraction
    containment_a_in_b: Fraction
    containment_b_in_a: Fraction
    shared_grams: int


def mask_operands(rom: RomImage) -> bytes:
    """
    Zeroes the two operand bytes after every absolute call/jump opcode so that
    relocated copies of the same code produce the same grams.
    """
    data = np.frombuffer(rom.data, dtype=np.uint8).copy()
    if len(data) < 3:
        return data.tobytes()
    opcodes = np.array(absolute_operand_opcodes(rom.arch), dtype=np.uint8)
    # Sites come from the unmasked bytes, so an operand byte equal to an opcode opens its own
    # site (CD CD 34 12 -> CD 00 00 00). Both images are masked by this same rule.
    sites = np.flatnonzero(np.isin(data[:-2], opcodes))
    data[sites + 1] = 0
    data[sites + 2] = 0
    log.debug(f"Masked operands at {len(sites)} site(s) in {rom.source_name}")
    return data.tobytes()


def gram_hashes(data: bytes, k: int) -> np.ndarray:
    """64-bit hash of every k-byte window, in order (polynomial, then mixed)."""
    values = np.frombuffer(data, dtype=np.uint8).astype(np.uint64)
    count = len(values) - k + 1
    h = np.zeros(count, dtype=np.uint64)
    for j in range(k):
        # uint64 arithmetic wraps mod 2**64
        h = h * HASH_BASE + values[j:j + count] + np.uint64(1)
    h ^= h >> np.uint64(30)
    h *= MIX_1
    h ^= h >> np.uint64(27)
    h *= MIX_2
    h ^= h >> np.uint64(31)
    return h


def winnow(hashes: np.ndarray, w: int) -> np.ndarray:
    """Minimum of every w-window, leftmost on ties; one pick when fewer than w hashes."""
    if len(hashes) <= w:
        return hashes[[int(np.argmin(hashes))]]
    windows = sliding_window_view(hashes, w)
    picks = np.unique(np.argmin(windows, axis=1) + np.arange(len(windows)))
    return hashes[picks]


def fingerprint(rom: RomImage,
                k: int = DEFAULT_K,
                winnow_w: Optional[int] = None,
                *,
                mask: bool = False) -> FingerprintSet:
    """
    Hashes all k-grams of an image.

    Args:
        rom: image (no address window required)
        k: gram length in bytes, at least 4
        winnow_w: winnowing window, None keeps every gram
        mask: zero absolute call/jump operands first

    Raises:
        TooShortError: k below 4 or image shorter than k
        SimilarityException: winnow_w below 1
    """
    if k < MIN_K:
        raise exceptions.TooShortError(f"Gram length {k} is below the minimum of {MIN_K}")
    if winnow_w is not None and winnow_w < 1:
        raise exceptions.SimilarityException(f"Winnowing window {winnow_w} must be at least 1")
    if len(rom.data) < k:
        raise exceptions.TooShortError(f"'{rom.source_name}' has {len(rom.data)} bytes, fewer than k={k}")

    data = mask_operands(rom) if mask else rom.data
    hashes = gram_hashes(data, k)
    if winnow_w is not None:
        hashes = winnow(hashes, winnow_w)
    result = FingerprintSet(k, winnow_w, mask, frozenset(hashes.tolist()), rom.content_hash)
    log.debug(f"Fingerprint of {rom.source_name}: {len(result)} hash(es), k={k}, w={winnow_w}, mask={mask}")
    return result


def compare(a: FingerprintSet, b: FingerprintSet) -> SimilarityScore:
    """
    Raises:
        ParamMismatchError: sets built with different k, window or masking
    """
    if a.params != b.params:
        raise exceptions.ParamMismatchError(f"Cannot compare fingerprints with parameters {a.params} and {b.params}")
    shared = len(a.hashes & b.hashes)
    union = len(a.hashes | b.hashes)
    return SimilarityScore(
        jaccard=Fraction(shared, union),
        containment_a_in_b=Fraction(shared, len(a.hashes)),
        containment_b_in_a=Fraction(shared, len(b.hashes)),
        shared_grams=shared,
    )
