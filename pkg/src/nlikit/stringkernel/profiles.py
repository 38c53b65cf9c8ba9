"""Character p-gram profiles.

Two representations: `PGramProfile` keeps the actual substrings and is meant
for inspection, single-pair kernel values, and cross-checking; the Gram
builders use `HashedProfiles`, which store one sorted array of 64-bit
polynomial hashes per document (wrapping mod 2**64) so pairwise kernels
reduce to merge-joins. Hash collisions are possible in principle and are
bounded in practice by the oracle-equivalence test suite.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import DataError

KERNEL_KIND_CODES = {"presence": 0, "intersection": 1}

# Raw kernel values accumulate in int64; self-kernels are at most the gram
# count, so bounding documents keeps every product within 2**40.
MAX_DOC_CHARS = 2 ** 20

_HASH_BASE = np.uint64(0x100000001B3)  # FNV-1a prime, odd, full 64-bit wrap


def _check_kind(kind: str) -> int:
    try:
        return KERNEL_KIND_CODES[kind]
    except KeyError:
        raise DataError(
            f"unknown string-kernel kind {kind!r}; expected one of "
            f"{sorted(KERNEL_KIND_CODES)}") from None


def pgram_hashes(text: str, p: int) -> np.ndarray:
    """64-bit hash of every length-p substring, in order of occurrence."""
    if p < 1:
        raise DataError(f"p must be >= 1, got {p}")
    codes = np.frombuffer(text.encode("utf-32-le"), dtype="<u4").astype(np.uint64)
    n = codes.size - p + 1
    if n <= 0:
        return np.empty(0, dtype=np.uint64)
    h = np.zeros(n, dtype=np.uint64)
    for k in range(p):
        h = h * _HASH_BASE + codes[k:k + n]
    return h


@dataclass(frozen=True)
class HashedProfiles:
    """Per-document sorted unique p-gram hashes with counts, CSR-packed."""

    p: int
    hashes: np.ndarray   # uint64, concatenated, sorted ascending per document
    counts: np.ndarray   # int64, aligned with hashes
    offsets: np.ndarray  # int64, length n_docs + 1
    totals: np.ndarray   # int64, gram count per document (|s| - p + 1, or 0)

    def __len__(self) -> int:
        return self.offsets.size - 1

    def self_kernels(self, kind: str) -> np.ndarray:
        """Raw k(s, s) per document: distinct grams (presence) or gram count."""
        _check_kind(kind)
        if kind == "presence":
            return np.diff(self.offsets)
        return self.totals.copy()


def build_hashed_profiles(texts, p: int) -> HashedProfiles:
    if p < 1:
        raise DataError(f"p must be >= 1, got {p}")
    hash_parts, count_parts = [], []
    offsets = np.zeros(len(texts) + 1, dtype=np.int64)
    totals = np.zeros(len(texts), dtype=np.int64)
    for i, text in enumerate(texts):
        if len(text) > MAX_DOC_CHARS:
            raise DataError(
                f"document {i} has {len(text)} characters, over the "
                f"{MAX_DOC_CHARS} limit")
        h = pgram_hashes(text, p)
        uniq, cnt = np.unique(h, return_counts=True)
        hash_parts.append(uniq)
        count_parts.append(cnt.astype(np.int64))
        offsets[i + 1] = offsets[i] + uniq.size
        totals[i] = h.size
    hashes = (np.concatenate(hash_parts) if hash_parts
              else np.empty(0, dtype=np.uint64))
    counts = (np.concatenate(count_parts) if count_parts
              else np.empty(0, dtype=np.int64))
    return HashedProfiles(p=p, hashes=hashes, counts=counts, offsets=offsets,
                          totals=totals)


@dataclass(frozen=True)
class PGramProfile:
    """Explicit p-gram occurrence counts for one string."""

    p: int
    entries: Mapping[str, int]
    total: int


def build_profile(s: str, p: int) -> PGramProfile:
    """Count the distinct length-p substrings of `s`.

    Empty when the string is shorter than p; otherwise the counts sum to
    len(s) - p + 1.
    """
    if p < 1:
        raise DataError(f"p must be >= 1, got {p}")
    counts = Counter(s[i:i + p] for i in range(len(s) - p + 1))
    return PGramProfile(p=p, entries=dict(counts), total=max(len(s) - p + 1, 0))


def kernel_value(a: PGramProfile, b: PGramProfile, kind: str) -> int:
    """Raw string-kernel value between two profiles of the same p.

    presence: number of distinct shared p-grams; intersection: sum over
    shared p-grams of the smaller occurrence count. Symmetric in (a, b).
    """
    _check_kind(kind)
    if a.p != b.p:
        raise DataError(f"profile p mismatch: {a.p} vs {b.p}")
    small, large = (a.entries, b.entries) if len(a.entries) <= len(b.entries) \
        else (b.entries, a.entries)
    if kind == "presence":
        return sum(1 for g in small if g in large)
    return sum(min(c, large[g]) for g, c in small.items() if g in large)
