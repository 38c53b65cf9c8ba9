"""Blended p-gram Gram matrices.

Each per-p raw kernel is normalized by sqrt(k_p(s,s) * k_p(t,t)), then the
normalized kernels are averaged over the p range. Normalizing first keeps
every term in [0, 1], makes the diagonal of a square block exactly 1, and
the final division by the number of p values is a positive scaling that
leaves classifier decisions unchanged.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..corpus import Document
from ..errors import DataError
from ..kernelops import GramMatrix, KernelSpec
from . import backend
from .profiles import (KERNEL_KIND_CODES, MAX_DOC_CHARS, _check_kind,
                       build_hashed_profiles)


def _doc_texts(docs: Sequence[Document], side: str) -> tuple[list[str], str]:
    if not docs:
        raise DataError(f"empty {side} document list")
    modalities = {d.modality for d in docs}
    if len(modalities) != 1:
        raise DataError(f"{side} documents mix modalities: {sorted(modalities)}")
    for d in docs:
        if len(d.text) > MAX_DOC_CHARS:
            raise DataError(
                f"document {d.id!r} has {len(d.text)} characters, over the "
                f"{MAX_DOC_CHARS} limit")
    return [d.text for d in docs], modalities.pop()


def blended_gram(rows: Sequence[Document], cols: Sequence[Document],
                 kind: str, p_min: int, p_max: int) -> GramMatrix:
    """Averaged normalized p-gram kernel over p in [p_min, p_max].

    Entries lie in [0, 1]; a square block (same documents on both sides)
    is exactly symmetric with unit diagonal. A document shorter than some
    p in the range has an undefined normalization and is rejected.
    """
    kind_code = _check_kind(kind)
    if not (1 <= p_min <= p_max):
        raise DataError(f"bad p-gram range {p_min}-{p_max}")
    row_texts, row_mod = _doc_texts(rows, "row")
    col_texts, col_mod = _doc_texts(cols, "col")
    if row_mod != col_mod:
        raise DataError(f"row/col modality mismatch: {row_mod} vs {col_mod}")

    row_ids = tuple(d.id for d in rows)
    col_ids = tuple(d.id for d in cols)
    symmetric = row_ids == col_ids and row_texts == col_texts

    acc = np.zeros((len(rows), len(cols)), dtype=np.float64)
    for p in range(p_min, p_max + 1):
        prof_r = build_hashed_profiles(row_texts, p)
        prof_c = prof_r if symmetric else build_hashed_profiles(col_texts, p)
        for prof, docs in ((prof_r, rows), (prof_c, cols)):
            short = np.nonzero(prof.totals == 0)[0]
            if short.size:
                doc = docs[int(short[0])]
                raise DataError(
                    f"document {doc.id!r} is shorter than p={p}: "
                    f"self-kernel would be 0 and normalization undefined")
        raw = backend.gram_counts(prof_r.hashes, prof_r.counts, prof_r.offsets,
                                  prof_c.hashes, prof_c.counts, prof_c.offsets,
                                  kind_code, symmetric)
        self_r = prof_r.self_kernels(kind).astype(np.float64)
        self_c = prof_c.self_kernels(kind).astype(np.float64)
        acc += raw / np.sqrt(np.outer(self_r, self_c))
    acc /= (p_max - p_min + 1)

    spec = KernelSpec(kind=kind, modality=row_mod, p_min=p_min, p_max=p_max)
    return GramMatrix(values=acc, row_ids=row_ids, col_ids=col_ids, spec=spec,
                      symmetric=symmetric)


def raw_gram(texts_a: Sequence[str], texts_b: Sequence[str], kind: str,
             p: int) -> np.ndarray:
    """Raw (unnormalized) per-p kernel matrix via the active backend.

    Exposed for oracle comparison and benchmarking.
    """
    kind_code = _check_kind(kind)
    pa = build_hashed_profiles(texts_a, p)
    pb = build_hashed_profiles(texts_b, p)
    return backend.gram_counts(pa.hashes, pa.counts, pa.offsets,
                               pb.hashes, pb.counts, pb.offsets,
                               kind_code, False)
