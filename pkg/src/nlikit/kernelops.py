"""Kernel algebra over Gram matrices.

Normalized string-kernel Grams live in [0, 1]; the RBF transform maps a
normalized similarity k to exp(-(1 - k) / (2 sigma^2)); the squared
construction treats each sample's row of train similarities as its feature
vector and takes dot products; fusion is a plain entrywise sum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .corpus import FeatureVector
from .envelope import read_envelope, write_envelope
from .errors import ConfigError, DataError, NumericError

STRING_KINDS = ("presence", "intersection")
KERNEL_KINDS = STRING_KINDS + ("ivector_rbf", "sum")
KERNEL_MODALITIES = ("essay", "transcript", "audio")

SYMMETRY_TOL = 1e-12
RANGE_TOL = 1e-9


@dataclass(frozen=True)
class KernelSpec:
    """Declarative description of one kernel (or a sum of kernels).

    String kernels carry a modality and a p-gram range; `sigma` is set when
    an RBF transform applies; `squared` marks the row-similarity dot-product
    construction on top of an RBF kernel. A `sum` spec carries only `parts`.
    """

    kind: str
    modality: Optional[str] = None
    p_min: Optional[int] = None
    p_max: Optional[int] = None
    sigma: Optional[float] = None
    squared: bool = False
    parts: tuple["KernelSpec", ...] = ()

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ConfigError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "sum":
            if not self.parts:
                raise ConfigError("sum spec needs component parts")
            if (self.modality, self.p_min, self.p_max, self.sigma) != (None,) * 4:
                raise ConfigError("sum spec takes no own parameters")
            return
        if self.parts:
            raise ConfigError(f"{self.kind} spec cannot have parts")
        if self.modality not in KERNEL_MODALITIES:
            raise ConfigError(f"bad modality {self.modality!r}")
        if self.kind in STRING_KINDS:
            if self.modality == "audio":
                raise ConfigError("string kernels need a text modality")
            if self.p_min is None or self.p_max is None:
                raise ConfigError("string kernels need a p-gram range")
            if not (1 <= self.p_min <= self.p_max):
                raise ConfigError(
                    f"bad p-gram range {self.p_min}-{self.p_max}")
        else:  # ivector_rbf
            if self.modality != "audio":
                raise ConfigError("ivector kernels use the audio modality")
            if self.p_min is not None or self.p_max is not None:
                raise ConfigError("ivector kernels take no p-gram range")
            if self.sigma is None:
                raise ConfigError("ivector kernels need sigma")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.squared and self.sigma is None:
            raise ConfigError("squared applies only to RBF kernels")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "sum":
            out["parts"] = [p.to_dict() for p in self.parts]
            return out
        out["modality"] = self.modality
        if self.kind in STRING_KINDS:
            out["p_min"] = self.p_min
            out["p_max"] = self.p_max
        if self.sigma is not None:
            out["sigma"] = self.sigma
        if self.squared:
            out["squared"] = True
        return out

    @staticmethod
    def from_dict(d: dict) -> "KernelSpec":
        if d.get("kind") == "sum":
            return KernelSpec(kind="sum", parts=tuple(
                KernelSpec.from_dict(p) for p in d["parts"]))
        return KernelSpec(kind=d["kind"], modality=d.get("modality"),
                          p_min=d.get("p_min"), p_max=d.get("p_max"),
                          sigma=d.get("sigma"), squared=d.get("squared", False))


@dataclass(frozen=True)
class GramMatrix:
    """Dense pairwise-similarity block with sample ids.

    `spec` records how the matrix was computed; hand-built matrices may
    leave it unset, which blocks spec-dependent transforms like
    rbf_transform but nothing else.
    """

    values: np.ndarray
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]
    spec: Optional[KernelSpec] = None
    symmetric: bool = False

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise DataError(f"Gram values must be 2-D, got shape {vals.shape}")
        object.__setattr__(self, "row_ids", tuple(self.row_ids))
        object.__setattr__(self, "col_ids", tuple(self.col_ids))
        if vals.shape != (len(self.row_ids), len(self.col_ids)):
            raise DataError(
                f"Gram shape {vals.shape} does not match id lists "
                f"({len(self.row_ids)} x {len(self.col_ids)})")
        if not np.all(np.isfinite(vals)):
            raise DataError("Gram matrix contains non-finite entries")
        if self.symmetric:
            if self.row_ids != self.col_ids:
                raise DataError("symmetric Gram must have row_ids == col_ids")
            if vals.shape[0] != vals.shape[1] or \
                    np.abs(vals - vals.T).max(initial=0.0) > SYMMETRY_TOL:
                raise DataError("Gram flagged symmetric is not symmetric")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def rbf_transform(k_hat: GramMatrix, sigma: float) -> GramMatrix:
    """Map a normalized string-kernel Gram entrywise to exp(-(1-k)/(2 sigma^2))."""
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if k_hat.spec is None or k_hat.spec.kind not in STRING_KINDS:
        kind = None if k_hat.spec is None else k_hat.spec.kind
        raise ConfigError(
            f"RBF transform applies to normalized string kernels, "
            f"got kind {kind!r}")
    vals = k_hat.values
    bad = (vals < -RANGE_TOL) | (vals > 1.0 + RANGE_TOL)
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise NumericError(
            f"entry ({i},{j})={vals[i, j]!r} outside [0,1]; RBF transform "
            f"requires a normalized kernel")
    clipped = np.clip(vals, 0.0, 1.0)
    out = np.exp(-(1.0 - clipped) / (2.0 * sigma * sigma))
    return GramMatrix(values=out, row_ids=k_hat.row_ids, col_ids=k_hat.col_ids,
                      spec=replace(k_hat.spec, sigma=sigma),
                      symmetric=k_hat.symmetric)


def ivector_gram(rows: Sequence[FeatureVector], cols: Sequence[FeatureVector],
                 sigma: float) -> GramMatrix:
    """RBF kernel over L2-normalized feature vectors.

    Entry (i, j) is exp(-d / (2 sigma^2)) with d the Euclidean distance
    between the unit-normalized vectors, so the kernel is invariant to
    positive rescaling of any input vector.
    """
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if not rows or not cols:
        raise DataError("empty vector list")

    def _unit_matrix(vecs: Sequence[FeatureVector]) -> np.ndarray:
        dims = {v.values.size for v in vecs}
        if len(dims) != 1:
            raise DataError(f"mixed vector dimensions: {sorted(dims)}")
        mat = np.stack([v.values for v in vecs]).astype(np.float64)
        norms = np.linalg.norm(mat, axis=1)
        zero = np.nonzero(norms == 0.0)[0]
        if zero.size:
            raise DataError(
                f"zero vector for id {vecs[int(zero[0])].id!r}: "
                f"L2 normalization undefined")
        return mat / norms[:, None]

    row_ids = tuple(v.id for v in rows)
    col_ids = tuple(v.id for v in cols)
    xr = _unit_matrix(rows)
    symmetric = row_ids == col_ids
    if symmetric:
        xc = xr
    else:
        xc = _unit_matrix(cols)
        if xr.shape[1] != xc.shape[1]:
            raise DataError(
                f"row/col vector dimensions differ: {xr.shape[1]} vs {xc.shape[1]}")

    inner = xr @ xc.T
    if symmetric:
        inner = (inner + inner.T) / 2.0
    dist_sq = np.clip(2.0 - 2.0 * inner, 0.0, None)
    if symmetric:
        np.fill_diagonal(dist_sq, 0.0)
    out = np.exp(-np.sqrt(dist_sq) / (2.0 * sigma * sigma))
    spec = KernelSpec(kind="ivector_rbf", modality="audio", sigma=sigma)
    return GramMatrix(values=out, row_ids=row_ids, col_ids=col_ids, spec=spec,
                      symmetric=symmetric)


def squared_kernel(k_train: GramMatrix,
                   k_eval: GramMatrix | None = None):
    """Dot products of row-similarity feature vectors against the train set.

    The train block becomes K K^T (positive semidefinite by construction);
    an eval block, whose columns must align with the train rows, becomes
    K_eval K_train^T. Feature vectors are always similarity rows against
    the training samples only.
    """
    if not k_train.symmetric:
        raise DataError("squared kernel needs a square symmetric train Gram")
    sq = k_train.values @ k_train.values.T
    sq = (sq + sq.T) / 2.0
    out_spec = (replace(k_train.spec, squared=True)
                if k_train.spec is not None else None)
    out_train = GramMatrix(values=sq, row_ids=k_train.row_ids,
                           col_ids=k_train.col_ids, spec=out_spec,
                           symmetric=True)
    if k_eval is None:
        return out_train, None
    if k_eval.col_ids != k_train.row_ids:
        raise DataError("eval block columns do not align with train rows")
    out_eval = GramMatrix(values=k_eval.values @ k_train.values.T,
                          row_ids=k_eval.row_ids, col_ids=k_eval.col_ids,
                          spec=out_spec, symmetric=False)
    return out_train, out_eval


def sum_kernels(parts: Sequence[GramMatrix]) -> GramMatrix:
    """Entrywise sum of aligned Gram matrices (feature concatenation)."""
    if not parts:
        raise DataError("sum_kernels needs at least one Gram matrix")
    first = parts[0]
    for idx, part in enumerate(parts[1:], start=1):
        if part.shape != first.shape:
            raise DataError(
                f"Gram parts 0 and {idx} have different shapes: "
                f"{first.shape} vs {part.shape}")
        if part.row_ids != first.row_ids or part.col_ids != first.col_ids:
            raise DataError(f"Gram parts 0 and {idx} have misaligned ids")
    if len(parts) == 1:
        return first
    total = np.zeros(first.shape, dtype=np.float64)
    for part in parts:
        total += part.values
    spec = None
    if all(p.spec is not None for p in parts):
        spec = KernelSpec(kind="sum", parts=tuple(p.spec for p in parts))
    return GramMatrix(values=total, row_ids=first.row_ids,
                      col_ids=first.col_ids, spec=spec,
                      symmetric=all(p.symmetric for p in parts))


class PsdResult(NamedTuple):
    lambda_min: float
    threshold: float
    passed: bool


def psd_check(k: GramMatrix, tol: float = 1e-9) -> PsdResult:
    """Smallest eigenvalue of the symmetrized matrix.

    Passes when lambda_min >= -tol * trace(K).
    """
    vals = k.values
    if vals.shape[0] != vals.shape[1]:
        raise DataError(f"psd_check needs a square matrix, got {vals.shape}")
    sym = (vals + vals.T) / 2.0
    try:
        eigs = np.linalg.eigvalsh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue computation failed: {exc}") from exc
    lam = float(eigs[0])
    threshold = -tol * float(np.trace(sym))
    return PsdResult(lambda_min=lam, threshold=threshold, passed=lam >= threshold)


def save_gram(k: GramMatrix, path) -> None:
    """Lossless binary round-trip of values, ids, spec, and symmetry flag."""
    meta = {
        "spec": None if k.spec is None else k.spec.to_dict(),
        "row_ids": list(k.row_ids),
        "col_ids": list(k.col_ids),
        "symmetric": k.symmetric,
    }
    write_envelope(path, "gram", meta, {"values": k.values})


def load_gram(path) -> GramMatrix:
    _, meta, arrays = read_envelope(path, expected_kind="gram")
    spec = None if meta["spec"] is None else KernelSpec.from_dict(meta["spec"])
    return GramMatrix(values=arrays["values"],
                      row_ids=tuple(meta["row_ids"]),
                      col_ids=tuple(meta["col_ids"]),
                      spec=spec,
                      symmetric=bool(meta["symmetric"]))
