"""Kernel classifiers over precomputed Gram matrices.

Kernel ridge regression is trained one-vs-all: per class c the dual weights
solve (K + lambda I) alpha_c = y_c with y_c in {+1, -1}. Kernel discriminant
analysis solves the kernelized Fisher criterion M a = lambda N a, where M is
the between-class scatter of per-class kernel-column means and N is the
within-class scatter (class-centered kernel columns) plus a mu ridge; eval
samples are projected onto the leading discriminants and assigned to the
nearest class centroid. Ties always break toward the lowest class index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .envelope import read_envelope, write_envelope
from .errors import DataError, NumericError
from .kernelops import GramMatrix

DEFAULT_LAMBDA = 1.0
AUTO_MU_FACTOR = 1e-3


@dataclass(frozen=True)
class TrainedModel:
    """Fitted kernel classifier: dual weights (krr) or discriminant
    projections plus class centroids (kda)."""

    method: str
    classes: tuple[str, ...]
    train_ids: tuple[str, ...]
    hyperparams: dict
    alphas: Optional[np.ndarray] = None       # (n_train, n_classes)
    projection: Optional[np.ndarray] = None   # (n_train, n_dims)
    centroids: Optional[np.ndarray] = None    # (n_classes, n_dims)

    def __post_init__(self):
        n = len(self.train_ids)
        if self.method == "krr":
            if self.alphas is None or self.projection is not None:
                raise DataError("krr model must carry dual weights only")
            if self.alphas.shape != (n, len(self.classes)):
                raise DataError("dual weight shape does not match model")
        elif self.method == "kda":
            if self.projection is None or self.centroids is None \
                    or self.alphas is not None:
                raise DataError("kda model must carry projection and centroids")
            if self.projection.shape[0] != n:
                raise DataError("projection row count does not match train ids")
            if self.centroids.shape != (len(self.classes),
                                        self.projection.shape[1]):
                raise DataError("centroid shape does not match model")
        else:
            raise DataError(f"unknown method {self.method!r}")


def _check_train_inputs(k: GramMatrix, labels: Sequence[str],
                        classes: Optional[Sequence[str]]):
    if not k.symmetric:
        raise DataError("training needs a square symmetric Gram matrix")
    n = k.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 training samples, got {n}")
    labels = list(labels)
    if len(labels) != n:
        raise DataError(f"{len(labels)} labels for {n} samples")
    present = set(labels)
    if len(present) < 2:
        raise DataError("training labels contain a single class")
    if classes is None:
        classes = sorted(present)
    else:
        classes = list(classes)
        missing = present.difference(classes)
        if missing:
            raise DataError(f"labels {sorted(missing)} not in class list")
    return labels, tuple(classes)


def _check_eval_gram(model: TrainedModel, k_eval: GramMatrix):
    if k_eval.col_ids != model.train_ids:
        raise DataError("eval Gram columns do not align with the model's "
                        "training samples")


def krr_train(k: GramMatrix, labels: Sequence[str],
              lam: float = DEFAULT_LAMBDA,
              classes: Optional[Sequence[str]] = None) -> TrainedModel:
    """One-vs-all kernel ridge regression on a train Gram matrix."""
    labels, classes = _check_train_inputs(k, labels, classes)
    if lam < 0:
        raise DataError(f"lambda must be >= 0, got {lam}")
    n = k.shape[0]
    targets = np.full((n, len(classes)), -1.0)
    class_index = {c: i for i, c in enumerate(classes)}
    for i, lab in enumerate(labels):
        targets[i, class_index[lab]] = 1.0
    system = k.values + lam * np.eye(n)
    try:
        factor = scipy.linalg.cho_factor(system)
        alphas = scipy.linalg.cho_solve(factor, targets)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(
            f"ridge system is singular (lambda={lam}): {exc}") from exc
    return TrainedModel(method="krr", classes=classes, train_ids=k.row_ids,
                        hyperparams={"lambda": float(lam)}, alphas=alphas)


def kda_train(k: GramMatrix, labels: Sequence[str],
              mu: Optional[float] = None,
              classes: Optional[Sequence[str]] = None) -> TrainedModel:
    """Kernel discriminant analysis on a train Gram matrix.

    `mu=None` picks the regularizer as AUTO_MU_FACTOR * trace(N) / n, with a
    small trace-of-K fallback when the within-class scatter is exactly zero
    (for example when every class has a single sample).
    """
    labels, classes = _check_train_inputs(k, labels, classes)
    if mu is not None and not mu > 0:
        raise DataError(f"mu must be positive, got {mu}")
    kv = k.values
    n = kv.shape[0]
    label_idx = np.array([classes.index(lab) for lab in labels])
    counts = np.bincount(label_idx, minlength=len(classes)).astype(np.float64)

    class_means = np.zeros((n, len(classes)))
    for ci in range(len(classes)):
        members = label_idx == ci
        if counts[ci]:
            class_means[:, ci] = kv[:, members].mean(axis=1)
    global_mean = kv.mean(axis=1)

    deltas = class_means - global_mean[:, None]
    between = (deltas * counts) @ deltas.T
    between = (between + between.T) / 2.0

    centered = kv - class_means[:, label_idx]
    within = centered @ centered.T
    within = (within + within.T) / 2.0

    if mu is None:
        mu = AUTO_MU_FACTOR * float(np.trace(within)) / n
        if mu <= 0:
            mu = 1e-6 * max(1.0, float(np.trace(kv)) / n)
    within[np.diag_indices_from(within)] += mu

    try:
        eigvals, eigvecs = scipy.linalg.eigh(between, within)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"discriminant eigensolve failed: {exc}") from exc

    n_dims = len(classes) - 1
    projection = eigvecs[:, ::-1][:, :n_dims]
    embedded = kv @ projection
    centroids = np.zeros((len(classes), n_dims))
    for ci in range(len(classes)):
        members = label_idx == ci
        if counts[ci]:
            centroids[ci] = embedded[members].mean(axis=0)
    return TrainedModel(method="kda", classes=classes, train_ids=k.row_ids,
                        hyperparams={"mu": float(mu)}, projection=projection,
                        centroids=centroids)


def decision_values(model: TrainedModel, k_eval: GramMatrix) -> np.ndarray:
    """Per-class decision scores, one row per eval sample.

    krr: dual scores K_eval alpha_c. kda: negated squared Euclidean distance
    to each class centroid in the discriminant space. In both cases the
    prediction is the argmax, first index winning ties.
    """
    _check_eval_gram(model, k_eval)
    if model.method == "krr":
        return k_eval.values @ model.alphas
    embedded = k_eval.values @ model.projection
    diffs = embedded[:, None, :] - model.centroids[None, :, :]
    return -np.sum(diffs * diffs, axis=2)


def predict(model: TrainedModel, k_eval: GramMatrix) -> list[str]:
    scores = decision_values(model, k_eval)
    return [model.classes[i] for i in np.argmax(scores, axis=1)]


def krr_predict(model: TrainedModel, k_eval: GramMatrix) -> list[str]:
    if model.method != "krr":
        raise DataError(f"expected a krr model, got {model.method!r}")
    return predict(model, k_eval)


def kda_predict(model: TrainedModel, k_eval: GramMatrix) -> list[str]:
    if model.method != "kda":
        raise DataError(f"expected a kda model, got {model.method!r}")
    return predict(model, k_eval)


def save_model(model: TrainedModel, path) -> None:
    meta = {
        "method": model.method,
        "classes": list(model.classes),
        "train_ids": list(model.train_ids),
        "hyperparams": model.hyperparams,
    }
    arrays = {}
    if model.method == "krr":
        arrays["alphas"] = model.alphas
    else:
        arrays["projection"] = model.projection
        arrays["centroids"] = model.centroids
    write_envelope(path, "model", meta, arrays)


def load_model(path) -> TrainedModel:
    _, meta, arrays = read_envelope(path, expected_kind="model")
    return TrainedModel(method=meta["method"],
                        classes=tuple(meta["classes"]),
                        train_ids=tuple(meta["train_ids"]),
                        hyperparams=dict(meta["hyperparams"]),
                        alphas=arrays.get("alphas"),
                        projection=arrays.get("projection"),
                        centroids=arrays.get("centroids"))
