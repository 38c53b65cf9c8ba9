"""Declarative experiment runner.

An experiment loads a corpus, materializes one Gram matrix per kernel term
for the train block and the eval block, sums them, fits a classifier, and
scores the eval split. Expensive base Grams (blended string kernels and the
vector RBF kernel) are cached on disk keyed by corpus checksum, kernel
parameters, and the exact sample id lists; RBF transforms, squaring, and
summation are cheap and always derived on the fly.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .classifiers import TrainedModel, kda_train, krr_train, predict
from .config import ExperimentConfig, render_kernel_expression
from .corpus import Corpus, load_corpus
from .errors import ConfigError, DataError
from .kernelops import (GramMatrix, KernelSpec, STRING_KINDS, ivector_gram,
                        load_gram, rbf_transform, save_gram, squared_kernel,
                        sum_kernels)
from .metrics import EvalReport, evaluate, export_confusion, mcnemar, \
    write_report
from .stringkernel import blended_gram

logger = logging.getLogger(__name__)

CACHE_ENV = "NLIKIT_CACHE_DIR"
SWEEP_ALPHA = 0.05


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    eval_ids: tuple[str, ...]
    gold: tuple[str, ...]
    predictions: tuple[str, ...]
    report: EvalReport
    model: TrainedModel
    cache: CacheStats


def resolve_cache_dir(config: ExperimentConfig) -> Optional[Path]:
    """Environment override beats the config; None disables caching."""
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return config.cache_dir


def base_spec(spec: KernelSpec) -> KernelSpec:
    """The cacheable ancestor of a kernel term.

    String-kernel RBF and squaring are entrywise-cheap, so only the
    normalized blended Gram is cached; the vector kernel bakes sigma into
    the expensive computation, so only squaring is stripped there.
    """
    if spec.kind in STRING_KINDS:
        return replace(spec, sigma=None, squared=False)
    return replace(spec, squared=False)


def cache_key(corpus_checksum: str, spec: KernelSpec,
              row_ids: Sequence[str], col_ids: Sequence[str]) -> str:
    payload = json.dumps({
        "corpus": corpus_checksum,
        "spec": spec.to_dict(),
        "row_ids": list(row_ids),
        "col_ids": list(col_ids),
    }, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _compute_base(corpus: Corpus, spec: KernelSpec,
                  row_ids: tuple[str, ...],
                  col_ids: tuple[str, ...]) -> GramMatrix:
    if spec.kind in STRING_KINDS:
        rows = corpus.documents_for(spec.modality, row_ids)
        cols = corpus.documents_for(spec.modality, col_ids)
        return blended_gram(rows, cols, kind=spec.kind,
                            p_min=spec.p_min, p_max=spec.p_max)
    rows = corpus.vectors_for(row_ids)
    cols = corpus.vectors_for(col_ids)
    return ivector_gram(rows, cols, sigma=spec.sigma)


def base_gram(corpus: Corpus, spec: KernelSpec, row_ids: tuple[str, ...],
              col_ids: tuple[str, ...], cache_dir: Optional[Path],
              stats: Optional[CacheStats] = None) -> GramMatrix:
    """Compute one base Gram block, going through the cache when enabled."""
    spec = base_spec(spec)
    if cache_dir is None:
        return _compute_base(corpus, spec, row_ids, col_ids)
    key = cache_key(corpus.checksum, spec, row_ids, col_ids)
    path = Path(cache_dir) / f"{key}.gram"
    if path.is_file():
        gram = load_gram(path)
        if (gram.spec != spec or gram.row_ids != row_ids
                or gram.col_ids != col_ids):
            raise DataError(
                f"gram cache entry {path} does not match the requested "
                f"computation; delete it and rerun")
        if stats is not None:
            stats.hits += 1
        logger.info("gram cache hit: %s", path.name)
        return gram
    gram = _compute_base(corpus, spec, row_ids, col_ids)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_gram(gram, path)
    if stats is not None:
        stats.misses += 1
    logger.info("gram cache miss, stored: %s", path.name)
    return gram


def materialize_term(corpus: Corpus, spec: KernelSpec,
                     train_ids: tuple[str, ...], eval_ids: tuple[str, ...],
                     cache_dir: Optional[Path],
                     stats: Optional[CacheStats] = None):
    """Train and eval Gram blocks for one kernel term.

    The eval block always has the training samples as columns; squared
    kernels compare row-similarity vectors computed against the train set.
    """
    k_train = base_gram(corpus, spec, train_ids, train_ids, cache_dir, stats)
    k_eval = base_gram(corpus, spec, eval_ids, train_ids, cache_dir, stats)
    if spec.kind in STRING_KINDS and spec.sigma is not None:
        k_train = rbf_transform(k_train, spec.sigma)
        k_eval = rbf_transform(k_eval, spec.sigma)
    if spec.squared:
        k_train, k_eval = squared_kernel(k_train, k_eval)
    return k_train, k_eval


def _check_corpus_supports(corpus: Corpus, config: ExperimentConfig) -> None:
    for spec in config.kernels:
        if spec.kind in STRING_KINDS:
            if spec.modality not in corpus.documents:
                raise DataError(
                    f"config needs {spec.modality!r} texts but the corpus "
                    f"has none")
        elif not corpus.vectors:
            raise DataError(
                "config needs feature vectors but the corpus has none")


def run_experiment(config: ExperimentConfig,
                   out_dir: Optional[Path] = None,
                   corpus: Optional[Corpus] = None) -> ExperimentResult:
    """Run one train/eval cycle and optionally write its artifacts.

    Passing a preloaded `corpus` skips reloading; the caller must have
    loaded it from the config's manifest with the config's lowercase flag.
    """
    if corpus is None:
        corpus = load_corpus(config.manifest, lowercase=config.lowercase)
    _check_corpus_supports(corpus, config)

    train_refs = corpus.split_samples(config.train_on)
    eval_refs = corpus.split_samples(config.eval_on)
    if not train_refs:
        raise DataError(f"no samples in train split(s) {config.train_on}")
    if not eval_refs:
        raise DataError(f"no samples in eval split {config.eval_on!r}")
    train_ids = tuple(r.id for r in train_refs)
    eval_ids = tuple(r.id for r in eval_refs)
    train_labels = [r.label for r in train_refs]
    gold = tuple(r.label for r in eval_refs)

    stats = CacheStats()
    cache_dir = resolve_cache_dir(config)
    parts_train = []
    parts_eval = []
    for spec in config.kernels:
        k_train, k_eval = materialize_term(corpus, spec, train_ids, eval_ids,
                                           cache_dir, stats)
        parts_train.append(k_train)
        parts_eval.append(k_eval)
    k_train = sum_kernels(parts_train)
    k_eval = sum_kernels(parts_eval)

    if config.classifier == "krr":
        model = krr_train(k_train, train_labels, lam=config.lam,
                          classes=corpus.classes)
    else:
        model = kda_train(k_train, train_labels, mu=config.mu,
                          classes=corpus.classes)
    predictions = predict(model, k_eval)
    report = evaluate(predictions, gold, classes=corpus.classes)
    result = ExperimentResult(config=config, eval_ids=eval_ids, gold=gold,
                              predictions=predictions, report=report,
                              model=model, cache=stats)
    if out_dir is not None:
        write_artifacts(result, out_dir)
    return result


def write_predictions(result: ExperimentResult, path: Path) -> None:
    lines = ["id\tgold\tpred"]
    for sid, g, p in zip(result.eval_ids, result.gold, result.predictions):
        lines.append(f"{sid}\t{g}\t{p}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_artifacts(result: ExperimentResult, out_dir: Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_predictions(result, out_dir / "predictions.tsv")
    write_report(result.report, out_dir / "report.txt")
    export_confusion(result.report, out_dir / "confusion.csv")


@dataclass(frozen=True)
class SweepEntry:
    rank: int
    group: int
    label: str
    result: ExperimentResult
    p_vs_group_top: Optional[float]


@dataclass(frozen=True)
class SweepResult:
    entries: tuple[SweepEntry, ...]

    @property
    def best(self) -> ExperimentResult:
        return self.entries[0].result


def _config_label(config: ExperimentConfig) -> str:
    return f"{config.classifier} | {render_kernel_expression(config.kernels)}"


def sweep(configs: Sequence[ExperimentConfig],
          out_dir: Optional[Path] = None) -> SweepResult:
    """Run several configurations and rank them with significance groups.

    All configurations must evaluate the same samples of the same corpus.
    Results are sorted by descending macro F1 and walked top to bottom: a
    new group starts whenever the exact McNemar comparison against the
    current group's top entry is significant at the 0.05 level.
    """
    if not configs:
        raise ConfigError("sweep needs at least one configuration")
    first = configs[0]
    for other in configs[1:]:
        if other.manifest != first.manifest:
            raise ConfigError("sweep configurations use different corpora")
        if other.lowercase != first.lowercase:
            raise ConfigError(
                "sweep configurations disagree on lowercasing, so their "
                "eval texts would differ")
        if other.eval_on != first.eval_on:
            raise ConfigError("sweep configurations use different eval splits")
    corpus = load_corpus(first.manifest, lowercase=first.lowercase)
    results = [run_experiment(c, corpus=corpus) for c in configs]

    order = sorted(range(len(results)),
                   key=lambda i: (-results[i].report.macro_f1, i))
    entries: list[SweepEntry] = []
    group = 0
    group_top: Optional[ExperimentResult] = None
    for rank, idx in enumerate(order, start=1):
        res = results[idx]
        p_value: Optional[float] = None
        if group_top is None:
            group = 1
            group_top = res
        else:
            test = mcnemar(list(res.predictions), list(group_top.predictions),
                           list(res.gold), alpha=SWEEP_ALPHA)
            if test.significant:
                group += 1
                group_top = res
            else:
                p_value = test.p_value
        entries.append(SweepEntry(rank=rank, group=group,
                                  label=_config_label(results[idx].config),
                                  result=res, p_vs_group_top=p_value))
    out = SweepResult(entries=tuple(entries))
    if out_dir is not None:
        write_sweep(out, Path(out_dir))
    return out


def write_sweep(result: SweepResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["rank\tgroup\taccuracy\tmacro_f1\tp_vs_group_top\tconfig"]
    for e in result.entries:
        p_text = "" if e.p_vs_group_top is None else f"{e.p_vs_group_top:.6f}"
        lines.append(f"{e.rank}\t{e.group}\t{e.result.report.accuracy:.6f}\t"
                     f"{e.result.report.macro_f1:.6f}\t{p_text}\t{e.label}")
    (out_dir / "sweep.tsv").write_text("\n".join(lines) + "\n",
                                       encoding="utf-8")


@dataclass(frozen=True)
class TuneEntry:
    sigma: float
    result: ExperimentResult


@dataclass(frozen=True)
class TuneResult:
    best_sigma: float
    entries: tuple[TuneEntry, ...]

    @property
    def best(self) -> ExperimentResult:
        for entry in self.entries:
            if entry.sigma == self.best_sigma:
                return entry.result
        raise AssertionError("best sigma missing from tune entries")


def tune_sigma(config: ExperimentConfig, sigmas: Sequence[float],
               out_dir: Optional[Path] = None) -> TuneResult:
    """Grid-search a shared bandwidth over every sigma-bearing kernel term.

    Each candidate overrides sigma in all RBF terms at once and is scored
    by macro F1 on the config's eval split; ties go to the smallest sigma.
    """
    if not sigmas:
        raise ConfigError("tune needs at least one sigma candidate")
    for s in sigmas:
        if not s > 0:
            raise ConfigError(f"sigma candidates must be positive, got {s}")
    if len(set(sigmas)) != len(sigmas):
        raise ConfigError("duplicate sigma candidates")
    if not any(spec.sigma is not None for spec in config.kernels):
        raise ConfigError(
            "no kernel term takes a sigma; nothing to tune")

    corpus = load_corpus(config.manifest, lowercase=config.lowercase)
    entries = []
    for sigma in sorted(sigmas):
        kernels = tuple(
            replace(spec, sigma=sigma) if spec.sigma is not None else spec
            for spec in config.kernels)
        candidate = replace(config, kernels=kernels)
        entries.append(TuneEntry(sigma=sigma,
                                 result=run_experiment(candidate,
                                                       corpus=corpus)))
    best = max(entries, key=lambda e: e.result.report.macro_f1)
    # entries are sorted ascending, so max() already favors the smallest
    # sigma among exact ties
    out = TuneResult(best_sigma=best.sigma, entries=tuple(entries))
    if out_dir is not None:
        write_tune(out, Path(out_dir))
    return out


def write_tune(result: TuneResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["sigma\taccuracy\tmacro_f1\tbest"]
    for e in result.entries:
        mark = "*" if e.sigma == result.best_sigma else ""
        lines.append(f"{e.sigma:g}\t{e.result.report.accuracy:.6f}\t"
                     f"{e.result.report.macro_f1:.6f}\t{mark}")
    (out_dir / "tune.tsv").write_text("\n".join(lines) + "\n",
                                      encoding="utf-8")
