"""Command-line interface.

Exit codes: 0 success, 2 configuration errors, 3 data errors, 4 numeric
errors. Unexpected exceptions propagate with a traceback.
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .config import load_config, parse_kernel_term, render_kernel_term
from .corpus import generate_synthetic_corpus, load_corpus, write_corpus
from .errors import ConfigError, DataError, NlikitError, NumericError
from .experiment import (materialize_term, run_experiment,
                         sweep as run_sweep, tune_sigma as run_tune)
from .kernelops import load_gram, psd_check, save_gram
from .metrics import render_report

EXIT_CODES = {ConfigError: 2, DataError: 3, NumericError: 4}


def _exit_code(exc: NlikitError) -> int:
    for klass, code in EXIT_CODES.items():
        if isinstance(exc, klass):
            return code
    return 1


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NlikitError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_exit_code(exc))
    return wrapper


def _parse_splits(text: str, option: str) -> tuple[str, ...]:
    parts = tuple(s.strip() for s in text.split(",") if s.strip())
    if not parts:
        raise ConfigError(f"--{option} names no splits")
    return parts


@click.group()
@click.version_option(version=__version__, prog_name="nlikit")
@click.option("--verbose", is_flag=True, help="Log cache and progress info.")
def main(verbose: bool) -> None:
    """Multi-kernel native-language identification toolkit."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path),
              default=None, help="Directory for predictions and report.")
@handle_errors
def run(config_path: Path, out_dir: Path | None) -> None:
    """Run one experiment from a config file."""
    config = load_config(config_path)
    result = run_experiment(config, out_dir=out_dir)
    click.echo(render_report(result.report), nl=False)
    click.echo(f"cache: {result.cache.hits} hit(s), "
               f"{result.cache.misses} miss(es)")
    if out_dir is not None:
        click.echo(f"wrote {Path(out_dir) / 'predictions.tsv'}")


@main.command(name="sweep")
@click.argument("config_paths", nargs=-1, required=True,
                type=click.Path(path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path),
              default=None, help="Directory for the ranking table.")
@handle_errors
def sweep_cmd(config_paths: tuple[Path, ...], out_dir: Path | None) -> None:
    """Rank several configs with McNemar significance groups."""
    configs = [load_config(p) for p in config_paths]
    result = run_sweep(configs, out_dir=out_dir)
    click.echo("rank  group  accuracy  macro_f1  config")
    for e in result.entries:
        click.echo(f"{e.rank:>4}  {e.group:>5}  "
                   f"{e.result.report.accuracy:>8.4f}  "
                   f"{e.result.report.macro_f1:>8.4f}  {e.label}")


@main.command(name="tune-sigma")
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--sigmas", required=True,
              help="Comma-separated sigma candidates, e.g. 0.25,0.5,1.0.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path),
              default=None, help="Directory for the per-sigma table.")
@handle_errors
def tune_sigma_cmd(config_path: Path, sigmas: str,
                   out_dir: Path | None) -> None:
    """Grid-search the RBF bandwidth shared by all sigma-bearing terms."""
    config = load_config(config_path)
    try:
        grid = [float(s) for s in sigmas.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad --sigmas value {sigmas!r}") from None
    result = run_tune(config, grid, out_dir=out_dir)
    click.echo("sigma  accuracy  macro_f1")
    for e in result.entries:
        mark = "  <- best" if e.sigma == result.best_sigma else ""
        click.echo(f"{e.sigma:<5g}  {e.result.report.accuracy:>8.4f}  "
                   f"{e.result.report.macro_f1:>8.4f}{mark}")
    click.echo(f"best sigma: {result.best_sigma:g}")


@main.group()
def gram() -> None:
    """Build and inspect Gram matrix files."""


@gram.command(name="build")
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(path_type=Path), help="Corpus manifest.")
@click.option("--kernel", "kernel_term", required=True,
              help="One kernel term, e.g. 'presence:essay:5-9'.")
@click.option("--rows", default="train", show_default=True,
              help="Comma-separated splits for the rows.")
@click.option("--cols", default="train", show_default=True,
              help="Comma-separated splits for the columns.")
@click.option("--out", "out_path", required=True,
              type=click.Path(path_type=Path), help="Output gram file.")
@click.option("--lowercase", is_flag=True, help="Case-fold texts on load.")
@handle_errors
def gram_build(manifest_path: Path, kernel_term: str, rows: str, cols: str,
               out_path: Path, lowercase: bool) -> None:
    """Compute one kernel term between two split selections."""
    spec = parse_kernel_term(kernel_term)
    corpus = load_corpus(manifest_path, lowercase=lowercase)
    row_ids = tuple(r.id for r in
                    corpus.split_samples(_parse_splits(rows, "rows")))
    col_ids = tuple(r.id for r in
                    corpus.split_samples(_parse_splits(cols, "cols")))
    if not row_ids or not col_ids:
        raise DataError("row or column split selection is empty")
    # column samples play the training-set role, which matters for
    # squared kernels whose features are similarities against them
    k_cols, k_block = materialize_term(corpus, spec, col_ids, row_ids,
                                       cache_dir=None)
    out = k_cols if row_ids == col_ids else k_block
    save_gram(out, out_path)
    click.echo(f"wrote {out_path}: {out.shape[0]} x {out.shape[1]} "
               f"{render_kernel_term(out.spec)}")


@gram.command(name="check")
@click.argument("gram_path", type=click.Path(path_type=Path))
@click.option("--tol", default=1e-9, show_default=True,
              help="PSD tolerance relative to the trace.")
@handle_errors
def gram_check(gram_path: Path, tol: float) -> None:
    """Verify a gram file's checksum and positive semidefiniteness."""
    k = load_gram(gram_path)
    if k.spec is None:
        click.echo("kernel: (unspecified)")
    elif k.spec.kind == "sum":
        click.echo("kernel: sum")
    else:
        click.echo(f"kernel: {render_kernel_term(k.spec)}")
    click.echo(f"shape: {k.shape[0]} x {k.shape[1]}")
    click.echo(f"symmetric: {k.symmetric}")
    if k.shape[0] != k.shape[1]:
        click.echo("psd: skipped (matrix is not square)")
        return
    res = psd_check(k, tol=tol)
    click.echo(f"lambda_min: {res.lambda_min:.6e} "
               f"(threshold {res.threshold:.6e})")
    if not res.passed:
        raise NumericError(
            f"{gram_path}: smallest eigenvalue {res.lambda_min:.6e} is "
            f"below the PSD threshold {res.threshold:.6e}")
    click.echo("psd: ok")


@main.group()
def corpus() -> None:
    """Create and validate corpora."""


@corpus.command(name="synth")
@click.option("--out", "out_dir", required=True,
              type=click.Path(path_type=Path), help="Output directory.")
@click.option("--classes", "num_classes", default=5, show_default=True)
@click.option("--docs", "docs_per_class", default=50, show_default=True)
@click.option("--doc-length", default=500, show_default=True)
@click.option("--vector-dim", default=16, show_default=True)
@click.option("--seed", default=0, show_default=True)
@handle_errors
def corpus_synth(out_dir: Path, num_classes: int, docs_per_class: int,
                 doc_length: int, vector_dim: int, seed: int) -> None:
    """Generate a deterministic synthetic multi-modal corpus."""
    made = generate_synthetic_corpus(num_classes=num_classes,
                                     docs_per_class=docs_per_class,
                                     doc_length=doc_length,
                                     vector_dim=vector_dim, seed=seed)
    manifest = write_corpus(made, out_dir)
    click.echo(f"wrote {manifest}")
    click.echo(f"samples: {len(made.samples)}  classes: {len(made.classes)}")


@corpus.command(name="validate")
@click.argument("manifest_path", type=click.Path(path_type=Path))
@click.option("--lowercase", is_flag=True, help="Case-fold texts on load.")
@handle_errors
def corpus_validate(manifest_path: Path, lowercase: bool) -> None:
    """Load a corpus, run all integrity checks, and print a summary."""
    loaded = load_corpus(manifest_path, lowercase=lowercase)
    click.echo(f"checksum: {loaded.checksum}")
    click.echo(f"classes: {len(loaded.classes)} "
               f"({', '.join(loaded.classes)})")
    click.echo(f"samples: {len(loaded.samples)}")
    for split in ("train", "dev", "test"):
        click.echo(f"  {split}: {len(loaded.split_samples(split))}")
    click.echo(f"text modalities: {', '.join(loaded.modalities) or 'none'}")
    dim = loaded.vector_dim
    click.echo(f"vectors: {'none' if dim is None else f'{dim}-dimensional'}")
    click.echo("ok")


if __name__ == "__main__":
    main()
