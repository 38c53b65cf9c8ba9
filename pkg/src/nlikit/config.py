"""Experiment configuration files and the kernel-expression grammar.

A config is a flat key-value file (paths relative to the config file):

    corpus = corpus/manifest.txt
    track = fusion
    kernels = presence:essay:5-9 + presence:transcript:5-7 + ivec:0.5
    classifier = kda
    train_on = train,dev
    eval_on = test
    cache_dir = gramcache
    seed = 0
    lowercase = false

Kernel expressions are sums of terms:

    term      := strkernel | rbfterm | ivecterm
    strkernel := ("presence" | "intersection") ":" modality ":" prange
    rbfterm   := ("rbf" | "rbf2") "(" strkernel ["," sigma] ")"
    ivecterm  := ("ivec" | "ivec2") [":" sigma]
    modality  := "essay" | "transcript"
    prange    := INT | INT "-" INT

A bare string-kernel term is the normalized blended kernel; rbf(...) applies
the RBF transform on top of it and rbf2(...) additionally squares it via
row-similarity dot products; ivec is the RBF kernel over L2-normalized
feature vectors, ivec2 its squared version.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .corpus import SPLITS
from .errors import ConfigError, DataError
from .kernelops import KernelSpec
from .kvfile import read_keyvalue

TRACKS = ("essay", "speech", "fusion")
TRACK_MODALITIES = {
    "essay": {"essay"},
    "speech": {"transcript", "audio"},
    "fusion": {"essay", "transcript", "audio"},
}
CLASSIFIERS = ("krr", "kda")

DEFAULT_STRING_SIGMA = 1.0
DEFAULT_IVEC_SIGMA = 0.5

_STR_TERM = re.compile(
    r"^(presence|intersection):(essay|transcript):(\d+)(?:-(\d+))?$")
_RBF_TERM = re.compile(r"^(rbf2?)\(([^,()]+)(?:,([^,()]+))?\)$")
_IVEC_TERM = re.compile(r"^(ivec2?)(?::([^:]+))?$")


def _parse_sigma(text: str, term: str) -> float:
    try:
        sigma = float(text)
    except ValueError:
        raise ConfigError(f"bad sigma {text!r} in kernel term {term!r}") from None
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive in kernel term {term!r}")
    return sigma


def _parse_string_term(text: str, term: str) -> KernelSpec:
    match = _STR_TERM.match(text)
    if not match:
        raise ConfigError(f"bad kernel term {term!r}")
    kind, modality, lo, hi = match.groups()
    p_min = int(lo)
    p_max = int(hi) if hi is not None else p_min
    if not (1 <= p_min <= p_max):
        raise ConfigError(f"bad p-gram range in kernel term {term!r}")
    return KernelSpec(kind=kind, modality=modality, p_min=p_min, p_max=p_max)


def parse_kernel_term(term: str) -> KernelSpec:
    text = "".join(term.split())
    if not text:
        raise ConfigError("empty kernel term")
    match = _IVEC_TERM.match(text)
    if match:
        head, sigma_text = match.groups()
        sigma = (_parse_sigma(sigma_text, term) if sigma_text
                 else DEFAULT_IVEC_SIGMA)
        return KernelSpec(kind="ivector_rbf", modality="audio", sigma=sigma,
                          squared=head.endswith("2"))
    match = _RBF_TERM.match(text)
    if match:
        head, inner, sigma_text = match.groups()
        base = _parse_string_term(inner, term)
        sigma = (_parse_sigma(sigma_text, term) if sigma_text
                 else DEFAULT_STRING_SIGMA)
        return replace(base, sigma=sigma, squared=head.endswith("2"))
    return _parse_string_term(text, term)


def parse_kernel_expression(expr: str) -> tuple[KernelSpec, ...]:
    terms = [t.strip() for t in expr.split("+")]
    if not expr.strip() or any(not t for t in terms):
        raise ConfigError(f"bad kernel expression {expr!r}")
    return tuple(parse_kernel_term(t) for t in terms)


def render_kernel_term(spec: KernelSpec) -> str:
    if spec.kind == "ivector_rbf":
        head = "ivec2" if spec.squared else "ivec"
        return f"{head}:{spec.sigma:g}"
    base = f"{spec.kind}:{spec.modality}:{spec.p_min}-{spec.p_max}"
    if spec.sigma is None:
        return base
    head = "rbf2" if spec.squared else "rbf"
    return f"{head}({base},{spec.sigma:g})"


def render_kernel_expression(specs) -> str:
    return " + ".join(render_kernel_term(s) for s in specs)


@dataclass(frozen=True)
class ExperimentConfig:
    manifest: Path
    track: str
    kernels: tuple[KernelSpec, ...]
    classifier: str
    lam: float = 1.0
    mu: Optional[float] = None
    train_on: tuple[str, ...] = ("train",)
    eval_on: str = "dev"
    cache_dir: Optional[Path] = None
    seed: int = 0
    lowercase: bool = False

    def __post_init__(self):
        if self.track not in TRACKS:
            raise ConfigError(f"unknown track {self.track!r}")
        if self.classifier not in CLASSIFIERS:
            raise ConfigError(f"unknown classifier {self.classifier!r}")
        if not self.kernels:
            raise ConfigError("config needs at least one kernel term")
        allowed = TRACK_MODALITIES[self.track]
        for spec in self.kernels:
            if spec.modality not in allowed:
                raise ConfigError(
                    f"{self.track} track forbids {spec.modality} kernels "
                    f"(term {render_kernel_term(spec)!r})")
        if not self.train_on:
            raise ConfigError("train_on must name at least one split")
        for split in self.train_on + (self.eval_on,):
            if split not in SPLITS:
                raise ConfigError(f"unknown split {split!r}")
        if len(set(self.train_on)) != len(self.train_on):
            raise ConfigError("train_on lists a split twice")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if self.mu is not None and not self.mu > 0:
            raise ConfigError(f"mu must be positive, got {self.mu}")


_CONFIG_KEYS = {"corpus", "track", "kernels", "classifier", "lambda", "mu",
                "train_on", "eval_on", "cache_dir", "seed", "lowercase"}


def _parse_bool(text: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ConfigError(f"bad boolean for {key!r}: {text!r}")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        entries = read_keyvalue(path)
    except DataError as exc:
        # a malformed config file is a configuration problem
        raise ConfigError(str(exc)) from exc
    unknown = sorted(set(entries) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown config key(s) {unknown}")
    for required in ("corpus", "track", "kernels", "classifier"):
        if required not in entries:
            raise ConfigError(f"{path}: missing required key {required!r}")

    base = path.parent

    def _float(key: str, default):
        if key not in entries:
            return default
        try:
            return float(entries[key])
        except ValueError:
            raise ConfigError(f"{path}: bad number for {key!r}: "
                              f"{entries[key]!r}") from None

    def _int(key: str, default):
        if key not in entries:
            return default
        try:
            return int(entries[key])
        except ValueError:
            raise ConfigError(f"{path}: bad integer for {key!r}: "
                              f"{entries[key]!r}") from None

    train_on = tuple(s.strip() for s in entries.get("train_on", "train").split(",")
                     if s.strip())
    cache_dir = entries.get("cache_dir")
    return ExperimentConfig(
        manifest=(base / entries["corpus"]).resolve(),
        track=entries["track"].strip(),
        kernels=parse_kernel_expression(entries["kernels"]),
        classifier=entries["classifier"].strip(),
        lam=_float("lambda", 1.0),
        mu=_float("mu", None),
        train_on=train_on,
        eval_on=entries.get("eval_on", "dev").strip(),
        cache_dir=(base / cache_dir).resolve() if cache_dir else None,
        seed=_int("seed", 0),
        lowercase=_parse_bool(entries["lowercase"], "lowercase")
        if "lowercase" in entries else False,
    )
