"""Corpus ingestion, validation, and synthetic corpus generation.

A corpus is described by a flat key-value manifest:

    classes = ARA,CHI,FRE
    split.train = splits/train.tsv
    split.dev = splits/dev.tsv
    split.test = splits/test.tsv
    texts.essay = essay
    texts.transcript = transcript
    vectors = ivectors.csv

Split files are header-less TSVs with `id<TAB>label` rows; every declared
text directory must contain one UTF-8 file `<id>.txt` per sample; the
optional vector file is a header-less CSV `id,v1,...,vm` covering every
sample. All paths are relative to the manifest's directory.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .kvfile import read_keyvalue

MODALITIES = ("essay", "transcript")
SPLITS = ("train", "dev", "test")

# Synthetic generator constants. The mixing weight blends a shared base
# Markov chain with a per-class chain (higher = more separable texts);
# the noise scale controls within-class spread of the feature vectors.
SYNTH_ALPHABET = "abcdefghijkl"
SYNTH_ESSAY_MIX = 0.42
SYNTH_TRANSCRIPT_MIX = 0.28
SYNTH_VECTOR_NOISE = 0.25


def normalize_whitespace(raw: str) -> str:
    """Collapse every run of Unicode whitespace to one space and trim the ends.

    Idempotent, and never alters the sequence of non-whitespace characters.
    """
    return " ".join(raw.split())


@dataclass(frozen=True)
class SampleRef:
    """One row of a split file: the corpus-level identity of a sample."""

    id: str
    label: str
    split: str


@dataclass(frozen=True)
class Document:
    """One text sample after whitespace normalization."""

    id: str
    modality: str
    text: str
    label: str
    split: str


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """One dense acoustic representation (i-vector style) for a sample."""

    id: str
    values: np.ndarray
    label: str
    split: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return (self.id == other.id and self.label == other.label
                and self.split == other.split
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.id, self.label, self.split, self.values.tobytes()))


@dataclass(frozen=True)
class Corpus:
    """Validated multi-modal corpus, immutable after load.

    `samples` is the authoritative (id, label, split) table, sorted by id.
    `documents` maps each declared modality to its documents in the same
    order; `vectors` is empty when the corpus has no feature vectors.
    """

    classes: tuple[str, ...]
    samples: tuple[SampleRef, ...]
    documents: dict[str, tuple[Document, ...]]
    vectors: tuple[FeatureVector, ...]
    checksum: str
    manifest_path: str | None = None

    @property
    def modalities(self) -> tuple[str, ...]:
        return tuple(self.documents.keys())

    @property
    def vector_dim(self) -> int | None:
        return int(self.vectors[0].values.size) if self.vectors else None

    def split_samples(self, splits) -> tuple[SampleRef, ...]:
        wanted = {splits} if isinstance(splits, str) else set(splits)
        unknown = wanted.difference(SPLITS)
        if unknown:
            raise DataError(f"unknown split(s): {sorted(unknown)}")
        return tuple(s for s in self.samples if s.split in wanted)

    def documents_for(self, modality: str, ids) -> tuple[Document, ...]:
        if modality not in self.documents:
            raise DataError(f"corpus has no {modality!r} texts")
        by_id = {d.id: d for d in self.documents[modality]}
        return tuple(by_id[i] for i in ids)

    def vectors_for(self, ids) -> tuple[FeatureVector, ...]:
        if not self.vectors:
            raise DataError("corpus has no feature vectors")
        by_id = {v.id: v for v in self.vectors}
        return tuple(by_id[i] for i in ids)


def _decode_utf8(data: bytes, source: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(
            f"{source}: invalid UTF-8 at byte offset {exc.start}") from exc


def _read_split_file(path: Path, split: str, classes: set[str],
                     seen: dict[str, SampleRef]) -> list[SampleRef]:
    if not path.is_file():
        raise DataError(f"split file not found: {path}")
    refs = []
    text = _decode_utf8(path.read_bytes(), str(path))
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected 'id<TAB>label'")
        sid, label = parts[0].strip(), parts[1].strip()
        if not sid:
            raise DataError(f"{path}:{lineno}: empty id")
        if label not in classes:
            raise DataError(
                f"{path}:{lineno}: sample {sid!r} has label {label!r} "
                f"not in the class list")
        if sid in seen:
            raise DataError(
                f"{path}:{lineno}: duplicate id {sid!r} "
                f"(already in split {seen[sid].split!r})")
        ref = SampleRef(id=sid, label=label, split=split)
        seen[sid] = ref
        refs.append(ref)
    return refs


def _read_vector_file(path: Path, samples: dict[str, SampleRef]) -> list[FeatureVector]:
    if not path.is_file():
        raise DataError(f"vector file not found: {path}")
    text = _decode_utf8(path.read_bytes(), str(path))
    rows: dict[str, np.ndarray] = {}
    dim = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) < 2:
            raise DataError(f"{path}:{lineno}: expected 'id,v1,...,vm'")
        sid = fields[0].strip()
        if sid not in samples:
            raise DataError(f"{path}:{lineno}: vector for unknown id {sid!r}")
        if sid in rows:
            raise DataError(f"{path}:{lineno}: duplicate vector for id {sid!r}")
        try:
            vals = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: bad number ({exc})") from exc
        if dim is None:
            dim = vals.size
        elif vals.size != dim:
            raise DataError(
                f"{path}:{lineno}: vector for {sid!r} has dimension "
                f"{vals.size}, expected {dim}")
        if not np.all(np.isfinite(vals)):
            raise DataError(f"{path}:{lineno}: non-finite value for id {sid!r}")
        rows[sid] = vals
    missing = sorted(set(samples) - set(rows))
    if missing:
        raise DataError(f"{path}: no vector for id(s) {missing[:5]}"
                        + (" ..." if len(missing) > 5 else ""))
    return [FeatureVector(id=sid, values=rows[sid],
                          label=samples[sid].label, split=samples[sid].split)
            for sid in sorted(rows)]


def load_corpus(manifest_path, lowercase: bool = False) -> Corpus:
    """Load and validate a corpus from its manifest.

    Texts are whitespace-normalized (and optionally lowercased); samples are
    ordered by id. Two loads of the same manifest yield equal corpora.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DataError(f"manifest not found: {manifest_path}")
    base = manifest_path.parent
    entries = read_keyvalue(manifest_path)

    known = {"classes", "vectors"}
    known.update(f"split.{s}" for s in SPLITS)
    known.update(f"texts.{m}" for m in MODALITIES)
    unknown = sorted(set(entries) - known)
    if unknown:
        raise DataError(f"{manifest_path}: unknown manifest key(s) {unknown}")
    if "classes" not in entries:
        raise DataError(f"{manifest_path}: missing 'classes'")

    classes = tuple(c.strip() for c in entries["classes"].split(",") if c.strip())
    if not classes:
        raise DataError(f"{manifest_path}: empty class list")
    if len(set(classes)) != len(classes):
        raise DataError(f"{manifest_path}: duplicate class names")

    hasher = hashlib.sha256()
    hasher.update(manifest_path.read_bytes())

    seen: dict[str, SampleRef] = {}
    samples: list[SampleRef] = []
    for split in SPLITS:
        key = f"split.{split}"
        if key not in entries:
            continue
        path = base / entries[key]
        samples.extend(_read_split_file(path, split, set(classes), seen))
        hasher.update(path.read_bytes())
    if not samples:
        raise DataError(f"{manifest_path}: no split files declared")
    samples.sort(key=lambda s: s.id)

    documents: dict[str, tuple[Document, ...]] = {}
    for modality in MODALITIES:
        key = f"texts.{modality}"
        if key not in entries:
            continue
        tdir = base / entries[key]
        if not tdir.is_dir():
            raise DataError(f"text directory not found: {tdir}")
        docs = []
        for ref in samples:
            fpath = tdir / f"{ref.id}.txt"
            if not fpath.is_file():
                raise DataError(f"missing text file for id {ref.id!r}: {fpath}")
            data = fpath.read_bytes()
            hasher.update(data)
            text = normalize_whitespace(_decode_utf8(data, str(fpath)))
            if lowercase:
                text = text.lower()
            docs.append(Document(id=ref.id, modality=modality, text=text,
                                 label=ref.label, split=ref.split))
        documents[modality] = tuple(docs)
    if not documents:
        raise DataError(f"{manifest_path}: no text directories declared")

    vectors: tuple[FeatureVector, ...] = ()
    if "vectors" in entries:
        vpath = base / entries["vectors"]
        vectors = tuple(_read_vector_file(vpath, {s.id: s for s in samples}))
        hasher.update(vpath.read_bytes())

    checksum = hasher.hexdigest()
    if lowercase:
        checksum = hashlib.sha256(f"{checksum}:lowercase".encode()).hexdigest()

    return Corpus(classes=classes, samples=tuple(samples), documents=documents,
                  vectors=vectors, checksum=checksum,
                  manifest_path=str(manifest_path))


def write_corpus(corpus: Corpus, out_dir) -> Path:
    """Write a corpus to disk in the manifest layout. Returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "splits").mkdir(exist_ok=True)

    lines = [f"classes = {','.join(corpus.classes)}"]
    by_split: dict[str, list[SampleRef]] = {}
    for ref in corpus.samples:
        by_split.setdefault(ref.split, []).append(ref)
    for split in SPLITS:
        refs = by_split.get(split)
        if not refs:
            continue
        rel = f"splits/{split}.tsv"
        with open(out / rel, "w", encoding="utf-8") as fh:
            for ref in refs:
                fh.write(f"{ref.id}\t{ref.label}\n")
        lines.append(f"split.{split} = {rel}")
    for modality, docs in corpus.documents.items():
        mdir = out / modality
        mdir.mkdir(exist_ok=True)
        for doc in docs:
            (mdir / f"{doc.id}.txt").write_text(doc.text, encoding="utf-8")
        lines.append(f"texts.{modality} = {modality}")
    if corpus.vectors:
        with open(out / "ivectors.csv", "w", encoding="utf-8") as fh:
            for vec in corpus.vectors:
                vals = ",".join(repr(float(x)) for x in vec.values)
                fh.write(f"{vec.id},{vals}\n")
        lines.append("vectors = ivectors.csv")

    manifest = out / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def _class_chain(rng: np.random.Generator, base_rows: np.ndarray,
                 mix: float) -> np.ndarray:
    n = base_rows.shape[0]
    pert = rng.random((n, n)) + 0.05
    pert /= pert.sum(axis=1, keepdims=True)
    rows = (1.0 - mix) * base_rows + mix * pert
    return rows / rows.sum(axis=1, keepdims=True)


def _markov_text(rng: np.random.Generator, chain: np.ndarray, length: int,
                 alphabet: str) -> str:
    cum = np.cumsum(chain, axis=1)
    n_sym = len(alphabet)
    draws = rng.random(length)
    state = int(rng.integers(n_sym))
    out = []
    for u in draws:
        state = min(int(np.searchsorted(cum[state], u, side="right")), n_sym - 1)
        out.append(alphabet[state])
    return "".join(out)


def generate_synthetic_corpus(num_classes: int, docs_per_class: int,
                              doc_length: int, vector_dim: int,
                              seed: int) -> Corpus:
    """Generate a deterministic synthetic multi-modal corpus.

    Each class is a distinct order-1 character Markov chain (essays and
    transcripts use separate chains; transcripts carry a weaker class
    signal), and feature vectors are unit-norm class means plus Gaussian
    noise. Splits are assigned per class: one fifth test, one tenth dev,
    the rest train. The same seed always yields a bit-identical corpus.
    """
    for name, val in (("num_classes", num_classes),
                      ("docs_per_class", docs_per_class),
                      ("doc_length", doc_length),
                      ("vector_dim", vector_dim)):
        if val < 1:
            raise DataError(f"{name} must be >= 1, got {val}")

    n_sym = len(SYNTH_ALPHABET)
    base_rng = np.random.default_rng([seed, 0])
    base_rows = base_rng.random((n_sym, n_sym)) + 0.05
    base_rows /= base_rows.sum(axis=1, keepdims=True)

    chains_essay, chains_trans, means = [], [], []
    for c in range(num_classes):
        crng = np.random.default_rng([seed, 1, c])
        chains_essay.append(_class_chain(crng, base_rows, SYNTH_ESSAY_MIX))
        chains_trans.append(_class_chain(crng, base_rows, SYNTH_TRANSCRIPT_MIX))
        mean = crng.normal(size=vector_dim)
        means.append(mean / np.linalg.norm(mean))

    n_test = docs_per_class // 5
    n_dev = docs_per_class // 10
    n_train = docs_per_class - n_dev - n_test

    samples, essays, transcripts, vectors = [], [], [], []
    for c in range(num_classes):
        label = f"L{c:02d}"
        for i in range(docs_per_class):
            sid = f"{label}-{i:04d}"
            split = ("train" if i < n_train
                     else "dev" if i < n_train + n_dev else "test")
            drng = np.random.default_rng([seed, 2, c, i])
            essay = _markov_text(drng, chains_essay[c], doc_length, SYNTH_ALPHABET)
            transcript = _markov_text(drng, chains_trans[c], doc_length,
                                      SYNTH_ALPHABET)
            vec = means[c] + SYNTH_VECTOR_NOISE * drng.normal(size=vector_dim)
            samples.append(SampleRef(id=sid, label=label, split=split))
            essays.append(Document(id=sid, modality="essay", text=essay,
                                   label=label, split=split))
            transcripts.append(Document(id=sid, modality="transcript",
                                        text=transcript, label=label,
                                        split=split))
            vectors.append(FeatureVector(id=sid, values=vec, label=label,
                                         split=split))

    order = sorted(range(len(samples)), key=lambda k: samples[k].id)
    samples = [samples[k] for k in order]
    essays = [essays[k] for k in order]
    transcripts = [transcripts[k] for k in order]
    vectors = [vectors[k] for k in order]

    hasher = hashlib.sha256()
    for ref, ess, tra, vec in zip(samples, essays, transcripts, vectors):
        hasher.update(f"{ref.id}\x00{ref.label}\x00{ref.split}\x00".encode())
        hasher.update(ess.text.encode())
        hasher.update(tra.text.encode())
        hasher.update(vec.values.tobytes())

    return Corpus(
        classes=tuple(f"L{c:02d}" for c in range(num_classes)),
        samples=tuple(samples),
        documents={"essay": tuple(essays), "transcript": tuple(transcripts)},
        vectors=tuple(vectors),
        checksum=hasher.hexdigest(),
        manifest_path=None,
    )
