import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlikit.corpus import (generate_synthetic_corpus, load_corpus,
                           normalize_whitespace, write_corpus)
from nlikit.errors import DataError


def test_normalize_collapses_mixed_whitespace():
    assert normalize_whitespace("a \t b\n\nc") == "a b c"


def test_normalize_identity_when_clean():
    assert normalize_whitespace("abc") == "abc"


def test_normalize_trims():
    assert normalize_whitespace("  x  ") == "x"


def test_normalize_handles_unicode_whitespace():
    assert normalize_whitespace("a b c") == "a b c"


@given(st.text())
def test_normalize_idempotent(s):
    once = normalize_whitespace(s)
    assert normalize_whitespace(once) == once


@given(st.text())
def test_normalize_preserves_nonspace_sequence(s):
    assert "".join(normalize_whitespace(s).split()) == "".join(s.split())


def make_tree(root, vectors=True, transcript=False):
    """Two-class, four-doc corpus tree; returns the manifest path."""
    (root / "splits").mkdir()
    (root / "essay").mkdir()
    (root / "splits" / "train.tsv").write_text(
        "d1\tA\nd2\tB\n", encoding="utf-8")
    (root / "splits" / "test.tsv").write_text(
        "d3\tA\nd4\tB\n", encoding="utf-8")
    texts = {"d1": "the  quick\tfox", "d2": "lazy dog", "d3": "more text",
             "d4": "Mixed CASE here"}
    for sid, text in texts.items():
        (root / "essay" / f"{sid}.txt").write_text(text, encoding="utf-8")
    lines = ["classes = A,B",
             "split.train = splits/train.tsv",
             "split.test = splits/test.tsv",
             "texts.essay = essay"]
    if transcript:
        (root / "transcript").mkdir()
        for sid in texts:
            (root / "transcript" / f"{sid}.txt").write_text(
                f"spoken {sid}", encoding="utf-8")
        lines.append("texts.transcript = transcript")
    if vectors:
        rows = [f"{sid},{i + 1}.0,{i + 2}.5" for i, sid in
                enumerate(sorted(texts))]
        (root / "vec.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
        lines.append("vectors = vec.csv")
    manifest = root / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def test_load_small_manifest(tmp_path):
    corpus = load_corpus(make_tree(tmp_path, vectors=False))
    assert corpus.classes == ("A", "B")
    assert [s.id for s in corpus.samples] == ["d1", "d2", "d3", "d4"]
    assert corpus.modalities == ("essay",)
    assert corpus.documents["essay"][0].text == "the quick fox"
    assert corpus.vectors == ()
    assert corpus.vector_dim is None
    assert [s.id for s in corpus.split_samples("test")] == ["d3", "d4"]


def test_load_vectors(tmp_path):
    corpus = load_corpus(make_tree(tmp_path))
    assert corpus.vector_dim == 2
    vec = corpus.vectors_for(["d2"])[0]
    assert vec.values.tolist() == [2.0, 3.5]
    assert vec.label == "B"


def test_lowercase_flag_changes_text_and_checksum(tmp_path):
    manifest = make_tree(tmp_path)
    plain = load_corpus(manifest)
    folded = load_corpus(manifest, lowercase=True)
    assert plain.documents["essay"][3].text == "Mixed CASE here"
    assert folded.documents["essay"][3].text == "mixed case here"
    assert plain.checksum != folded.checksum


def test_load_deterministic(tmp_path):
    manifest = make_tree(tmp_path)
    a = load_corpus(manifest)
    b = load_corpus(manifest)
    assert a == b


def test_unknown_label_rejected(tmp_path):
    manifest = make_tree(tmp_path)
    (tmp_path / "splits" / "train.tsv").write_text(
        "d1\tA\nd2\tX\n", encoding="utf-8")
    with pytest.raises(DataError, match="label 'X'"):
        load_corpus(manifest)


def test_duplicate_id_rejected(tmp_path):
    manifest = make_tree(tmp_path)
    (tmp_path / "splits" / "test.tsv").write_text(
        "d1\tA\nd4\tB\n", encoding="utf-8")
    with pytest.raises(DataError, match="duplicate id 'd1'"):
        load_corpus(manifest)


def test_vector_dimension_mismatch_rejected(tmp_path):
    manifest = make_tree(tmp_path)
    (tmp_path / "vec.csv").write_text(
        "d1,1.0,2.0\nd2,1.0,2.0,3.0\nd3,0.0,1.0\nd4,2.0,2.0\n",
        encoding="utf-8")
    with pytest.raises(DataError, match="dimension"):
        load_corpus(manifest)


def test_missing_vector_rejected(tmp_path):
    manifest = make_tree(tmp_path)
    (tmp_path / "vec.csv").write_text("d1,1.0,2.0\n", encoding="utf-8")
    with pytest.raises(DataError, match="no vector for id"):
        load_corpus(manifest)


def test_missing_text_file_named(tmp_path):
    manifest = make_tree(tmp_path)
    (tmp_path / "essay" / "d3.txt").unlink()
    with pytest.raises(DataError, match="missing text file for id 'd3'"):
        load_corpus(manifest)


def test_unknown_manifest_key_rejected(tmp_path):
    manifest = make_tree(tmp_path)
    manifest.write_text(manifest.read_text() + "extra = nope\n",
                        encoding="utf-8")
    with pytest.raises(DataError, match="unknown manifest key"):
        load_corpus(manifest)


def test_invalid_utf8_names_offset(tmp_path):
    manifest = make_tree(tmp_path)
    (tmp_path / "essay" / "d1.txt").write_bytes(b"ok \xff bad")
    with pytest.raises(DataError, match="invalid UTF-8 at byte offset 3"):
        load_corpus(manifest)


def test_missing_manifest(tmp_path):
    with pytest.raises(DataError, match="manifest not found"):
        load_corpus(tmp_path / "nope.txt")


def test_write_load_round_trip(tmp_path, tiny_corpus):
    manifest = write_corpus(tiny_corpus, tmp_path / "out")
    loaded = load_corpus(manifest)
    assert loaded.classes == tiny_corpus.classes
    assert loaded.samples == tiny_corpus.samples
    for modality in tiny_corpus.modalities:
        assert tuple(d.text for d in loaded.documents[modality]) == \
            tuple(d.text for d in tiny_corpus.documents[modality])
    assert len(loaded.vectors) == len(tiny_corpus.vectors)
    for got, want in zip(loaded.vectors, tiny_corpus.vectors):
        # repr() round-trips floats exactly
        assert got.id == want.id
        assert np.array_equal(got.values, want.values)


def test_synthetic_shape_contract():
    corpus = generate_synthetic_corpus(2, 10, 200, 8, 42)
    assert len(corpus.classes) == 2
    assert len(corpus.samples) == 20
    assert len(corpus.vectors) == 20
    assert corpus.vector_dim == 8
    assert set(corpus.modalities) == {"essay", "transcript"}
    # per class: fifth test, tenth dev, rest train
    assert len(corpus.split_samples("test")) == 4
    assert len(corpus.split_samples("dev")) == 2
    assert len(corpus.split_samples("train")) == 14
    for doc in corpus.documents["essay"]:
        assert len(doc.text) == 200


def test_synthetic_deterministic():
    a = generate_synthetic_corpus(2, 6, 100, 4, 11)
    b = generate_synthetic_corpus(2, 6, 100, 4, 11)
    assert a == b
    assert a.checksum == b.checksum


def test_synthetic_seed_changes_content():
    a = generate_synthetic_corpus(2, 6, 100, 4, 11)
    b = generate_synthetic_corpus(2, 6, 100, 4, 12)
    assert a.checksum != b.checksum


def test_synthetic_rejects_degenerate_args():
    with pytest.raises(DataError, match="num_classes"):
        generate_synthetic_corpus(0, 10, 100, 4, 0)
    with pytest.raises(DataError, match="doc_length"):
        generate_synthetic_corpus(2, 10, 0, 4, 0)
