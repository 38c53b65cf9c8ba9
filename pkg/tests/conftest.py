import numpy as np
import pytest

from nlikit.corpus import generate_synthetic_corpus, write_corpus


@pytest.fixture(scope="session")
def tiny_corpus():
    """3 classes x 10 docs, short texts: fast enough for most tests."""
    return generate_synthetic_corpus(num_classes=3, docs_per_class=10,
                                     doc_length=200, vector_dim=8, seed=42)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory, tiny_corpus):
    """The tiny corpus written to disk; returns its manifest path."""
    out = tmp_path_factory.mktemp("corpus")
    return write_corpus(tiny_corpus, out)


def random_texts(rng: np.random.Generator, count: int, alphabet: str,
                 min_len: int, max_len: int) -> list[str]:
    out = []
    for _ in range(count):
        length = int(rng.integers(min_len, max_len + 1))
        out.append("".join(rng.choice(list(alphabet), size=length)))
    return out


def linear_gram(x_rows: np.ndarray, x_cols: np.ndarray, row_ids, col_ids):
    """Explicit-feature linear kernel wrapped as a GramMatrix."""
    from nlikit.kernelops import GramMatrix

    row_ids, col_ids = tuple(row_ids), tuple(col_ids)
    values = x_rows @ x_cols.T
    if row_ids == col_ids:
        values = (values + values.T) / 2.0
        return GramMatrix(values=values, row_ids=row_ids, col_ids=col_ids,
                          symmetric=True)
    return GramMatrix(values=values, row_ids=row_ids, col_ids=col_ids)


def gaussian_toy_accuracy(seed: int) -> float:
    """3 collinear Gaussian classes with means 4 noise-sigmas apart,
    200 points, linear-kernel discriminant classifier, held-out accuracy."""
    from nlikit.classifiers import kda_train, predict

    rng = np.random.default_rng(seed)
    means = np.array([[0.0, 0.0], [4.0, 0.0], [8.0, 0.0]])
    counts = [67, 67, 66]
    feats, labels = [], []
    for mean, count, name in zip(means, counts, ["A", "B", "C"]):
        feats.append(mean + rng.normal(size=(count, 2)))
        labels += [name] * count
    feats = np.vstack(feats)
    order = rng.permutation(len(labels))
    feats = feats[order]
    labels = [labels[i] for i in order]
    ids = [f"s{i}" for i in range(len(labels))]

    n_train = 100
    k_train = linear_gram(feats[:n_train], feats[:n_train],
                          ids[:n_train], ids[:n_train])
    k_eval = linear_gram(feats[n_train:], feats[:n_train],
                         ids[n_train:], ids[:n_train])
    model = kda_train(k_train, labels[:n_train])
    pred = predict(model, k_eval)
    gold = labels[n_train:]
    return sum(p == g for p, g in zip(pred, gold)) / len(gold)
