import numpy as np
import pytest

from lexbridge.downstream import (
    LabeledCorpus, LinearClassifier, drop_vocab_fraction, evaluate_classifier,
    featurize_document, fit_linear_classifier, load_labeled_corpus, train_linear_classifier,
    train_test_split,
)
from lexbridge.embedspace import EmbeddingSpace
from lexbridge.errors import DataError

SPACE = EmbeddingSpace(["a", "b", "c"], [[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])


def test_featurize():
    np.testing.assert_array_equal(featurize_document(["a", "zz"], SPACE), [1.0, 0.0])
    np.testing.assert_array_equal(featurize_document(["q", "r"], SPACE), [0.0, 0.0])
    np.testing.assert_array_equal(featurize_document(["a", "b"], SPACE), [0.5, 0.5])


def _shared_space(n=100):
    words = [f"w{i}" for i in range(n)] + ["other"]
    return EmbeddingSpace(words, np.arange(2 * (n + 1), dtype=float).reshape(-1, 2)), set(words[:n])


def test_drop_identity_and_full():
    space, vocab = _shared_space()
    same, removed = drop_vocab_fraction(space, vocab, 0.0)
    assert removed == [] and same.words == space.words
    none_left, removed = drop_vocab_fraction(space, vocab, 1.0)
    assert len(removed) == 100 and none_left.words == ["other"]


def test_drop_count_and_determinism():
    space, vocab = _shared_space()
    a, ra = drop_vocab_fraction(space, vocab, 0.2, seed=5)
    b, rb = drop_vocab_fraction(space, vocab, 0.2, seed=5)
    assert len(ra) == 20 and ra == rb and a.words == b.words
    assert set(a.words) == set(space.words) - set(ra)
    _, rc = drop_vocab_fraction(space, vocab, 0.2, seed=6)
    assert rc != ra
    _, r29 = drop_vocab_fraction(space, vocab, 0.29)
    assert len(r29) == 29
    with pytest.raises(ValueError):
        drop_vocab_fraction(space, vocab, 1.5)


def _gaussians(n=200, seed=0):
    rng = np.random.default_rng(seed)
    F = np.vstack([rng.normal(-2, 0.5, (n, 3)), rng.normal(2, 0.5, (n, 3))])
    y = np.repeat([0, 1], n)
    return F, y


def test_separable_gaussians():
    F, y = _gaussians()
    model = fit_linear_classifier(F, y, 2, epochs=200, lr=0.5)
    assert np.mean(model.predict(F) == y) >= 0.99


def test_zero_epochs_is_chance():
    F, y = _gaussians()
    model = fit_linear_classifier(F, y, 2, epochs=0)
    assert np.mean(model.predict(F) == y) == pytest.approx(0.5)


def test_full_batch_loss_non_increasing():
    F, y = _gaussians()
    hist = fit_linear_classifier(F, y, 2, epochs=10, lr=0.05).loss_history
    assert all(b <= a for a, b in zip(hist, hist[1:]))


def test_minibatch_deterministic():
    F, y = _gaussians()
    a = fit_linear_classifier(F, y, 2, epochs=3, batch_size=32, seed=1)
    b = fit_linear_classifier(F, y, 2, epochs=3, batch_size=32, seed=1)
    np.testing.assert_array_equal(a.weights, b.weights)


def test_missing_class():
    with pytest.raises(ValueError):
        fit_linear_classifier(np.zeros((3, 2)), [0, 0, 0], 2)


def test_evaluate_exact_and_adversarial():
    docs = [["a"], ["b"], ["a"], ["b"]]
    gold = LabeledCorpus(docs, [0, 1, 0, 1], 2)
    oracle = LinearClassifier(np.array([[1.0, -1.0], [-1.0, 1.0]]), np.zeros(2))
    assert evaluate_classifier(oracle, gold, SPACE) == 1.0
    flipped = LabeledCorpus(docs, [1, 0, 1, 0], 2)
    assert evaluate_classifier(oracle, flipped, SPACE) <= 1.0 == evaluate_classifier(oracle, gold, SPACE)
    assert evaluate_classifier(oracle, flipped, SPACE) == 0.0
    with pytest.raises(ValueError):
        evaluate_classifier(oracle, LabeledCorpus([], [], 2), SPACE)


def test_ties_go_to_lowest_class():
    model = LinearClassifier(np.zeros((3, 2)), np.zeros(3))
    assert model.predict(np.ones((2, 2))).tolist() == [0, 0]


def test_random_labels_chance_accuracy():
    rng = np.random.default_rng(0)
    F = rng.standard_normal((400, 4))
    model = LinearClassifier(rng.standard_normal((4, 4)), np.zeros(4))
    accs = [np.mean(model.predict(F) == rng.integers(0, 4, 400)) for _ in range(200)]
    assert np.mean(accs) == pytest.approx(0.25, abs=0.01)


def test_split_deterministic():
    corpus = LabeledCorpus([[str(i)] for i in range(50)], [i % 2 for i in range(50)], 2)
    tr, te = train_test_split(corpus, 0.2, seed=3)
    tr2, te2 = train_test_split(corpus, 0.2, seed=3)
    assert len(tr) == 40 and len(te) == 10
    assert tr.documents == tr2.documents and te.documents == te2.documents
    assert sorted(d[0] for d in tr.documents + te.documents) == sorted(str(i) for i in range(50))


def test_load_labeled_corpus(write):
    c = load_labeled_corpus(write("c.tsv", "1\tgood film\n0\tbad\n"))
    assert c.num_classes == 2 and c.labels.tolist() == [1, 0]
    c = load_labeled_corpus(write("d.tsv", "pos\tgood\nneg\tbad\npos\tok\n"))
    assert c.label_names == ["neg", "pos"] and c.labels.tolist() == [1, 0, 1]
    with pytest.raises(DataError):
        load_labeled_corpus(write("e.tsv", "no tab here\n"))


def test_train_linear_classifier_on_space():
    docs = [["a"], ["b"]] * 20
    corpus = LabeledCorpus(docs, [0, 1] * 20, 2)
    model = train_linear_classifier(corpus, SPACE, epochs=100)
    assert evaluate_classifier(model, corpus, SPACE) == 1.0
