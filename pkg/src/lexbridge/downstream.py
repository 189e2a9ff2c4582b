"""Vocabulary-drop protocol for text classification with static embeddings.

Documents are featurized as the mean of their in-vocabulary word vectors and
classified with multinomial logistic regression. Dropped words are treated as
out of vocabulary.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass
class LabeledCorpus:
    documents: list
    labels: np.ndarray
    num_classes: int
    label_names: list = field(default=None)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.documents) != len(self.labels):
            raise ValueError("documents and labels differ in length")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise ValueError("label out of range")
        if self.label_names is None:
            self.label_names = [str(i) for i in range(self.num_classes)]

    def __len__(self):
        return len(self.documents)

    def vocabulary(self):
        return {t for doc in self.documents for t in doc}

    def subset(self, idx):
        return LabeledCorpus([self.documents[i] for i in idx], self.labels[idx],
                             self.num_classes, self.label_names)


def load_labeled_corpus(path):
    """Read ``label<TAB>token token ...`` lines.

    Integer labels are used as class ids directly; otherwise labels are
    numbered in sorted order.
    """
    raw_labels, docs = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            label, sep, text = line.partition("\t")
            if not sep or not label.strip():
                raise DataError("expected 'label<TAB>tokens'", path, lineno)
            raw_labels.append(label.strip())
            docs.append(text.split())
    if all(lab.lstrip("-").isdigit() for lab in raw_labels) and raw_labels:
        ids = [int(lab) for lab in raw_labels]
        if min(ids) < 0:
            raise DataError("negative class id", path)
        k = max(ids) + 1
        return LabeledCorpus(docs, ids, k)
    names = sorted(set(raw_labels))
    index = {n: i for i, n in enumerate(names)}
    return LabeledCorpus(docs, [index[lab] for lab in raw_labels], len(names), names)


def train_test_split(corpus, test_fraction=0.2, seed=42):
    """Seeded shuffle, then the first ``1 - test_fraction`` go to training."""
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    perm = rng.permutation(len(corpus))
    n_train = len(corpus) - int(round(test_fraction * len(corpus)))
    return corpus.subset(np.sort(perm[:n_train])), corpus.subset(np.sort(perm[n_train:]))


def drop_vocab_fraction(space, dataset_vocab, fraction, seed=42):
    """Remove a seeded random ``floor(fraction * n)`` of the dataset words in ``space``.

    Returns ``(reduced_space, removed_words)``; removed words are listed in
    vocabulary order.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    shared = [w for w in space.words if w in dataset_vocab]
    # guard against 0.2 * 100 -> 19.999... style truncation
    n_drop = int(math.floor(fraction * len(shared) + 1e-9))
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    picked = np.sort(rng.choice(len(shared), size=n_drop, replace=False)) if n_drop else []
    removed = [shared[i] for i in picked]
    return space.without(removed), removed


def featurize_document(doc, space):
    rows = [space.vocab[t] for t in doc if t in space.vocab]
    if not rows:
        return np.zeros(space.dim)
    return space.vectors[rows].mean(axis=0)


def featurize(corpus, space):
    out = np.zeros((len(corpus), space.dim))
    for i, doc in enumerate(corpus.documents):
        out[i] = featurize_document(doc, space)
    return out


@dataclass
class LinearClassifier:
    weights: np.ndarray
    bias: np.ndarray
    loss_history: list = field(default_factory=list)

    def scores(self, features):
        return features @ self.weights.T + self.bias

    def predict(self, features):
        # argmax returns the first maximum, i.e. the lowest class id on ties
        return np.argmax(self.scores(features), axis=1)


def _softmax_xent(W, b, F, y, l2):
    z = F @ W.T + b
    z -= z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    n = len(y)
    loss = -logp[np.arange(n), y].mean() + 0.5 * l2 * np.sum(W * W)
    p = np.exp(logp)
    p[np.arange(n), y] -= 1.0
    p /= n
    return loss, p.T @ F + l2 * W, p.sum(axis=0)


def fit_linear_classifier(features, labels, num_classes, epochs=300, lr=1.0, l2=1e-4,
                          seed=42, batch_size=None):
    """Softmax regression by gradient descent from a zero start.

    Full-batch when ``batch_size`` is None; otherwise mini-batches in a seeded
    order per epoch.
    """
    F = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    missing = set(range(num_classes)) - set(np.unique(y).tolist())
    if missing:
        raise ValueError(f"classes absent from training data: {sorted(missing)}")
    W = np.zeros((num_classes, F.shape[1]))
    b = np.zeros(num_classes)
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    history = []
    for _ in range(epochs):
        if batch_size is None:
            loss, gW, gb = _softmax_xent(W, b, F, y, l2)
            W -= lr * gW
            b -= lr * gb
        else:
            loss = 0.0
            perm = rng.permutation(len(y))
            for s in range(0, len(y), batch_size):
                idx = perm[s:s + batch_size]
                bl, gW, gb = _softmax_xent(W, b, F[idx], y[idx], l2)
                W -= lr * gW
                b -= lr * gb
                loss += bl * len(idx) / len(y)
        if not math.isfinite(loss):
            raise FloatingPointError("classifier loss diverged; lower the learning rate")
        history.append(float(loss))
    return LinearClassifier(W, b, history)


def train_linear_classifier(corpus, space, epochs=300, lr=1.0, l2=1e-4, seed=42,
                            batch_size=None):
    return fit_linear_classifier(featurize(corpus, space), corpus.labels, corpus.num_classes,
                                 epochs=epochs, lr=lr, l2=l2, seed=seed, batch_size=batch_size)


def accuracy(predicted, gold):
    predicted = np.asarray(predicted)
    gold = np.asarray(gold)
    if len(gold) == 0:
        raise ValueError("empty corpus")
    return float(np.mean(predicted == gold))


def evaluate_classifier(model, corpus, space):
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    return accuracy(model.predict(featurize(corpus, space)), corpus.labels)
