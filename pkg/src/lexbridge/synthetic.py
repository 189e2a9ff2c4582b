"""Small synthetic fixtures: two-community graphs, topic corpora, rotated spaces."""
import numpy as np

from .embedspace import EmbeddingSpace
from .graph import KnowledgeGraph
from .senses import SenseMap


def random_orthogonal(d, rng):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_unit_vectors(n, d, rng):
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def community_words(n_per=25, prefixes=("a", "b")):
    return [[f"{p}{i:02d}" for i in range(n_per)] for p in prefixes]


def two_community_graph(n_per=25, p_in=0.3, p_out=0.02, seed=0):
    """Two dense communities with sparse cross links; each has a spanning ring."""
    rng = np.random.default_rng(seed)
    comms = community_words(n_per)
    pairs = set()
    for members in comms:
        for i, u in enumerate(members):
            pairs.add((u, members[(i + 1) % len(members)]))
            for v in members[i + 1:]:
                if rng.random() < p_in:
                    pairs.add((u, v))
    for u in comms[0]:
        for v in comms[1]:
            if rng.random() < p_out:
                pairs.add((u, v))
    return KnowledgeGraph.from_pairs(sorted(pairs)), comms


def topic_corpus(communities, n_tokens=100_000, sentence_length=20, noise=0.05, seed=0):
    """Sentences each drawn from one community, with a small share of off-topic tokens."""
    rng = np.random.default_rng(seed)
    n_sent = n_tokens // sentence_length
    sentences = []
    for _ in range(n_sent):
        c = int(rng.integers(len(communities)))
        own = communities[c]
        other = communities[1 - c] if len(communities) == 2 else communities[(c + 1) % len(communities)]
        toks = []
        for _ in range(sentence_length):
            pool = other if rng.random() < noise else own
            toks.append(pool[int(rng.integers(len(pool)))])
        sentences.append(toks)
    return sentences


def identity_senses(words):
    return SenseMap({w: [w] for w in words})


def write_edges(graph, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in sorted(graph.edges):
            fh.write(f"{u} {v}\n")


def write_sentences(sentences, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in sentences:
            fh.write(" ".join(s) + "\n")


def separable_classification(n_classes=2, words_per_class=60, n_neutral=40, n_docs=600,
                             class_words_per_doc=2, neutral_per_doc=2, dim=20, noise=0.3,
                             seed=0):
    """Class-indicative words near per-class centroids plus neutral filler words.

    Returns ``(space, documents, labels)``.
    """
    rng = np.random.default_rng(seed)
    centroids = random_unit_vectors(n_classes, dim, rng) * 2.0
    words, rows, by_class = [], [], []
    for c in range(n_classes):
        cw = [f"c{c}w{i:03d}" for i in range(words_per_class)]
        by_class.append(cw)
        for w in cw:
            words.append(w)
            rows.append(centroids[c] + noise * rng.standard_normal(dim))
    neutral = [f"n{i:03d}" for i in range(n_neutral)]
    for w in neutral:
        words.append(w)
        rows.append(noise * rng.standard_normal(dim))
    space = EmbeddingSpace(words, np.array(rows))
    docs, labels = [], []
    for i in range(n_docs):
        c = i % n_classes
        doc = [by_class[c][int(rng.integers(words_per_class))] for _ in range(class_words_per_doc)]
        doc += [neutral[int(rng.integers(n_neutral))] for _ in range(neutral_per_doc)]
        rng.shuffle(doc)
        docs.append(doc)
        labels.append(c)
    return space, docs, np.array(labels)
