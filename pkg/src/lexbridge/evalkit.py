"""Word-similarity evaluation and simulated rarity by corpus downsampling."""
import json
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .embedspace import cosine
from .errors import DataError, LexbridgeError
from .senses import maxsim_similarity

logger = logging.getLogger(__name__)

RARE_SUFFIX = "\u0001rare"


@dataclass
class SimilarityDataset:
    pairs: list = field(default_factory=list)

    def __post_init__(self):
        for w1, w2, score in self.pairs:
            if score != score:
                raise ValueError(f"NaN score for pair ({w1}, {w2})")

    def __len__(self):
        return len(self.pairs)

    def words(self):
        seen = {}
        for w1, w2, _ in self.pairs:
            seen.setdefault(w1, None)
            seen.setdefault(w2, None)
        return list(seen)


@dataclass
class EvalResult:
    pearson: float
    spearman: float
    covered: int
    total: int

    @property
    def skipped(self):
        return self.total - self.covered

    def as_dict(self):
        return {"pearson": self.pearson, "spearman": self.spearman,
                "covered": self.covered, "total": self.total}


class InsufficientCoverageError(LexbridgeError, ValueError):
    def __init__(self, covered, total):
        self.covered, self.total = covered, total
        super().__init__(f"fewer than 2 covered pairs (coverage {covered}/{total})")


def load_similarity_dataset(path, lowercase=True):
    """Read ``word1 word2 score`` rows separated by tabs or commas.

    A first row whose score field is not numeric is taken as a header.
    """
    pairs = []
    first = True
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            is_first, first = first, False
            sep = "\t" if "\t" in line else ","
            parts = [p.strip() for p in line.split(sep)]
            if len(parts) < 3:
                raise DataError("expected word1, word2, score", path, lineno)
            try:
                score = float(parts[2])
            except ValueError:
                if is_first:
                    continue
                raise DataError(f"non-numeric score {parts[2]!r}", path, lineno) from None
            if score != score:
                raise DataError("NaN score", path, lineno)
            w1, w2 = parts[0], parts[1]
            if lowercase:
                w1, w2 = w1.lower(), w2.lower()
            pairs.append((w1, w2, score))
    return SimilarityDataset(pairs)


def _check_pair(xs, ys):
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise ValueError("need at least 2 points")
    return x, y


def pearson(xs, ys):
    x, y = _check_pair(xs, ys)
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = np.dot(dx, dx), np.dot(dy, dy)
    if sxx == 0 or syy == 0:
        raise ValueError("zero variance")
    r = np.dot(dx, dy) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def spearman(xs, ys):
    """Pearson correlation of average (fractional) ranks."""
    x, y = _check_pair(xs, ys)
    return pearson(rankdata(x), rankdata(y))


def cosine_scorer(space):
    return lambda w1, w2: cosine(space[w1], space[w2])


def maxsim_scorer(kb_space, sense_map):
    return lambda w1, w2: maxsim_similarity(kb_space, sense_map, w1, w2)


def evaluate_similarity(similarity, dataset):
    """Correlate ``similarity(w1, w2)`` with gold scores over scorable pairs.

    ``similarity`` raises ``KeyError`` for a pair it cannot score; such pairs
    are skipped and show up as missing coverage.
    """
    gold, pred = [], []
    for w1, w2, score in dataset.pairs:
        try:
            s = similarity(w1, w2)
        except KeyError:
            continue
        gold.append(score)
        pred.append(s)
    covered, total = len(gold), len(dataset)
    if covered < 2:
        raise InsufficientCoverageError(covered, total)
    return EvalResult(pearson(pred, gold), spearman(pred, gold), covered, total)


@dataclass(frozen=True)
class RarityConfig:
    threshold: int
    target_words: frozenset
    seed: int = 42

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        object.__setattr__(self, "target_words", frozenset(self.target_words))


def rare_token(word):
    return word + RARE_SUFFIX


def downsample_sentences(sentences, config):
    """Keep at most ``threshold`` occurrences of each target word.

    For a target seen ``c > T`` times, a seeded uniform sample of ``T``
    occurrences keeps its surface form and the rest become
    :func:`rare_token`. Returns ``(sentences_out, report)``.
    """
    sentences = [s.split() if isinstance(s, str) else list(s) for s in sentences]
    targets = config.target_words
    positions = {}
    for si, sent in enumerate(sentences):
        for ti, tok in enumerate(sent):
            if tok in targets:
                positions.setdefault(tok, []).append((si, ti))
    rng = np.random.default_rng(int(config.seed) & 0xFFFFFFFFFFFFFFFF)
    T = config.threshold
    report = {}
    out = [list(s) for s in sentences]
    for word in sorted(targets):
        occ = positions.get(word, [])
        c = len(occ)
        if c > T:
            keep = np.zeros(c, dtype=bool)
            keep[rng.choice(c, size=T, replace=False)] = True
            repl = rare_token(word)
            for flag, (si, ti) in zip(keep, occ):
                if not flag:
                    out[si][ti] = repl
        report[word] = {"count": c, "kept": min(c, T), "replaced": max(0, c - T)}
    return out, report


def downsample_corpus(corpus_in, config, corpus_out):
    """File-to-file :func:`downsample_sentences`; returns the report dict."""
    with open(corpus_in, encoding="utf-8") as fh:
        lines = [line.split() for line in fh]
    out, words = downsample_sentences(lines, config)
    with open(corpus_out, "w", encoding="utf-8", newline="\n") as fh:
        for sent in out:
            fh.write(" ".join(sent))
            fh.write("\n")
    tokens = sum(len(s) for s in out)
    logger.info("downsampled %d target words over %d tokens (T=%d)",
                len(words), tokens, config.threshold)
    return {"threshold": config.threshold, "seed": config.seed, "tokens": tokens,
            "words": words}


def report_json(report):
    return json.dumps(report, sort_keys=True)


def token_counts(sentences):
    c = Counter()
    for s in sentences:
        c.update(s)
    return c
