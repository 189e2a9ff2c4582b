"""Skip-gram with negative sampling.

Trains on any sentence stream: random-walk corpora from :mod:`lexbridge.walker`
or whitespace-tokenized text. Training is single-threaded and deterministic
per seed; all random draws come from one numpy generator and are handed to the
kernel as uniform buffers.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass
from os import PathLike

import numpy as np

from ._accel import njit
from .embedspace import EmbeddingSpace
from .errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SgnsConfig:
    dim: int = 100
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    min_count: int = 1
    subsample: float = 0.0
    seed: int = 42
    min_lr_fraction: float = 1e-4
    chunk_tokens: int = 8192

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.min_count < 0:
            raise ValueError("min_count must be >= 0")


@njit
def _softplus(x):
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


@njit
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@njit
def pair_loss_grad(u, v, negs, n_neg, gu, gv, gn):
    """Loss of one (center, context, negatives) triple; gradients into buffers.

    loss = -log s(u.v) - sum_k log s(-u.n_k), with s the logistic function.
    """
    s = np.dot(u, v)
    loss = _softplus(-s)
    g = _sigmoid(s) - 1.0
    gu[:] = g * v
    gv[:] = g * u
    for k in range(n_neg):
        sn = np.dot(u, negs[k])
        loss += _softplus(sn)
        gk = _sigmoid(sn)
        gu += gk * negs[k]
        gn[k] = gk * u
    return loss


def sgns_loss_and_grad(center, context, negatives):
    """Loss and gradients ``(loss, d_center, d_context, d_negatives)``."""
    u = np.asarray(center, dtype=np.float64)
    v = np.asarray(context, dtype=np.float64)
    negs = np.asarray(negatives, dtype=np.float64)
    if negs.ndim == 1:
        negs = negs.reshape(-1, u.shape[0]) if negs.size else negs.reshape(0, u.shape[0])
    if u.ndim != 1 or v.shape != u.shape or negs.shape[1:] != u.shape:
        raise ValueError("center, context and negative vectors must share dimensionality")
    negs = np.ascontiguousarray(negs)
    gu = np.empty_like(u)
    gv = np.empty_like(u)
    gn = np.empty_like(negs)
    loss = pair_loss_grad(u, v, negs, negs.shape[0], gu, gv, gn)
    return float(loss), gu, gv, gn


@njit
def sgns_chunk(tokens, offsets, s_begin, s_end, w_in, w_out, cum_table, keep_prob,
               use_subsample, window, negatives, lr0, min_lr_frac, work_done,
               total_work, uniforms, sent):
    """Run SGD over sentences ``[s_begin, s_end)``; return (loss, pairs, work)."""
    dim = w_in.shape[1]
    negs = np.empty((negatives, dim), dtype=np.float64)
    neg_idx = np.empty(negatives, dtype=np.int64)
    gu = np.empty(dim, dtype=np.float64)
    gv = np.empty(dim, dtype=np.float64)
    gn = np.empty((negatives, dim), dtype=np.float64)
    table_total = cum_table[cum_table.shape[0] - 1]
    pos = 0
    loss_sum = 0.0
    pairs = 0
    for s in range(s_begin, s_end):
        a = offsets[s]
        b = offsets[s + 1]
        m = 0
        for i in range(a, b):
            t = tokens[i]
            if use_subsample:
                r = uniforms[pos]
                pos += 1
                if r > keep_prob[t]:
                    continue
            sent[m] = t
            m += 1
        lr = lr0 * max(min_lr_frac, 1.0 - work_done / total_work)
        for i in range(m):
            center = sent[i]
            reduce = int(uniforms[pos] * window)
            pos += 1
            if reduce >= window:
                reduce = window - 1
            win = window - reduce
            lo = max(0, i - win)
            hi = min(m, i + win + 1)
            for j in range(lo, hi):
                if j == i:
                    continue
                ctx = sent[j]
                n_neg = 0
                for _ in range(negatives):
                    nid = np.searchsorted(cum_table, uniforms[pos] * table_total, side="right")
                    pos += 1
                    if nid >= cum_table.shape[0]:
                        nid = cum_table.shape[0] - 1
                    if nid == ctx:
                        continue
                    neg_idx[n_neg] = nid
                    negs[n_neg] = w_out[nid]
                    n_neg += 1
                loss_sum += pair_loss_grad(w_in[center], w_out[ctx], negs, n_neg, gu, gv, gn)
                w_out[ctx] -= lr * gv
                for k in range(n_neg):
                    w_out[neg_idx[k]] -= lr * gn[k]
                w_in[center] -= lr * gu
                pairs += 1
        work_done += b - a
    return loss_sum, pairs, work_done


def _as_sentences(corpus):
    if isinstance(corpus, (str, PathLike)):
        with open(corpus, encoding="utf-8") as fh:
            return [line.split() for line in fh if line.strip()]
    return [s.split() if isinstance(s, str) else list(s) for s in corpus]


def build_vocab(sentences, min_count=1):
    """Tokens with count >= ``min_count``, by descending count then first use."""
    counts = Counter()
    for sent in sentences:
        counts.update(sent)
    # Counter preserves insertion order, so a stable sort keeps first-use ties
    items = sorted((kv for kv in counts.items() if kv[1] >= min_count),
                   key=lambda kv: -kv[1])
    return [w for w, _ in items], np.array([c for _, c in items], dtype=np.int64)


class SgnsTrainer:
    """Holds the vocabulary, both parameter matrices and per-epoch mean losses."""

    def __init__(self, config=SgnsConfig()):
        self.config = config
        self.words = []
        self.counts = np.zeros(0, dtype=np.int64)
        self.w_in = None
        self.w_out = None
        self.epoch_losses = []

    def fit(self, corpus):
        cfg = self.config
        sentences = _as_sentences(corpus)
        words, counts = build_vocab(sentences, cfg.min_count)
        if not words:
            raise ValueError("empty vocabulary after min_count filtering")
        index = {w: i for i, w in enumerate(words)}
        encoded = [[index[t] for t in s if t in index] for s in sentences]
        encoded = [s for s in encoded if s]
        offsets = np.zeros(len(encoded) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(s) for s in encoded])
        tokens = np.fromiter((t for s in encoded for t in s), dtype=np.int64, count=offsets[-1])

        rng = np.random.default_rng(int(cfg.seed) & 0xFFFFFFFFFFFFFFFF)
        V, d = len(words), cfg.dim
        self.w_in = rng.uniform(-0.5 / d, 0.5 / d, size=(V, d))
        self.w_out = np.zeros((V, d))
        self.words, self.counts = words, counts
        self.epoch_losses = []
        if cfg.epochs == 0:
            return self

        cum_table = np.cumsum(counts.astype(np.float64) ** 0.75)
        total = float(counts.sum())
        if cfg.subsample > 0:
            thresh = cfg.subsample * total
            keep = (np.sqrt(counts / thresh) + 1.0) * thresh / counts
        else:
            keep = np.ones(V)
        use_sub = cfg.subsample > 0
        lengths = np.diff(offsets)
        sent_buf = np.empty(max(int(lengths.max()), 1), dtype=np.int64)
        per_token = 1 + 2 * cfg.window * cfg.negatives + (1 if use_sub else 0)
        chunks = _chunk_sentences(lengths, cfg.chunk_tokens)
        total_work = float(cfg.epochs * offsets[-1])
        work = 0.0
        for epoch in range(cfg.epochs):
            loss_sum, pairs = 0.0, 0
            for s0, s1 in chunks:
                budget = int(lengths[s0:s1].sum()) * per_token
                uniforms = rng.random(budget)
                lr = cfg.learning_rate * max(cfg.min_lr_fraction, 1.0 - work / total_work)
                cl, cp, work = sgns_chunk(
                    tokens, offsets, s0, s1, self.w_in, self.w_out, cum_table, keep,
                    use_sub, cfg.window, cfg.negatives, cfg.learning_rate,
                    cfg.min_lr_fraction, work, total_work, uniforms, sent_buf)
                if not math.isfinite(cl) or not np.isfinite(self.w_in[:1]).all():
                    raise FloatingPointError(
                        f"non-finite SGNS loss in epoch {epoch}, sentences {s0}-{s1}, "
                        f"lr={lr:.3g}; try a smaller learning rate")
                loss_sum += cl
                pairs += cp
            mean = float(loss_sum / pairs) if pairs else 0.0
            self.epoch_losses.append(mean)
            logger.info("epoch %d: mean pair loss %.5f over %d pairs", epoch + 1, mean, pairs)
        if not np.isfinite(self.w_in).all():
            raise FloatingPointError("non-finite input vectors after training")
        return self

    def space(self):
        return EmbeddingSpace(self.words, self.w_in.copy())

    def count_table(self):
        return dict(zip(self.words, self.counts.tolist()))


def _chunk_sentences(lengths, chunk_tokens):
    chunks = []
    start, acc = 0, 0
    for i, ln in enumerate(lengths):
        acc += int(ln)
        if acc >= chunk_tokens:
            chunks.append((start, i + 1))
            start, acc = i + 1, 0
    if start < len(lengths):
        chunks.append((start, len(lengths)))
    return chunks


def train_sgns(corpus, config=SgnsConfig()):
    """Train and return the input (center) vectors as an :class:`EmbeddingSpace`."""
    return SgnsTrainer(config).fit(corpus).space()


def save_counts(counts, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w, c in counts.items():
            fh.write(f"{w} {c}\n")


def load_counts(path):
    """Read a ``token count`` frequency table."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                token, count = parts
                out[token] = int(count)
            except ValueError:
                raise DataError("expected 'token count'", path, lineno) from None
    return out
