"""Vocabulary-indexed dense vectors, word2vec text I/O and cosine queries."""
import logging

import numpy as np

from .errors import DataError, UnknownTokenError

logger = logging.getLogger(__name__)


class EmbeddingSpace:
    """An ordered vocabulary with one finite row vector per token."""

    def __init__(self, words, vectors, dim=None):
        words = list(words)
        vectors = np.asarray(vectors, dtype=np.float64)
        if not words and vectors.ndim != 2:
            vectors = vectors.reshape(0, dim or 0)
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise ValueError(
                f"need a {len(words)} x d matrix, got shape {vectors.shape}")
        if not np.isfinite(vectors).all():
            raise ValueError("embedding matrix contains non-finite values")
        vocab = {}
        for i, w in enumerate(words):
            if w in vocab:
                raise ValueError(f"duplicate token {w!r}")
            vocab[w] = i
        self.words = words
        self.vocab = vocab
        self.vectors = vectors

    @classmethod
    def from_dict(cls, mapping, dim=None):
        words = list(mapping)
        if not words:
            return cls([], np.zeros((0, dim or 0)))
        return cls(words, np.vstack([np.asarray(mapping[w], dtype=np.float64) for w in words]))

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, token):
        return token in self.vocab

    def __iter__(self):
        return iter(self.words)

    def index(self, token):
        try:
            return self.vocab[token]
        except KeyError:
            raise UnknownTokenError(token) from None

    def __getitem__(self, token):
        return self.vectors[self.index(token)]

    def get(self, token, default=None):
        i = self.vocab.get(token)
        return default if i is None else self.vectors[i]

    def subset(self, tokens):
        tokens = list(tokens)
        rows = [self.index(t) for t in tokens]
        return EmbeddingSpace(tokens, self.vectors[rows].reshape(len(rows), self.dim))

    def without(self, tokens):
        drop = set(tokens)
        keep = [w for w in self.words if w not in drop]
        return self.subset(keep)

    def __repr__(self):
        return f"EmbeddingSpace(n={len(self)}, dim={self.dim})"

    def save_text(self, path):
        save_text_format(self, path)

    def nearest_neighbors(self, query, k=10):
        return nearest_neighbors(self, query, k)


def save_text_format(space, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(space)} {space.dim}\n")
        for w, row in zip(space.words, space.vectors):
            fh.write(w)
            fh.write(" ")
            fh.write(" ".join(f"{x:.6f}" for x in row))
            fh.write("\n")


def _is_header(parts):
    if len(parts) != 2:
        return False
    try:
        int(parts[0])
        int(parts[1])
    except ValueError:
        return False
    return True


def load_text_format(path):
    """Read a word2vec text-format file.

    The ``"n d"`` header is optional. Duplicate tokens keep their first
    vector and are counted in a warning.
    """
    words, rows = [], []
    seen = set()
    duplicates = 0
    dim = None
    header_n = None
    any_line = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if not any_line:
                any_line = True
                if _is_header(parts):
                    header_n, dim = int(parts[0]), int(parts[1])
                    continue
            token, fields = parts[0], parts[1:]
            if dim is None:
                dim = len(fields)
            if len(fields) != dim:
                raise DataError(f"expected {dim} values, got {len(fields)}", path, lineno)
            try:
                vec = [float(x) for x in fields]
            except ValueError:
                raise DataError("non-numeric vector component", path, lineno) from None
            if token in seen:
                duplicates += 1
                continue
            seen.add(token)
            words.append(token)
            rows.append(vec)
    if not any_line:
        raise DataError("empty embedding file", path)
    if duplicates:
        logger.warning("%s: %d duplicate token(s) ignored", path, duplicates)
    if header_n is not None and header_n != len(words) + duplicates:
        logger.warning("%s: header says %d rows, found %d", path, header_n, len(words) + duplicates)
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    try:
        return EmbeddingSpace(words, matrix)
    except ValueError as exc:
        raise DataError(str(exc), path) from None


def cosine(u, v):
    """Cosine similarity, defined as 0 when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.sqrt(np.dot(u, u))
    nv = np.sqrt(np.dot(v, v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    # normalize before the dot so that cosine(u, v) == cosine(v, u) bit for bit
    c = float(np.dot(u / nu, v / nv))
    return min(1.0, max(-1.0, c))


def _unit_rows(matrix):
    norms = np.linalg.norm(matrix, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    return matrix / safe[:, None], norms == 0.0


def nearest_neighbors(space, query, k=10):
    """Top-``k`` ``(token, cosine)`` pairs, ties broken by vocabulary order.

    A token query is excluded from its own results.
    """
    if k < 1:
        raise ValueError("k must be positive")
    exclude = -1
    if isinstance(query, str):
        exclude = space.index(query)
        qvec = space.vectors[exclude]
    else:
        qvec = np.asarray(query, dtype=np.float64)
        if qvec.shape != (space.dim,):
            raise ValueError(f"query must have dim {space.dim}")
    units, zero = _unit_rows(space.vectors)
    qn = np.linalg.norm(qvec)
    sims = units @ (qvec / qn) if qn > 0 else np.zeros(len(space))
    sims = np.clip(sims, -1.0, 1.0)
    sims[zero] = 0.0
    order = np.lexsort((np.arange(len(space)), -sims))
    if exclude >= 0:
        order = order[order != exclude]
    return [(space.words[i], float(sims[i])) for i in order[:k]]
