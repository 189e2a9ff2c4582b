"""Aligning a corpus space with a KB space over shared "semantic bridge" words.

CCA is computed by whitening each (centered) view and taking the SVD of the
whitened cross-covariance. Projections of the seed rows then have identity
covariance in each view, and the i-th corpus and KB components have
correlation equal to the i-th singular value.
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .embedspace import EmbeddingSpace
from .errors import DataError

logger = logging.getLogger(__name__)

CONFLICT_POLICIES = ("corpus", "kb", "average")


@dataclass
class SeedLexicon:
    words: list
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.Y = np.asarray(self.Y, dtype=np.float64)
        if self.X.ndim != 2 or self.Y.ndim != 2:
            raise ValueError("seed matrices must be 2-D")
        if not (len(self.words) == self.X.shape[0] == self.Y.shape[0]):
            raise ValueError("seed words and matrix rows disagree")
        if len(set(self.words)) != len(self.words):
            raise ValueError("duplicate bridge words")

    @classmethod
    def from_spaces(cls, words, corpus, kb_word_space):
        words = list(words)
        X = corpus.subset(words).vectors
        Y = kb_word_space.subset(words).vectors
        return cls(words, X, Y)

    @classmethod
    def from_arrays(cls, X, Y):
        return cls([f"w{i}" for i in range(len(X))], X, Y)

    def __len__(self):
        return len(self.words)


def select_bridges(corpus, kb_word_space, sense_map, max_bridges=5000, ranking=None):
    """Monosemous words embedded in both spaces, capped at ``max_bridges``.

    With a ``ranking`` (token -> corpus frequency) the most frequent are kept,
    ties by corpus vocabulary order; otherwise the first in corpus order.
    """
    if max_bridges < 1:
        raise ValueError("max_bridges must be positive")
    candidates = [w for w in corpus.words
                  if w in kb_word_space and sense_map.is_monosemous(w)]
    if not candidates:
        raise DataError("no semantic bridges: the corpus and KB vocabularies share "
                        "no monosemous word")
    if ranking is not None:
        order = sorted(range(len(candidates)),
                       key=lambda i: (-ranking.get(candidates[i], 0), i))
        candidates = [candidates[i] for i in order]
    chosen = candidates[:max_bridges]
    logger.info("selected %d bridges", len(chosen))
    return SeedLexicon.from_spaces(chosen, corpus, kb_word_space)


@dataclass
class CcaModel:
    W_C: np.ndarray
    W_K: np.ndarray
    mean_C: np.ndarray
    mean_K: np.ndarray
    correlations: np.ndarray
    reg_C: float = 0.0
    reg_K: float = 0.0

    @property
    def k(self):
        return self.W_C.shape[1]

    @property
    def d_C(self):
        return self.W_C.shape[0]

    @property
    def d_K(self):
        return self.W_K.shape[0]

    def project_corpus(self, space):
        return project_space(space, self.W_C, self.mean_C)

    def project_kb(self, space):
        return project_space(space, self.W_K, self.mean_K)


@dataclass
class LsModel:
    """Linear map ``M`` (d_K x d_C) taking KB vectors into the corpus space."""
    M: np.ndarray
    ridge: float = 0.0
    meta: dict = field(default_factory=dict)

    def map_kb(self, space):
        if space.dim != self.M.shape[0]:
            raise ValueError(f"expected dim {self.M.shape[0]}, got {space.dim}")
        return EmbeddingSpace(space.words, space.vectors @ self.M)


def _inv_sqrt(cov, name, reg):
    vals, vecs = np.linalg.eigh(cov)
    top = vals.max() if vals.size else 0.0
    if top <= 0 or vals.min() <= 1e-12 * top:
        hint = " with regularization 0; use a positive regularization" if reg == 0 else ""
        raise np.linalg.LinAlgError(f"{name} covariance is numerically singular{hint}")
    return (vecs / np.sqrt(vals)) @ vecs.T


def fit_cca(seed, regularization="auto", n_components=None):
    """Fit CCA on a seed lexicon.

    ``regularization`` adds ``eps * I`` to each view's covariance. ``"auto"``
    uses ``1e-8 * trace(cov) / d`` per view; pass ``0`` for exact CCA.
    All ``min(d_C, d_K)`` components are kept unless ``n_components`` is set.
    """
    X, Y = seed.X, seed.Y
    m = X.shape[0]
    if m < 2:
        raise DataError(f"CCA needs at least 2 bridge words, got {m}")
    d_c, d_k = X.shape[1], Y.shape[1]
    k = min(d_c, d_k)
    if m <= k:
        warnings.warn(f"only {m} bridges for {k} components; canonical "
                      "correlations will be degenerate", RuntimeWarning, stacklevel=2)
    mean_c, mean_k = X.mean(axis=0), Y.mean(axis=0)
    Xc, Yc = X - mean_c, Y - mean_k
    cov_c = Xc.T @ Xc / (m - 1)
    cov_k = Yc.T @ Yc / (m - 1)
    cov_ck = Xc.T @ Yc / (m - 1)
    if regularization == "auto":
        eps_c = 1e-8 * np.trace(cov_c) / d_c
        eps_k = 1e-8 * np.trace(cov_k) / d_k
    else:
        eps_c = eps_k = float(regularization)
        if eps_c < 0:
            raise ValueError("regularization must be non-negative")
    cov_c[np.diag_indices(d_c)] += eps_c
    cov_k[np.diag_indices(d_k)] += eps_k
    a_c = _inv_sqrt(cov_c, "corpus", eps_c)
    a_k = _inv_sqrt(cov_k, "KB", eps_k)
    U, s, Vt = np.linalg.svd(a_c @ cov_ck @ a_k, full_matrices=False)
    if n_components is not None:
        k = min(k, int(n_components))
    U, s, V = U[:, :k], s[:k], Vt[:k].T
    # flip so the largest |entry| of each corpus-side singular vector is positive
    signs = np.sign(U[np.argmax(np.abs(U), axis=0), np.arange(k)])
    signs[signs == 0] = 1.0
    U, V = U * signs, V * signs
    return CcaModel(W_C=a_c @ U, W_K=a_k @ V, mean_C=mean_c, mean_K=mean_k,
                    correlations=s.copy(), reg_C=float(eps_c), reg_K=float(eps_k))


def fit_least_squares(seed, ridge=0.0):
    """Solve ``(Y'Y + ridge I) M = Y'X`` for the KB-to-corpus map ``M``."""
    X, Y = seed.X, seed.Y
    if X.shape[0] < 1:
        raise DataError("least squares needs at least 1 bridge word")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    A = Y.T @ Y
    A[np.diag_indices_from(A)] += ridge
    if np.linalg.cond(A) > 1e12:
        raise np.linalg.LinAlgError("normal matrix is singular; use ridge > 0")
    return LsModel(M=np.linalg.solve(A, Y.T @ X), ridge=float(ridge))


def project_space(space, projection, mean):
    W = np.asarray(projection, dtype=np.float64)
    mu = np.asarray(mean, dtype=np.float64)
    if W.shape[0] != space.dim or mu.shape != (space.dim,):
        raise ValueError(f"projection expects dim {W.shape[0]}, space has {space.dim}")
    return EmbeddingSpace(space.words, (space.vectors - mu) @ W, dim=W.shape[1])


def build_enhanced_space(corpus, kb_word_space, model, conflict="corpus"):
    """Union of the projected corpus and KB spaces.

    Vocabulary order is corpus words, then KB-only words in KB order. Words in
    both spaces take the vector chosen by ``conflict``. With an
    :class:`LsModel` the corpus vectors stay in place and KB vectors are
    mapped into the corpus space.
    """
    if conflict not in CONFLICT_POLICIES:
        raise ValueError(f"conflict must be one of {CONFLICT_POLICIES}")
    if isinstance(model, LsModel):
        pc, pk = corpus, model.map_kb(kb_word_space)
    else:
        pc, pk = model.project_corpus(corpus), model.project_kb(kb_word_space)
    words = list(pc.words)
    rows = pc.vectors.copy()
    for i, w in enumerate(words):
        j = pk.vocab.get(w)
        if j is None:
            continue
        if conflict == "kb":
            rows[i] = pk.vectors[j]
        elif conflict == "average":
            rows[i] = 0.5 * (pc.vectors[i] + pk.vectors[j])
    extra = [w for w in pk.words if w not in pc.vocab]
    if extra:
        rows = np.vstack([rows, pk.subset(extra).vectors])
        words.extend(extra)
    return EmbeddingSpace(words, rows, dim=pc.dim)


def _fmt(row):
    return " ".join(f"{x:.6e}" for x in np.ravel(row))


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if isinstance(model, CcaModel):
            fh.write("CCA1\n")
            fh.write(f"dims {model.d_C} {model.d_K} {model.k}\n")
            fh.write(f"reg {model.reg_C:.6e} {model.reg_K:.6e}\n")
            fh.write(f"mean_c {_fmt(model.mean_C)}\n")
            fh.write(f"mean_k {_fmt(model.mean_K)}\n")
            fh.write(f"correlations {_fmt(model.correlations)}\n")
            fh.write("w_c\n")
            for row in model.W_C:
                fh.write(_fmt(row) + "\n")
            fh.write("w_k\n")
            for row in model.W_K:
                fh.write(_fmt(row) + "\n")
        elif isinstance(model, LsModel):
            d_k, d_c = model.M.shape
            fh.write("LS1\n")
            fh.write(f"dims {d_k} {d_c}\n")
            fh.write(f"ridge {model.ridge:.6e}\n")
            fh.write("m\n")
            for row in model.M:
                fh.write(_fmt(row) + "\n")
        else:
            raise TypeError(f"cannot serialize {type(model).__name__}")


class _Reader:
    def __init__(self, path):
        self.path = path
        with open(path, encoding="utf-8") as fh:
            self.lines = fh.read().splitlines()
        self.pos = 0

    def next(self, tag=None):
        if self.pos >= len(self.lines):
            raise DataError("unexpected end of model file", self.path, self.pos)
        parts = self.lines[self.pos].split()
        self.pos += 1
        if tag is not None:
            if not parts or parts[0] != tag:
                raise DataError(f"expected '{tag}'", self.path, self.pos)
            parts = parts[1:]
        return parts

    def floats(self, tag=None, n=None):
        parts = self.next(tag)
        try:
            vals = np.array([float(x) for x in parts])
        except ValueError:
            raise DataError("non-numeric value", self.path, self.pos) from None
        if n is not None and len(vals) != n:
            raise DataError(f"expected {n} values, got {len(vals)}", self.path, self.pos)
        return vals

    def matrix(self, rows, cols):
        return np.vstack([self.floats(n=cols) for _ in range(rows)]).reshape(rows, cols)


def load_model(path):
    """Read a model written by :func:`save_model` (``CCA1`` or ``LS1``)."""
    r = _Reader(path)
    header = r.next()
    try:
        if header == ["CCA1"]:
            d_c, d_k, k = (int(x) for x in r.next("dims"))
            reg_c, reg_k = r.floats("reg", 2)
            mean_c = r.floats("mean_c", d_c)
            mean_k = r.floats("mean_k", d_k)
            corr = r.floats("correlations", k)
            r.next("w_c")
            W_C = r.matrix(d_c, k)
            r.next("w_k")
            W_K = r.matrix(d_k, k)
            return CcaModel(W_C, W_K, mean_c, mean_k, corr, float(reg_c), float(reg_k))
        if header == ["LS1"]:
            d_k, d_c = (int(x) for x in r.next("dims"))
            (ridge,) = r.floats("ridge", 1)
            r.next("m")
            return LsModel(r.matrix(d_k, d_c), float(ridge))
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(str(exc), path, r.pos) from None
    raise DataError("unknown model format (expected CCA1 or LS1)", path, 1)


def read_bridge_words(path):
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip() and not line.startswith("#")]


def write_bridge_words(words, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w in words:
            fh.write(w + "\n")
