"""Word-to-synset inventory, word-level KB vectors and MaxSim similarity."""
import logging

import numpy as np

from .embedspace import EmbeddingSpace, cosine
from .errors import DataError, UnknownTokenError

logger = logging.getLogger(__name__)


class SenseMap:
    """Ordered mapping of word to the synset ids that contain it."""

    def __init__(self, mapping=None):
        self._senses = {}
        for word, synsets in (mapping or {}).items():
            self.add(word, synsets)

    def add(self, word, synsets):
        synsets = list(synsets)
        if not synsets:
            raise ValueError(f"empty synset list for {word!r}")
        cur = self._senses.setdefault(word, [])
        for s in synsets:
            if s not in cur:
                cur.append(s)

    def senses(self, word):
        try:
            return tuple(self._senses[word])
        except KeyError:
            raise UnknownTokenError(word) from None

    def is_monosemous(self, word):
        return len(self._senses.get(word, ())) == 1

    def monosemous_words(self):
        return [w for w, s in self._senses.items() if len(s) == 1]

    def words(self):
        return list(self._senses)

    def __contains__(self, word):
        return word in self._senses

    def __len__(self):
        return len(self._senses)

    def __eq__(self, other):
        if not isinstance(other, SenseMap):
            return NotImplemented
        return self._senses == other._senses

    def as_dict(self):
        return {w: list(s) for w, s in self._senses.items()}


def load_sense_map(path):
    """Read ``word<TAB>synset1,synset2,...`` lines; repeated words merge."""
    smap = SenseMap()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip():
                raise DataError("expected 'word<TAB>synset,...'", path, lineno)
            synsets = [s.strip() for s in parts[1].split(",") if s.strip()]
            if not synsets:
                raise DataError("empty synset list", path, lineno)
            smap.add(parts[0].strip(), synsets)
    return smap


def save_sense_map(smap, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w, syn in smap.as_dict().items():
            fh.write(f"{w}\t{','.join(syn)}\n")


def _embedded_senses(kb_space, sense_map, word):
    senses = sense_map.senses(word)
    present = [s for s in senses if s in kb_space]
    return present, len(senses) - len(present)


def compose_word_vector(kb_space, sense_map, word):
    """Unweighted mean of the word's embedded synset vectors.

    Synsets with no vector are skipped. Raises ``UnknownTokenError`` for an
    unmapped word and ``ValueError`` when none of its synsets is embedded.
    """
    present, _ = _embedded_senses(kb_space, sense_map, word)
    if not present:
        raise ValueError(f"no embedded synsets for {word!r}")
    if len(present) == 1:
        return kb_space[present[0]].copy()
    return np.mean([kb_space[s] for s in present], axis=0)


def compose_word_space(kb_space, sense_map, words=None):
    """Word-level KB space over every mappable word of ``sense_map``."""
    out_words, rows = [], []
    skipped_words = missing_senses = 0
    for w in (sense_map.words() if words is None else words):
        present, missing = _embedded_senses(kb_space, sense_map, w)
        missing_senses += missing
        if not present:
            skipped_words += 1
            continue
        out_words.append(w)
        rows.append(compose_word_vector(kb_space, sense_map, w))
    if skipped_words or missing_senses:
        logger.info("compose: %d words without embedded synsets, %d synsets missing",
                    skipped_words, missing_senses)
    matrix = np.vstack(rows) if rows else np.zeros((0, kb_space.dim))
    return EmbeddingSpace(out_words, matrix)


def maxsim_similarity(kb_space, sense_map, w1, w2):
    """Highest cosine over all pairs of the two words' embedded synsets."""
    s1, _ = _embedded_senses(kb_space, sense_map, w1)
    s2, _ = _embedded_senses(kb_space, sense_map, w2)
    if not s1 or not s2:
        missing = w1 if not s1 else w2
        raise UnknownTokenError(missing)
    return max(cosine(kb_space[a], kb_space[b]) for a in s1 for b in s2)
