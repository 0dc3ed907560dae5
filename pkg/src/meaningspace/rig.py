"""Relative information gain of word presence about category membership.

For a word ``w`` and category ``c`` each text gives two binary events:
"contains w" and "is labeled c". With empirical probabilities over texts,

    RIG(w, c) = (H(C) - H(C | W)) / H(C) = I(W; C) / H(C)

which lies in [0, 1], is 0 when the events are independent and 1 when
presence of the word determines membership.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from meaningspace.corpus import FrequencyMatrix
from meaningspace.errors import ValidationError


@dataclass(frozen=True)
class RigMatrix:
    words: tuple[str, ...]
    categories: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.words), len(self.categories)):
            raise ValidationError(
                f"RIG values have shape {self.values.shape}, expected "
                f"({len(self.words)}, {len(self.categories)})")
        if not np.isfinite(self.values).all():
            raise ValidationError("RIG matrix contains non-finite values")
        if (self.values < 0).any() or (self.values > 1).any():
            raise ValidationError("RIG values must lie in [0, 1]")
        self.values.setflags(write=False)

    def category_index(self, name: str) -> int:
        try:
            return self.categories.index(name)
        except ValueError:
            raise ValidationError(f"unknown category {name!r}") from None

    def word_index(self, name: str) -> int:
        try:
            return self.words.index(name)
        except ValueError:
            raise ValidationError(f"unknown word {name!r}") from None


def _plogp_ratio(nxy, nx, ny, total):
    # (nxy/T) * log(nxy*T / (nx*ny)), with 0 log 0 := 0
    nxy = np.asarray(nxy, dtype=np.float64)
    denom = np.asarray(nx, dtype=np.float64) * np.asarray(ny, dtype=np.float64)
    pos = nxy > 0
    ratio = np.where(pos, nxy * total / np.where(pos, denom, 1.0), 1.0)
    return np.where(pos, nxy / total * np.log(ratio), 0.0)


def category_entropy(n_cat, total):
    """Binary entropy (nats) of the membership indicator; zero for degenerate categories."""
    p = np.asarray(n_cat, dtype=np.float64) / total
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
              + np.where(q > 0, q * np.log(np.where(q > 0, q, 1.0)), 0.0))
    return h


def _rig_from_counts(n_wc, n_w, n_c, total):
    n_wc = np.asarray(n_wc, dtype=np.int64)
    n_w = np.asarray(n_w, dtype=np.int64)
    n_c = np.asarray(n_c, dtype=np.int64)
    n_wnc = n_w - n_wc
    n_nwc = n_c - n_wc
    n_nwnc = total - n_w - n_c + n_wc
    if (n_nwnc < 0).any():
        raise ValidationError("inconsistent counts: more texts than the corpus holds")
    t = float(total)
    mi = (_plogp_ratio(n_wc, n_w, n_c, t)
          + _plogp_ratio(n_wnc, n_w, total - n_c, t)
          + _plogp_ratio(n_nwc, total - n_w, n_c, t)
          + _plogp_ratio(n_nwnc, total - n_w, total - n_c, t))
    h = category_entropy(n_c, t)
    return np.clip(mi / h, 0.0, 1.0)


def _check_categories(freq: FrequencyMatrix, cols) -> None:
    bad = [freq.categories[j] for j in cols
           if freq.texts_per_category[j] <= 0 or freq.texts_per_category[j] >= freq.total_texts]
    if bad:
        raise ValidationError(
            "zero category entropy (category holds all or none of the texts): "
            + ", ".join(repr(b) for b in bad))


def rig(freq: FrequencyMatrix, word: int, category: int) -> float:
    _check_categories(freq, [category])
    val = _rig_from_counts(freq.df[word, category], freq.texts_with_word[word],
                           freq.texts_per_category[category], freq.total_texts)
    return float(val)


def build_rig_matrix(freq: FrequencyMatrix) -> RigMatrix:
    _check_categories(freq, range(len(freq.categories)))
    values = _rig_from_counts(freq.df, freq.texts_with_word[:, None],
                              freq.texts_per_category[None, :], freq.total_texts)
    return RigMatrix(freq.words, freq.categories, np.ascontiguousarray(values))


def top_informative_words(rig_matrix: RigMatrix, category: int, n: int) -> list[tuple[str, float]]:
    """The ``n`` words with the largest RIG for a category, ties broken by word."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    col = rig_matrix.values[:, category]
    order = sorted(range(len(rig_matrix.words)),
                   key=lambda i: (-col[i], rig_matrix.words[i]))
    return [(rig_matrix.words[i], float(col[i])) for i in order[:n]]


def word_informativeness(rig_matrix: RigMatrix, word: int) -> float:
    return float(np.sum(rig_matrix.values[word]))
