"""Corpus ingestion, word-category document frequencies and descriptive statistics."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from meaningspace.errors import ValidationError

# Upper edges of the word-count bands used when summarising how many
# distinct words each category contains (n <= 1000, 1000 < n <= 2000, ...).
DEFAULT_BANDS = (1000, 2000, 3000, 4000, 5000)


@dataclass(frozen=True)
class TextRecord:
    id: str
    category_labels: frozenset[str]
    tokens: frozenset[str]


@dataclass(frozen=True)
class Corpus:
    texts: tuple[TextRecord, ...]
    categories: tuple[str, ...]
    vocabulary: tuple[str, ...]

    @property
    def n_texts(self) -> int:
        return len(self.texts)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FrequencyMatrix:
    """Document frequencies of words within categories.

    ``df[i, j]`` is the number of texts labeled with category ``j`` that
    contain word ``i`` at least once.
    """

    words: tuple[str, ...]
    categories: tuple[str, ...]
    df: np.ndarray
    texts_per_category: np.ndarray
    texts_with_word: np.ndarray
    total_texts: int

    def __post_init__(self):
        n_w, n_c = len(self.words), len(self.categories)
        if self.df.shape != (n_w, n_c):
            raise ValidationError(
                f"df has shape {self.df.shape}, expected ({n_w}, {n_c})")
        if self.texts_per_category.shape != (n_c,) or self.texts_with_word.shape != (n_w,):
            raise ValidationError("marginal lengths do not match the matrix")
        if len(set(self.words)) != n_w or len(set(self.categories)) != n_c:
            raise ValidationError("duplicate word or category names")
        if (self.df < 0).any():
            raise ValidationError("negative document frequency")
        if (self.df > self.texts_per_category[None, :]).any():
            bad = np.argwhere(self.df > self.texts_per_category[None, :])[0]
            raise ValidationError(
                f"df[{self.words[bad[0]]!r}, {self.categories[bad[1]]!r}] exceeds "
                "the category's text count")
        if (self.df > self.texts_with_word[:, None]).any():
            bad = np.argwhere(self.df > self.texts_with_word[:, None])[0]
            raise ValidationError(
                f"df[{self.words[bad[0]]!r}, {self.categories[bad[1]]!r}] exceeds "
                "the word's text count")
        if (self.texts_with_word > self.total_texts).any():
            raise ValidationError("texts_with_word exceeds total_texts")
        if (self.texts_per_category > self.total_texts).any():
            raise ValidationError("texts_per_category exceeds total_texts")
        if (self.texts_with_word == 0).any():
            w = self.words[int(np.argmin(self.texts_with_word))]
            raise ValidationError(f"word {w!r} occurs in no text")
        for a in (self.df, self.texts_per_category, self.texts_with_word):
            _freeze(a)

    def restrict(self, lexicon: Iterable[str]) -> "FrequencyMatrix":
        """Keep only rows for words in ``lexicon``; text counts are unchanged."""
        keep = set(lexicon)
        idx = [i for i, w in enumerate(self.words) if w in keep]
        if not idx:
            raise ValidationError("lexicon shares no words with the vocabulary")
        idx_arr = np.asarray(idx, dtype=np.intp)
        return FrequencyMatrix(
            words=tuple(self.words[i] for i in idx),
            categories=self.categories,
            df=self.df[idx_arr].copy(),
            texts_per_category=self.texts_per_category.copy(),
            texts_with_word=self.texts_with_word[idx_arr].copy(),
            total_texts=self.total_texts,
        )


def _as_record(obj, where: str) -> TextRecord:
    if isinstance(obj, TextRecord):
        rec = obj
    else:
        if not isinstance(obj, Mapping):
            raise ValidationError(f"{where}: record must be a JSON object")
        tid = obj.get("id")
        if not isinstance(tid, str) or not tid:
            raise ValidationError(f"{where}: missing or non-string id")
        cats = obj.get("categories")
        if cats is None or (isinstance(cats, list) and not cats):
            raise ValidationError(f"{where}: missing category")
        if not isinstance(cats, list) or not all(isinstance(c, str) for c in cats):
            raise ValidationError(f"{where}: categories must be an array of strings")
        toks = obj.get("tokens")
        if toks is None:
            raise ValidationError(f"{where}: missing tokens")
        if not isinstance(toks, list) or not all(isinstance(t, str) for t in toks):
            raise ValidationError(f"{where}: tokens must be an array of strings")
        rec = TextRecord(tid, frozenset(cats), frozenset(toks))
    if not rec.category_labels:
        raise ValidationError(f"{where}: missing category")
    if not rec.tokens:
        raise ValidationError(f"{where}: text {rec.id!r} has no tokens")
    return rec


def ingest(records: Iterable) -> Corpus:
    """Build a corpus from records (dicts with id/categories/tokens, or TextRecords).

    Vocabulary and categories are sorted lexicographically; those orders
    fix the row and column layout of every matrix built downstream.
    """
    texts = []
    seen: set[str] = set()
    for n, obj in enumerate(records, start=1):
        rec = _as_record(obj, f"record {n}")
        if rec.id in seen:
            raise ValidationError(f"record {n}: duplicate id {rec.id!r}")
        seen.add(rec.id)
        texts.append(rec)
    if not texts:
        raise ValidationError("empty corpus")
    categories = sorted(set().union(*(t.category_labels for t in texts)))
    vocabulary = sorted(set().union(*(t.tokens for t in texts)))
    return Corpus(tuple(texts), tuple(categories), tuple(vocabulary))


def read_jsonl(path: str | Path) -> Corpus:
    """Read a corpus stored as one JSON object per line."""
    path = Path(path)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            records.append(_as_record(obj, f"{path}:{lineno}"))
    try:
        return ingest(records)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def write_jsonl(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in corpus.texts:
            obj = {"id": t.id, "categories": sorted(t.category_labels),
                   "tokens": sorted(t.tokens)}
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def build_frequency_matrix(corpus: Corpus) -> FrequencyMatrix:
    word_index = {w: i for i, w in enumerate(corpus.vocabulary)}
    cat_index = {c: j for j, c in enumerate(corpus.categories)}
    df = np.zeros((len(corpus.vocabulary), len(corpus.categories)), dtype=np.int64)
    per_cat = np.zeros(len(corpus.categories), dtype=np.int64)
    per_word = np.zeros(len(corpus.vocabulary), dtype=np.int64)
    for t in corpus.texts:
        wi = np.fromiter((word_index[w] for w in t.tokens), dtype=np.intp)
        ci = np.fromiter((cat_index[c] for c in t.category_labels), dtype=np.intp)
        df[np.ix_(wi, ci)] += 1
        per_cat[ci] += 1
        per_word[wi] += 1
    return FrequencyMatrix(corpus.vocabulary, corpus.categories, df, per_cat,
                           per_word, corpus.n_texts)


@dataclass(frozen=True)
class WordsPerText:
    histogram: dict[int, int]
    minimum: int
    maximum: int
    mean: float
    per_text: dict[str, int] = field(repr=False, default_factory=dict)


def words_per_text_histogram(corpus: Corpus, lexicon: Iterable[str] | None = None) -> WordsPerText:
    """Count lexicon words in each text and histogram the counts.

    With ``lexicon=None`` the whole vocabulary is used.
    """
    if lexicon is None:
        per_text = {t.id: len(t.tokens) for t in corpus.texts}
    else:
        lex = frozenset(lexicon)
        if not lex:
            raise ValidationError("lexicon is empty")
        per_text = {t.id: len(t.tokens & lex) for t in corpus.texts}
    counts = list(per_text.values())
    hist = dict(sorted(Counter(counts).items()))
    return WordsPerText(hist, min(counts), max(counts), sum(counts) / len(counts), per_text)


@dataclass(frozen=True)
class Band:
    label: str
    low: float  # exclusive
    high: float  # inclusive
    count: int


def band_summary(values: Sequence[int], edges: Sequence[int] = DEFAULT_BANDS) -> list[Band]:
    """Histogram ``values`` into (-inf, e0], (e0, e1], ..., (e_last, inf)."""
    lows = [-np.inf, *edges]
    highs = [*edges, np.inf]
    v = np.asarray(values)
    out = []
    for lo, hi in zip(lows, highs):
        if lo == -np.inf:
            label = f"n<={hi}"
        elif hi == np.inf:
            label = f"n>{lo}"
        else:
            label = f"{lo}<n<={hi}"
        out.append(Band(label, lo, hi, int(((v > lo) & (v <= hi)).sum())))
    return out


def words_per_category(freq: FrequencyMatrix, edges: Sequence[int] = DEFAULT_BANDS):
    """Number of distinct words per category, plus the banded summary."""
    counts = (freq.df > 0).sum(axis=0).astype(np.int64)
    return counts, band_summary(counts, edges)


def categories_per_word(freq: FrequencyMatrix):
    """Number of categories each word occurs in, plus a histogram over that number."""
    counts = (freq.df > 0).sum(axis=1).astype(np.int64)
    hist = dict(sorted(Counter(int(c) for c in counts).items()))
    return counts, hist
