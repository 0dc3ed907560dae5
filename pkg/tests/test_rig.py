import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from meaningspace import io
from meaningspace.corpus import FrequencyMatrix, build_frequency_matrix, ingest
from meaningspace.errors import ValidationError
from meaningspace.rig import (
    RigMatrix, build_rig_matrix, rig, top_informative_words, word_informativeness)

from oracles import random_records, rig_from_records, rig_from_table


def table_matrix(n11, n10, n01, n00):
    """One word, one category, from a 2x2 contingency table."""
    total = n11 + n10 + n01 + n00
    return FrequencyMatrix(("w",), ("c",), np.array([[n11]]), np.array([n11 + n01]),
                           np.array([n11 + n10]), total)


def test_perfect_predictor_is_one():
    assert rig(table_matrix(2, 0, 0, 2), 0, 0) == pytest.approx(1.0, abs=1e-15)


def test_word_in_every_text_is_zero():
    assert rig(table_matrix(2, 2, 0, 0), 0, 0) == 0.0


def test_ten_text_example_against_entropy_arithmetic():
    # 10 texts, 4 in the category; word in 3 of them and in 1 outside
    expected = 0.2640977750531415  # frozen from oracles.rig_from_table(3, 1, 1, 5)
    assert rig_from_table(3, 1, 1, 5) == pytest.approx(expected, abs=1e-15)
    assert rig(table_matrix(3, 1, 1, 5), 0, 0) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n_cat", [0, 10])
def test_degenerate_category_raises(n_cat):
    f = FrequencyMatrix(("w",), ("c",), np.array([[min(n_cat, 3)]]), np.array([n_cat]),
                        np.array([3]), 10)
    with pytest.raises(ValidationError, match="zero category entropy.*'c'"):
        build_rig_matrix(f)
    with pytest.raises(ValidationError, match="zero category entropy"):
        rig(f, 0, 0)


@pytest.mark.parametrize("seed", range(10))
def test_matrix_matches_per_cell_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    recs = random_records(rng, 40, 20, 5, multi_label=bool(seed % 2))
    f = build_frequency_matrix(ingest(recs))
    r = build_rig_matrix(f)
    assert r.values.shape == (len(f.words), 5)
    for i, w in enumerate(f.words):
        for j, c in enumerate(f.categories):
            expected, _ = rig_from_records(recs, w, c)
            assert abs(r.values[i, j] - expected) <= 1e-12
            assert rig(f, i, j) == pytest.approx(expected, abs=1e-12)


tables = st.tuples(*[st.integers(0, 60)] * 4).filter(
    lambda t: 0 < t[0] + t[2] < sum(t) and t[0] + t[1] > 0)


@given(tables)
def test_rig_bounded_and_zero_iff_independent(t):
    n11, n10, n01, n00 = t
    v = rig(table_matrix(*t), 0, 0)
    assert 0.0 <= v <= 1.0
    total = sum(t)
    independent = n11 * total == (n11 + n10) * (n11 + n01)
    if independent:
        assert v <= 1e-12
    else:
        assert v > 1e-12
    assert v == pytest.approx(rig_from_table(*t), abs=1e-12)


@given(tables, st.integers(2, 50))
def test_rig_invariant_under_text_duplication(t, k):
    a = rig(table_matrix(*t), 0, 0)
    b = rig(table_matrix(*(k * x for x in t)), 0, 0)
    assert b == pytest.approx(a, abs=1e-12)


def test_build_is_bitwise_deterministic(planted):
    f = build_frequency_matrix(ingest(planted))
    a = build_rig_matrix(f).values
    b = build_rig_matrix(f).values
    assert a.tobytes() == b.tobytes()


def test_rig_matrix_rejects_out_of_range():
    with pytest.raises(ValidationError, match=r"\[0, 1\]"):
        RigMatrix(("w",), ("c",), np.array([[1.5]]))


def small_rig(values, words=None, cats=None):
    values = np.asarray(values, dtype=float)
    words = words or tuple(f"w{i}" for i in range(values.shape[0]))
    cats = cats or tuple(f"c{j}" for j in range(values.shape[1]))
    return RigMatrix(tuple(words), tuple(cats), values)


def test_top_words_ties_are_lexicographic():
    r = small_rig(np.full((4, 1), 0.5), words=("d", "b", "a", "c"))
    assert [w for w, _ in top_informative_words(r, 0, 3)] == ["a", "b", "c"]
    assert len(top_informative_words(r, 0, 100)) == 4
    with pytest.raises(ValidationError):
        top_informative_words(r, 0, 0)


@pytest.mark.parametrize("seed", range(5))
def test_top_words_match_full_sort(seed):
    rng = np.random.default_rng(seed)
    r = small_rig(rng.random((30, 3)))
    for j in range(3):
        full = sorted(zip(r.words, r.values[:, j]), key=lambda p: -p[1])
        assert top_informative_words(r, j, 5) == [(w, float(v)) for w, v in full[:5]]


def test_word_informativeness():
    r = small_rig([[0, 0, 0], [0.1, 0.2, 0.3]])
    assert word_informativeness(r, 0) == 0
    assert word_informativeness(r, 1) == pytest.approx(0.6, abs=1e-15)
    rng = np.random.default_rng(3)
    r = small_rig(rng.random((5, 40)))
    for i in range(5):
        assert word_informativeness(r, i) == pytest.approx(math.fsum(r.values[i]), abs=1e-12)


def test_rig_tsv_round_trip(tmp_path, planted):
    r = build_rig_matrix(build_frequency_matrix(ingest(planted)))
    io.write_rig_tsv(r, tmp_path / "rig.tsv")
    back = io.read_rig_tsv(tmp_path / "rig.tsv")
    assert back.words == r.words and back.categories == r.categories
    assert np.abs(back.values - r.values).max() <= 1e-12 * max(1, r.values.max())
    header = (tmp_path / "rig.tsv").read_text().splitlines()[0]
    assert header == "word\t" + "\t".join(r.categories)


def test_top_words_json_layout(planted):
    r = build_rig_matrix(build_frequency_matrix(ingest(planted)))
    doc = io.top_words_json(r, 100)
    assert [d["category"] for d in doc] == list(r.categories)
    assert len(doc[0]["words"]) == 100
    assert set(doc[0]["words"][0]) == {"word", "rig"}
