import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from meaningspace.errors import ValidationError
from meaningspace.pca import fit
from meaningspace.selection import (
    SelectionParams, broken_stick, broken_stick_expectations, double_kaiser, kaiser, pca_cn,
    select_all)

_H2 = np.array([[1.0, 1.0], [1.0, -1.0]])
H8 = np.kron(np.kron(_H2, _H2), _H2)


def three_attribute_data():
    """a1 == a2, a3 uncorrelated with both: correlation [[1,1,0],[1,1,0],[0,0,1]]."""
    return np.column_stack([H8[:, 1], H8[:, 1], H8[:, 2]])


def test_kaiser_examples():
    # on a correlation matrix the threshold is trace / n = 1
    assert kaiser([2.5, 1.2, 0.8, 0.5], trace=4.0, n=4).m == 2
    assert kaiser([1.0] * 5).m == 0  # strict inequality at the boundary
    assert kaiser([1.0] * 5, strict=False).m == 5
    # without an explicit trace the spectrum's own sum is used
    assert kaiser([2.5, 1.2, 0.8, 0.5]).diagnostics["threshold"] == 1.25


spectra = st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=30).map(
    lambda xs: sorted(xs, reverse=True))


@given(spectra, st.integers(0, 29), st.floats(0, 5))
def test_kaiser_monotone_for_fixed_threshold(lam, idx, bump):
    idx = idx % len(lam)
    n = len(lam)
    before = kaiser(lam, trace=float(n), n=n).m
    raised = sorted([v + bump if i == idx else v for i, v in enumerate(lam)], reverse=True)
    assert kaiser(raised, trace=float(n), n=n).m >= before


def test_broken_stick_examples():
    b = broken_stick_expectations(3)
    assert b == pytest.approx([11 / 18, 5 / 18, 2 / 18], abs=1e-15)
    assert broken_stick([0.7, 0.2, 0.1]).m == 1
    assert broken_stick_expectations(2) == pytest.approx([0.75, 0.25], abs=1e-15)
    assert broken_stick([0.5, 0.5]).m == 0


@pytest.mark.parametrize("n", [1, 2, 7, 61, 252, 500])
def test_broken_stick_expectations_sum_to_one(n):
    b = broken_stick_expectations(n)
    assert abs(math.fsum(b) - 1.0) <= 1e-12
    assert np.all(np.diff(b) < 0)
    # direct summation of the definition
    for k in (1, n // 2 + 1, n):
        assert b[k - 1] == pytest.approx(math.fsum(1 / j for j in range(k, n + 1)) / n, abs=1e-15)


def test_broken_stick_stops_at_first_failure():
    lam = [0.62, 0.2, 0.18, 0.0]
    b = broken_stick_expectations(4)
    prop = np.array(lam) / sum(lam)
    assert prop[0] > b[0] and prop[1] < b[1]
    assert broken_stick(lam).m == 1


def test_pca_cn_examples():
    assert pca_cn([9, 3, 1, 0.5]).m == 3
    assert pca_cn([4]).m == 1
    assert pca_cn([2, 0]).m == 1
    assert pca_cn([1.0] * 6).m == 6
    with pytest.raises(ValidationError, match="all-zero"):
        pca_cn([0.0, 0.0])
    with pytest.raises(ValidationError):
        SelectionParams(condition_number=1.0)


@given(spectra, st.floats(1.01, 50), st.floats(1.01, 50))
def test_pca_cn_monotone_in_condition_number(lam, c1, c2):
    assume(lam[0] > 0)
    lo, hi = sorted((c1, c2))
    assert pca_cn(lam, SelectionParams(lo)).m <= pca_cn(lam, SelectionParams(hi)).m


def test_select_all_examples():
    k, b, c = select_all([1.0] * 7)
    assert (k.m, b.m, c.m) == (0, 0, 7)
    k, _, c = select_all([2.0, 0.0])
    assert (k.m, c.m) == (1, 1)


def test_select_all_accepts_model():
    rng = np.random.default_rng(0)
    m = fit(rng.normal(size=(50, 6)) @ rng.normal(size=(6, 6)))
    k, b, c = select_all(m)
    assert k.diagnostics["threshold"] == pytest.approx(1.0, abs=1e-12)
    assert 0 <= b.m <= 6 and 1 <= c.m <= 6


def test_spectrum_must_be_descending():
    with pytest.raises(ValidationError, match="descending"):
        kaiser([1.0, 2.0])


def test_double_kaiser_three_attribute_example():
    res = double_kaiser(three_attribute_data(), ["a1", "a2", "a3"])
    assert res.informative_attributes == ("a1", "a2")
    assert len(res.dropped) == 1 and res.iterations == 1
    d = res.dropped[0]
    assert d.name == "a3" and d.iteration == 1
    assert d.importance == pytest.approx(0.0, abs=1e-12)
    assert d.threshold == pytest.approx(1 / math.sqrt(3))
    assert res.last_importance["a1"] == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_double_kaiser_identity_keeps_everything():
    res = double_kaiser(H8[:, 1:6], list("abcde"))
    assert res.no_informative_pcs
    assert res.informative_attributes == tuple("abcde") and not res.dropped


def test_double_kaiser_ties_drop_lexicographically_first():
    # b and c are both isolated with importance 0; b goes first
    x = np.column_stack([H8[:, 1], H8[:, 1], H8[:, 1], H8[:, 2], H8[:, 3]])
    res = double_kaiser(x, ["a1", "a2", "a3", "c", "b"])
    assert [d.name for d in res.dropped] == ["b", "c"]


def test_double_kaiser_argument_checks():
    with pytest.raises(ValidationError):
        double_kaiser(np.ones((4, 1)), ["a"])
    with pytest.raises(ValidationError):
        double_kaiser(np.ones((4, 2)), ["a"])


@pytest.mark.parametrize("seed", range(20))
def test_double_kaiser_terminates_and_is_a_fixed_point(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    x = rng.normal(size=(40, n)) @ rng.normal(size=(n, n)) * rng.random(n)
    names = [f"v{j}" for j in range(n)]
    res = double_kaiser(x, names)
    assert res.iterations <= n - 1
    assert set(res.informative_attributes) | {d.name for d in res.dropped} == set(names)
    for d in res.dropped:
        assert d.importance < d.threshold
    keep = [names.index(a) for a in res.informative_attributes]
    again = double_kaiser(x[:, keep], list(res.informative_attributes))
    assert not again.dropped
    assert again.informative_attributes == res.informative_attributes
