import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sicgram.census import Histogram, merge
from sicgram.diagnostics import diagnostics, is_unimodal, normal_masses, raw_moments

histograms = st.dictionaries(st.integers(0, 60), st.integers(1, 10**6), min_size=1, max_size=15).map(
    lambda bins: Histogram(12, bins)
)


def expand(h):
    return [k for k, c in h.bins.items() for _ in range(c)]


def test_two_point():
    d = diagnostics(Histogram(2, {0: 1, 2: 1}))
    assert (d.total, d.mean, d.variance, d.skewness) == (2, 1.0, 1.0, 0.0)
    assert d.excess_kurtosis == pytest.approx(-2.0)


def test_degenerate():
    d = diagnostics(Histogram(5, {5: 100}))
    assert d.variance == 0.0
    assert d.skewness is None and d.excess_kurtosis is None
    assert d.fit_distance == 1.0


def test_empty():
    with pytest.raises(ValueError):
        diagnostics(Histogram(3))


def test_known_skew():
    # values 0, 0, 3: mean 1, m2 = 2, m3 = 2
    d = diagnostics(Histogram(3, {0: 2, 3: 1}))
    assert d.skewness == pytest.approx(2 / 2**1.5)


@given(histograms)
def test_moments_match_brute_force(h):
    s0, s1, s2, _, _ = raw_moments(h)
    mean = Fraction(s1, s0)
    var = Fraction(sum((k - mean) ** 2 * c for k, c in h.bins.items()), s0)
    d = diagnostics(h)
    assert d.total == h.total
    assert d.mean == float(mean)
    assert d.variance == float(var)
    assert d.variance >= 0


@given(histograms)
def test_scale_invariance(h):
    d1, d2 = diagnostics(h), diagnostics(merge(h, h))
    assert d2.total == 2 * d1.total
    assert (d2.mean, d2.variance, d2.skewness, d2.excess_kurtosis) == (
        d1.mean,
        d1.variance,
        d1.skewness,
        d1.excess_kurtosis,
    )
    assert d2.fit_distance == pytest.approx(d1.fit_distance, abs=1e-15)


@given(histograms)
def test_fit_distance_range(h):
    d = diagnostics(h)
    assert 0.0 <= d.fit_distance <= 1.0


def test_fit_distance_of_discrete_normal():
    q = normal_masses(20.0, 16.0, 40)
    h = Histogram(None, {k: round(x * 10**9) for k, x in enumerate(q)})
    assert diagnostics(h).fit_distance < 1e-5


def test_normal_masses_sum():
    assert math.fsum(normal_masses(3.3, 2.0, 9)) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "bins, expected",
    [({0: 1, 1: 3, 2: 2}, True), ({0: 3, 1: 1, 2: 3}, False), ({0: 1, 2: 1}, False), ({4: 7}, True), ({0: 5}, True)],
)
def test_unimodal(bins, expected):
    assert is_unimodal(Histogram(None, bins)) is expected
