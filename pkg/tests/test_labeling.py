import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from extro.labeling import (
    EXTROVERT,
    INTROVERT,
    NEUTRAL,
    ScoreModel,
    fit_score_model,
    label_score,
)


def test_published_thresholds():
    m = ScoreModel(mu=39.03, sigma=7.55)
    assert round(m.upper, 3) == 42.805
    assert round(m.lower, 3) == 35.255


def test_fit_uses_population_std():
    m = fit_score_model([1.0, 2.0, 3.0])
    assert m.mu == 2.0
    assert m.sigma == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-15)


def test_fit_rejects_degenerate_scores():
    with pytest.raises(ValueError):
        fit_score_model([5.0])
    with pytest.raises(ValueError):
        fit_score_model([5.0, 5.0, 5.0])
    with pytest.raises(ValueError):
        ScoreModel(mu=10.0, sigma=0.0)


def test_boundary_scores_are_neutral():
    m = ScoreModel(mu=40.0, sigma=8.0)  # thresholds exactly 36 and 44
    assert m.upper == 44.0 and m.lower == 36.0
    assert label_score(44.0, m) == NEUTRAL
    assert label_score(36.0, m) == NEUTRAL
    assert label_score(44.000001, m) == EXTROVERT
    assert label_score(35.999999, m) == INTROVERT
    assert label_score(40.0, m) == NEUTRAL


def test_labels_partition_the_line():
    m = ScoreModel(mu=39.03, sigma=7.55)
    assert label_score(50.0, m) == EXTROVERT
    assert label_score(39.0, m) == NEUTRAL
    assert label_score(20.0, m) == INTROVERT


@given(
    scores=st.lists(
        st.integers(min_value=0, max_value=60), min_size=3, max_size=50
    ).filter(lambda xs: len(set(xs)) > 1),
    x=st.floats(min_value=0.0, max_value=60.0, allow_nan=False),
    y=st.floats(min_value=0.0, max_value=60.0, allow_nan=False),
)
def test_labeling_is_monotone(scores, x, y):
    m = fit_score_model([float(s) for s in scores])
    lo, hi = sorted((x, y))
    assert label_score(lo, m) <= label_score(hi, m)


def test_affine_rescaling_preserves_labels():
    """Scores shifted and scaled together keep every label, because the
    thresholds are defined relative to the fitted mean and spread."""
    scores = [28.0, 33.0, 36.5, 39.0, 41.0, 44.0, 51.0]
    m = fit_score_model(scores)
    before = [label_score(s, m) for s in scores]
    a, b = 0.5, 7.0
    shifted = [a * s + b for s in scores]
    m2 = fit_score_model(shifted)
    after = [label_score(s, m2) for s in shifted]
    assert before == after
