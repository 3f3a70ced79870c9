import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqbench.scoring import (adjusted_mutual_information, contingency, expected_mutual_info,
                             macro_f1, mutual_info, r2)
from dqbench.tabular import DataError

import _oracles as oracle


def test_macro_f1_hand_computed():
    y = ["a", "a", "b", "b"]
    p = ["a", "b", "b", "b"]
    # a: P=1, R=.5, F1=2/3 ; b: P=2/3, R=1, F1=.8
    assert macro_f1(y, p) == pytest.approx((2 / 3 + 0.8) / 2)


def test_macro_f1_absent_prediction_scores_zero():
    assert macro_f1(["a", "b"], ["a", "a"]) == pytest.approx((2 / 3 + 0) / 2)


def test_macro_f1_ignores_classes_only_predicted():
    assert macro_f1(["a", "a"], ["a", "z"]) == pytest.approx(2 / 3)


def test_r2():
    assert r2([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0
    assert r2([1.0, 2.0, 3.0], [2.0, 2.0, 2.0]) == 0.0
    with pytest.raises(DataError):
        r2([1.0, 1.0], [1.0, 2.0])


def test_contingency_table():
    t = contingency(["x", "x", "y"], [0, 1, 1])
    assert t.tolist() == [[1, 1], [0, 1]]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=30), st.data())
def test_mutual_info_matches_oracle(a, data):
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    assert mutual_info(contingency(a, b)) == pytest.approx(oracle.mutual_info(a, b), abs=1e-12)


@pytest.mark.parametrize("a_sizes, b_sizes", [((2, 2, 1), (3, 2)), ((1, 1, 1, 1), (2, 2)),
                                             ((4, 3), (5, 1, 1)), ((2, 1), (1, 1, 1))])
def test_expected_mi_equals_permutation_average(a_sizes, b_sizes):
    a, b = oracle.labels_from_sizes(a_sizes), oracle.labels_from_sizes(b_sizes)
    assert expected_mutual_info(a_sizes, b_sizes) == pytest.approx(
        oracle.expected_mi_by_permutation(a, b), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=3, max_size=40), st.data())
def test_ami_matches_oracle(a, data):
    b = data.draw(st.lists(st.integers(0, 3), min_size=len(a), max_size=len(a)))
    ka, kb = len(set(a)), len(set(b))
    if ka == kb == 1 or ka == kb == len(a):
        return
    want = oracle.ami(a, b)
    assert adjusted_mutual_information(a, b) == pytest.approx(want, abs=1e-9)


def test_ami_special_cases():
    a = [0, 0, 1, 1, 2, 2]
    assert adjusted_mutual_information(a, a) == pytest.approx(1.0)
    assert adjusted_mutual_information(a, [5, 5, 9, 9, 7, 7]) == pytest.approx(1.0)
    assert adjusted_mutual_information(a, [0] * 6) == pytest.approx(0.0, abs=1e-12)
    assert adjusted_mutual_information([0] * 4, [1] * 4) == 1.0


def test_ami_near_zero_for_independent_labels():
    gen = np.random.default_rng(0)
    vals = [adjusted_mutual_information(gen.integers(0, 3, 500), gen.integers(0, 4, 500))
            for _ in range(10)]
    assert max(abs(v) for v in vals) < 0.05


def test_ami_matches_scikit_learn():
    metrics = pytest.importorskip("sklearn.metrics")
    gen = np.random.default_rng(1)
    for _ in range(5):
        a, b = gen.integers(0, 4, 200), gen.integers(0, 3, 200)
        b[:100] = a[:100] % 3
        want = metrics.adjusted_mutual_info_score(a, b, average_method="arithmetic")
        assert adjusted_mutual_information(a, b) == pytest.approx(want, abs=1e-9)
