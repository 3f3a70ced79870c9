import numpy as np

from dqbench.rng import derive_rng


def test_same_path_same_draws():
    a = derive_rng(3, ["pollute", "x"]).permutation(50)
    b = derive_rng(3, ["pollute", "x"]).permutation(50)
    assert np.array_equal(a, b)


def test_child_matches_explicit_path():
    parent = derive_rng(1, ["a"])
    parent.random(10)  # draws on the parent do not move its children
    assert np.array_equal(parent.child("b").random(5), derive_rng(1, ["a", "b"]).random(5))


def test_label_boundaries_are_kept_apart():
    x = derive_rng(0, ["ab"]).random(4)
    y = derive_rng(0, ["a", "b"]).random(4)
    assert not np.array_equal(x, y)


def test_seed_changes_stream():
    assert not np.array_equal(derive_rng(0, ["s"]).random(4), derive_rng(1, ["s"]).random(4))


def test_string_path_is_a_single_label():
    assert np.array_equal(derive_rng(2, "split").random(3), derive_rng(2, ["split"]).random(3))
