"""
Tests for path-context extraction.
"""

import pytest
from hypothesis import given, settings

from astkit.config import PathConfig
from astkit.paths import DOWN, UP, extract_path_contexts
from astkit.tree import build_tree, node
from tests.helpers import brute_force_contexts, trees


def as_set(contexts):
    return {(c.start, c.end, c.length, c.width, c.nodes) for c in contexts}


class TestE1:
    """Hand-checked contexts of A(B(x), C(y, z))."""

    def test_all_contexts(self, e1):
        contexts = extract_path_contexts(e1, PathConfig(max_length=8, max_width=8, max_contexts=None))
        assert [(c.start_value, c.end_value, c.length) for c in contexts] == [
            ("x", "y", 4),
            ("x", "z", 4),
            ("y", "z", 2),
        ]
        first = contexts[0]
        assert first.nodes == ("x", "B", "A", "C", "y")
        assert first.directions == (UP, UP, DOWN, DOWN)
        assert first.path == ["x", UP, "B", UP, "A", DOWN, "C", DOWN, "y"]
        assert first.width == 1

    def test_max_length_two(self, e1):
        contexts = extract_path_contexts(e1, PathConfig(max_length=2, max_width=2, max_contexts=None))
        assert [(c.start_value, c.end_value) for c in contexts] == [("y", "z")]

    def test_zero_width_yields_nothing(self, e1):
        assert extract_path_contexts(e1, PathConfig(max_width=0, max_contexts=None)) == []

    def test_tsv(self, e1):
        contexts = extract_path_contexts(e1, PathConfig(max_contexts=None))
        assert contexts[2].to_tsv() == "y\ty ^ C _ z\tz"


class TestBounds:
    """Tests for width limits and sampling."""

    def test_width_limit(self):
        tree = build_tree(node("P", node("a"), node("b"), node("c"), node("d")))
        contexts = extract_path_contexts(tree, PathConfig(max_width=2, max_contexts=None))
        pairs = {(c.start_value, c.end_value) for c in contexts}
        assert ("a", "d") not in pairs
        assert ("a", "c") in pairs
        assert all(c.width <= 2 for c in contexts)

    def test_no_leaf_pairs(self):
        assert extract_path_contexts(build_tree(node("x"))) == []

    def test_sampling_is_seeded_and_ordered(self):
        tree = build_tree(node("P", *(node(f"v{i}") for i in range(30))))
        config = PathConfig(max_width=30, max_contexts=10, sample_seed=7)
        first = extract_path_contexts(tree, config)
        second = extract_path_contexts(tree, config)
        assert len(first) == 10
        assert first == second
        keys = [(c.start, c.end) for c in first]
        assert keys == sorted(keys)

    def test_different_seeds_differ(self):
        tree = build_tree(node("P", *(node(f"v{i}") for i in range(30))))
        a = extract_path_contexts(tree, PathConfig(max_width=30, max_contexts=10, sample_seed=1))
        b = extract_path_contexts(tree, PathConfig(max_width=30, max_contexts=10, sample_seed=2))
        assert a != b


class TestOracle:
    """Bottom-up enumeration against the pairwise brute force."""

    @pytest.mark.slow
    @pytest.mark.parametrize("max_length,max_width", [(8, 2), (3, 1), (12, 5)])
    @settings(max_examples=500, deadline=None)
    @given(tree=trees(max_nodes=200))
    def test_matches_brute_force(self, tree, max_length, max_width):
        config = PathConfig(max_length=max_length, max_width=max_width, max_contexts=None)
        assert as_set(extract_path_contexts(tree, config)) == brute_force_contexts(
            tree, max_length, max_width
        )
