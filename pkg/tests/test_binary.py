"""
Tests for the binary-tree conversion.
"""

import pytest
from hypothesis import given, settings

from astkit.binary import GROUP_LABEL, MERGE_SEPARATOR, to_binary
from astkit.tree import build_tree, node, token_sequence
from tests.helpers import trees


class TestToBinary:
    """Tests for to_binary."""

    def test_split_wide_node(self):
        tree = build_tree(node("P", node("x"), node("y"), node("z")))
        assert to_binary(tree).structure() == (
            "P", (("x", ()), (GROUP_LABEL, (("y", ()), ("z", ())))),
        )

    def test_merge_chain(self):
        tree = build_tree(node("A", node("B", node("x"))))
        binary = to_binary(tree)
        assert len(binary) == 1
        assert binary[0].label == "A:B:x"

    def test_already_binary_unchanged(self):
        tree = build_tree(node("A", node("x"), node("y")))
        assert to_binary(tree).structure() == tree.structure()

    def test_e1(self, e1):
        # B(x) merges into one leaf, C(y, z) is already binary
        assert to_binary(e1).structure() == (
            "A", (("B:x", ()), ("C", (("y", ()), ("z", ())))),
        )

    def test_wide_group_is_split_again(self):
        tree = build_tree(node("P", *(node(f"v{i}") for i in range(5))))
        binary = to_binary(tree)
        assert all(len(n.children) in (0, 2) for n in binary.nodes)
        assert token_sequence(binary) == [f"v{i}" for i in range(5)]

    def test_input_is_not_mutated(self, e1):
        before = e1.structure()
        to_binary(e1)
        assert e1.structure() == before


class TestInvariants:
    """Arity, token preservation and idempotence on random trees."""

    @pytest.mark.slow
    @settings(max_examples=1000, deadline=None)
    @given(trees(max_nodes=200, unique=True))
    def test_invariants(self, tree):
        binary = to_binary(tree)
        assert all(len(n.children) in (0, 2) for n in binary.nodes)

        original = token_sequence(tree)
        leaves = [n.label for n in binary.nodes if not n.children]
        assert [label.split(MERGE_SEPARATOR)[-1] for label in leaves] == original
        for token in original:
            holders = [n for n in binary.nodes if token in n.label.split(MERGE_SEPARATOR)]
            assert len(holders) == 1

        assert to_binary(binary).structure() == binary.structure()
