"""
Tests for the s-expression and sequence line formats.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from astkit.errors import TreeFormatError
from astkit.sexpr import (
    escape_label,
    format_bfs,
    format_sbt,
    format_tokens,
    from_sexpr,
    parse_sbt,
    to_sexpr,
    tree_from_sbt,
    unescape_label,
)
from astkit.tree import MASK_TOKEN, NodeKind, build_tree, node, sbt_encode
from tests.helpers import trees


class TestLabelEscaping:
    """Tests for percent-escaping of bare labels."""

    @pytest.mark.parametrize("label", ["identifier", "if_statement", "+=", "é"])
    def test_plain_labels_unchanged(self, label):
        assert escape_label(label) == label

    def test_empty_label(self):
        assert escape_label("") == "%-"
        assert unescape_label("%-") == ""

    def test_special_characters_escaped(self):
        assert escape_label("a b") == "a%20b"
        assert escape_label("(") == "%28"
        assert escape_label("%") == "%25"

    @given(st.text(max_size=20))
    def test_escaped_label_is_one_token(self, label):
        token = escape_label(label)
        assert token
        assert not any(ch.isspace() for ch in token)
        assert unescape_label(token) == label


class TestSexpr:
    """Tests for the s-expression serializer."""

    def test_e1(self, e1):
        assert to_sexpr(e1) == '(A (B "x") (C "y" "z"))'

    def test_parse_e1(self, e1):
        assert from_sexpr('(A (B "x") (C "y" "z"))').nodes == e1.nodes

    def test_single_value(self):
        tree = from_sexpr('"lonely"')
        assert tree[0].kind is NodeKind.VALUE
        assert tree[0].label == "lonely"

    def test_kind_marker_for_childless_terminal(self):
        tree = build_tree(
            node("A", node("t", kind=NodeKind.TERMINAL), kind=NodeKind.NON_TERMINAL)
        )
        text = to_sexpr(tree)
        assert text == "(A (t #T))"
        assert from_sexpr(text).nodes == tree.nodes

    def test_quoted_escapes(self):
        tree = build_tree(node("string_literal", node('"a\\b"\n')))
        assert from_sexpr(to_sexpr(tree)).nodes == tree.nodes

    @pytest.mark.parametrize("text", [
        "",
        "(A",
        "(A))",
        '(A "x") (B "y")',
        '(A "x',
        "( )",
        '(A "\\q")',
        "x",
    ])
    def test_malformed(self, text):
        with pytest.raises(TreeFormatError):
            from_sexpr(text)

    @settings(max_examples=300, deadline=None)
    @given(trees(max_nodes=120))
    def test_round_trip(self, tree):
        assert from_sexpr(to_sexpr(tree)).nodes == tree.nodes


class TestSbtLines:
    """Tests for SBT, BFS and token lines."""

    def test_format_e1(self, e1):
        assert format_sbt(e1) == "( A ( B ( x ) x ) B ( C ( y ) y ( z ) z ) C ) A"

    def test_masked(self, e1):
        assert format_sbt(e1, masked=True) == (
            "( A ( B ( <mask> ) <mask> ) B ( C ( <mask> ) <mask> ( <mask> ) <mask> ) C ) A"
        )

    def test_literal_mask_label_is_escaped(self):
        tree = build_tree(node("A", node(MASK_TOKEN)))
        line = format_sbt(tree)
        assert "\\<mask>" in line
        assert parse_sbt(line) == sbt_encode(tree)

    def test_bad_bracket_position(self):
        with pytest.raises(TreeFormatError):
            parse_sbt("A ( B ) B")

    def test_bfs_and_tokens(self, e1):
        assert format_bfs(e1) == "A B C x y z"
        assert format_tokens(["a b", "c"]) == "a%20b c"

    @settings(max_examples=300, deadline=None)
    @given(trees(max_nodes=120))
    def test_line_round_trip(self, tree):
        assert tree_from_sbt(format_sbt(tree)).structure() == tree.structure()
