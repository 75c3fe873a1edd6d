"""
Tree interchange and line formats.

- s-expressions: one tree per line, ``(LABEL child ...)``; Value leaves are
  double-quoted strings with backslash escapes, Terminals render as
  ``(LABEL "value")``.
- SBT lines: SBT tokens joined by single spaces.
- BFS lines and path-context TSV lines.

Bare labels are percent-escaped (``%``, whitespace, brackets, quote, ``#``
and backslash), so every label survives a round-trip. The empty label is
written ``%-``. A node whose kind differs from the one implied by its shape
carries an explicit ``#T`` / ``#N`` marker after its label.
"""

from typing import List, Optional, Tuple
from urllib.parse import unquote

from astkit.errors import InputError, TreeFormatError
from astkit.tree import (
    CLOSE,
    MASK_TOKEN,
    OPEN,
    AstNode,
    AstTree,
    NodeKind,
    bfs_sequence,
    sbt_decode,
    sbt_encode,
)

EMPTY_LABEL = "%-"
ESCAPED_MASK = "\\" + MASK_TOKEN
_SPECIAL = set('%()"#\\')
_QUOTE_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_QUOTE_UNESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r", "t": "\t"}
_KIND_MARKERS = {NodeKind.TERMINAL: "#T", NodeKind.NON_TERMINAL: "#N"}


# ============================================================================
# Label escaping
# ============================================================================

def escape_label(label: str) -> str:
    """Percent-escape a label so it forms a single whitespace-free token."""
    if label == "":
        return EMPTY_LABEL
    if not any(ch in _SPECIAL or ch.isspace() for ch in label):
        return label
    return "".join(
        "".join(f"%{b:02X}" for b in ch.encode("utf-8"))
        if ch in _SPECIAL or ch.isspace()
        else ch
        for ch in label
    )


def unescape_label(token: str) -> str:
    if token == EMPTY_LABEL:
        return ""
    return unquote(token, errors="strict")


def quote_value(text: str) -> str:
    return '"' + "".join(_QUOTE_ESCAPES.get(ch, ch) for ch in text) + '"'


# ============================================================================
# s-expressions
# ============================================================================

def _implied_kind(tree: AstTree, n: AstNode) -> NodeKind:
    if n.children and all(tree[c].kind is NodeKind.VALUE for c in n.children):
        return NodeKind.TERMINAL
    return NodeKind.NON_TERMINAL


def to_sexpr(tree: AstTree) -> str:
    """Serialize a tree to a single-line s-expression."""
    parts: List[str] = []
    stack: List[Tuple[int, bool]] = [(tree.root, False)]
    while stack:
        node_id, closing = stack.pop()
        if closing:
            parts.append(")")
            continue
        n = tree[node_id]
        if parts and parts[-1] != "(":
            parts.append(" ")
        if n.kind is NodeKind.VALUE:
            if n.children:
                raise InputError(f"Value node {node_id} has children")
            parts.append(quote_value(n.label))
            continue
        parts.append("(")
        parts.append(escape_label(n.label))
        if n.kind is not _implied_kind(tree, n):
            parts.append(" " + _KIND_MARKERS[n.kind])
        stack.append((node_id, True))
        for c in reversed(n.children):
            stack.append((c, False))
    return "".join(parts)


def _read_quoted(text: str, pos: int) -> Tuple[str, int]:
    out = []
    i = pos + 1
    while i < len(text):
        ch = text[i]
        if ch == '"':
            return "".join(out), i + 1
        if ch == "\\":
            if i + 1 >= len(text) or text[i + 1] not in _QUOTE_UNESCAPES:
                raise TreeFormatError("bad escape in quoted value", i)
            out.append(_QUOTE_UNESCAPES[text[i + 1]])
            i += 2
            continue
        out.append(ch)
        i += 1
    raise TreeFormatError("unterminated quoted value", pos)


def _read_atom(text: str, pos: int) -> Tuple[str, int]:
    end = pos
    while end < len(text) and not text[end].isspace() and text[end] not in '()"':
        end += 1
    return text[pos:end], end


def from_sexpr(text: str) -> AstTree:
    """
    Parse a single-tree s-expression.

    Raises
    ------
    TreeFormatError
        With the character offset of the first problem.
    """
    labels: List[str] = []
    kinds: List[Optional[NodeKind]] = []
    children: List[List[int]] = []
    stack: List[int] = []
    finished = False
    pos = 0
    length = len(text)

    def add(label: str, kind: Optional[NodeKind], at: int) -> int:
        if finished or (labels and not stack):
            raise TreeFormatError("content after the root expression", at)
        node_id = len(labels)
        labels.append(label)
        kinds.append(kind)
        children.append([])
        if stack:
            children[stack[-1]].append(node_id)
        return node_id

    while pos < length:
        ch = text[pos]
        if ch.isspace():
            pos += 1
        elif ch == "(":
            pos += 1
            atom, end = _read_atom(text, pos)
            if not atom:
                raise TreeFormatError("expected a label after '('", pos)
            try:
                label = unescape_label(atom)
            except UnicodeDecodeError as exc:
                raise TreeFormatError(f"bad percent escape in {atom!r}", pos) from exc
            stack.append(add(label, None, pos))
            pos = end
            while pos < length and text[pos] == " ":
                pos += 1
            if text.startswith("#T", pos) or text.startswith("#N", pos):
                kinds[stack[-1]] = NodeKind.TERMINAL if text[pos + 1] == "T" else NodeKind.NON_TERMINAL
                pos += 2
        elif ch == ")":
            if not stack:
                raise TreeFormatError("unbalanced ')'", pos)
            stack.pop()
            if not stack:
                finished = True
            pos += 1
        elif ch == '"':
            value, end = _read_quoted(text, pos)
            add(value, NodeKind.VALUE, pos)
            if not stack:
                finished = True
            pos = end
        else:
            raise TreeFormatError(f"unexpected character {ch!r}", pos)
    if stack:
        raise TreeFormatError("unclosed '('", length)
    if not labels:
        raise TreeFormatError("empty s-expression", 0)

    nodes = []
    for i, label in enumerate(labels):
        kind = kinds[i]
        if kind is None:
            kind = (
                NodeKind.TERMINAL
                if children[i] and all(kinds[c] is NodeKind.VALUE for c in children[i])
                else NodeKind.NON_TERMINAL
            )
        nodes.append(AstNode(i, label, kind, tuple(children[i])))
    return AstTree(tuple(nodes))


# ============================================================================
# Sequence lines
# ============================================================================

def _sbt_label(label: str) -> str:
    token = escape_label(label)
    return ESCAPED_MASK if token == MASK_TOKEN else token


def format_sbt(tree: AstTree, masked: bool = False) -> str:
    """
    Render the SBT of ``tree`` as one line.

    A literal ``<mask>`` label is written ``\\<mask>``; a bare ``<mask>``
    only ever stands for a masked Value leaf (``masked=True``).
    """
    tokens = sbt_encode(tree)
    kinds_in_order = _sbt_kinds(tree)
    out = []
    for i, token in enumerate(tokens):
        if i % 2 == 0:
            out.append(token)
        elif masked and kinds_in_order[i // 2] is NodeKind.VALUE:
            out.append(MASK_TOKEN)
        else:
            out.append(_sbt_label(token))
    return " ".join(out)


def _sbt_kinds(tree: AstTree) -> List[NodeKind]:
    """Node kind for each (bracket, label) pair emitted by ``sbt_encode``."""
    kinds: List[NodeKind] = []
    stack: List[Tuple[int, bool]] = [(tree.root, False)]
    while stack:
        node_id, closing = stack.pop()
        kinds.append(tree[node_id].kind)
        if closing:
            continue
        stack.append((node_id, True))
        for c in reversed(tree[node_id].children):
            stack.append((c, False))
    return kinds


def parse_sbt(line: str) -> List[str]:
    """Split an SBT line back into in-memory tokens."""
    tokens = line.split(" ")
    out = []
    for i, token in enumerate(tokens):
        if i % 2 == 0:
            if token not in (OPEN, CLOSE):
                raise TreeFormatError(f"expected bracket, found {token!r}", i)
            out.append(token)
        elif token == ESCAPED_MASK:
            out.append(MASK_TOKEN)
        else:
            out.append(unescape_label(token))
    return out


def tree_from_sbt(line: str) -> AstTree:
    return sbt_decode(parse_sbt(line))


def format_bfs(tree: AstTree) -> str:
    return " ".join(escape_label(label) for label in bfs_sequence(tree))


def format_tokens(labels: List[str]) -> str:
    return " ".join(escape_label(label) for label in labels)
