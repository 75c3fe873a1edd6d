"""
Canonical AST Model
===================

Rooted, ordered, labeled trees with three node kinds:

- ``NonTerminal`` nodes for grammar constructs,
- ``Terminal`` nodes for grammar token types,
- ``Value`` leaves holding the token text of a terminal.

Node ids are dense and assigned in preorder (first visit, left to right), so a
parent always has a smaller id than any of its descendants. Trees are
immutable once built and safe to share between workers.

The module also hosts the sequence linearizations: preorder ids, level-order
(BFS) labels, structure-based traversal (SBT) and its decoder, and leaf
masking.
"""

import enum
from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from astkit.errors import InputError, TreeFormatError

MASK_TOKEN = "<mask>"
OPEN = "("
CLOSE = ")"


class NodeKind(str, enum.Enum):
    """Kind of an AST node."""

    NON_TERMINAL = "NonTerminal"
    TERMINAL = "Terminal"
    VALUE = "Value"


@dataclass(frozen=True)
class AstNode:
    """A single node; ``children`` holds node ids in source order."""

    id: int
    label: str
    kind: NodeKind
    children: Tuple[int, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children


class TreeSpec(NamedTuple):
    """Nested, id-free description of a tree, consumed by :func:`build_tree`."""

    label: str
    children: Tuple["TreeSpec", ...] = ()
    kind: Optional[NodeKind] = None


def node(label: str, *children: TreeSpec, kind: Optional[NodeKind] = None) -> TreeSpec:
    """Shorthand constructor: ``node("A", node("B", node("x")))``."""
    return TreeSpec(label, tuple(children), kind)


def infer_kind(child_count: int, children_are_leaves: bool) -> NodeKind:
    """
    Kind implied by shape alone.

    Leaves are values, nodes whose children are all leaves are terminals,
    anything else is a non-terminal.
    """
    if child_count == 0:
        return NodeKind.VALUE
    if children_are_leaves:
        return NodeKind.TERMINAL
    return NodeKind.NON_TERMINAL


# ============================================================================
# Tree
# ============================================================================

@dataclass(frozen=True)
class AstTree:
    """
    Immutable AST with preorder node ids.

    Parameters
    ----------
    nodes : tuple of AstNode
        ``nodes[i].id == i`` for every i
    root : int
        Root node id (always 0 for trees produced by this package)
    """

    nodes: Tuple[AstNode, ...]
    root: int = 0

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> AstNode:
        return self.nodes[node_id]

    @cached_property
    def parents(self) -> Tuple[int, ...]:
        """Parent id per node, ``-1`` for the root."""
        parents = [-1] * len(self.nodes)
        for n in self.nodes:
            for c in n.children:
                parents[c] = n.id
        return tuple(parents)

    @cached_property
    def depths(self) -> Tuple[int, ...]:
        """Edge distance from the root per node."""
        depths = [0] * len(self.nodes)
        # preorder ids guarantee parents are visited first
        for n in self.nodes:
            for c in n.children:
                depths[c] = depths[n.id] + 1
        return tuple(depths)

    @cached_property
    def child_index(self) -> Tuple[int, ...]:
        """Position of each node within its parent's children (root: 0)."""
        index = [0] * len(self.nodes)
        for n in self.nodes:
            for i, c in enumerate(n.children):
                index[c] = i
        return tuple(index)

    def labels(self, ids: Optional[Iterable[int]] = None) -> List[str]:
        if ids is None:
            return [n.label for n in self.nodes]
        return [self.nodes[i].label for i in ids]

    def value_leaves(self) -> List[int]:
        """Ids of Value nodes in document order."""
        return [n.id for n in self.nodes if n.kind is NodeKind.VALUE]

    def subtree(self, node_id: int) -> "AstTree":
        """Copy of the subtree rooted at ``node_id`` with ids renumbered."""
        return build_tree(_SpecView(self, node_id))

    def structure(self) -> Tuple[Any, ...]:
        """Nested ``(label, (children...))`` tuples, ignoring kinds."""
        shapes: Dict[int, Tuple[Any, ...]] = {}
        for n in reversed(self.nodes):
            shapes[n.id] = (n.label, tuple(shapes.pop(c) for c in n.children))
        return shapes[self.root]

    def validate(self) -> None:
        """
        Check the structural invariants.

        Raises
        ------
        InputError
            If ids are not dense preorder, a node has two parents, a Value
            node has children or a Terminal has a non-Value child.
        """
        if not self.nodes:
            raise InputError("tree has no nodes")
        for i, n in enumerate(self.nodes):
            if n.id != i:
                raise InputError(f"node at index {i} carries id {n.id}")
            if n.kind is NodeKind.VALUE and n.children:
                raise InputError(f"Value node {i} has children")
            if n.kind is NodeKind.TERMINAL and any(
                self.nodes[c].kind is not NodeKind.VALUE for c in n.children
            ):
                raise InputError(f"Terminal node {i} has a non-Value child")
        if self.root != 0:
            raise InputError("root must be node 0")
        if preorder_nodes(self) != list(range(len(self.nodes))):
            raise InputError("node ids are not a preorder numbering")
        seen = [0] * len(self.nodes)
        for n in self.nodes:
            for c in n.children:
                seen[c] += 1
        if seen[0] != 0 or any(count != 1 for count in seen[1:]):
            raise InputError("every non-root node must have exactly one parent")


class _SpecView:
    """Adapter exposing an existing subtree through the TreeSpec protocol."""

    __slots__ = ("_tree", "_id")

    def __init__(self, tree: AstTree, node_id: int):
        self._tree = tree
        self._id = node_id

    @property
    def label(self) -> str:
        return self._tree[self._id].label

    @property
    def kind(self) -> NodeKind:
        return self._tree[self._id].kind

    @property
    def children(self) -> List["_SpecView"]:
        return [_SpecView(self._tree, c) for c in self._tree[self._id].children]


def build_tree(root: Any) -> AstTree:
    """
    Build an :class:`AstTree` from a nested description.

    Parameters
    ----------
    root : TreeSpec or compatible
        Any object exposing ``label``, ``children`` and ``kind`` (``None``
        means "infer from shape", see :func:`infer_kind`)

    Returns
    -------
    AstTree
        Tree with preorder ids
    """
    labels: List[str] = []
    kinds: List[NodeKind] = []
    children: List[List[int]] = []
    stack = [(root, -1)]
    while stack:
        spec, parent = stack.pop()
        node_id = len(labels)
        spec_children = list(spec.children)
        kind = spec.kind
        if kind is None:
            kind = infer_kind(
                len(spec_children), all(not list(c.children) for c in spec_children)
            )
        labels.append(spec.label)
        kinds.append(NodeKind(kind))
        children.append([])
        if parent >= 0:
            children[parent].append(node_id)
        for child in reversed(spec_children):
            stack.append((child, node_id))
    nodes = tuple(
        AstNode(i, labels[i], kinds[i], tuple(children[i])) for i in range(len(labels))
    )
    return AstTree(nodes)


# ============================================================================
# Linearizations
# ============================================================================

def preorder_nodes(tree: AstTree) -> List[int]:
    """Depth-first, left-to-right visitation order starting at the root."""
    order = []
    stack = [tree.root]
    while stack:
        node_id = stack.pop()
        order.append(node_id)
        stack.extend(reversed(tree[node_id].children))
    return order


def bfs_sequence(tree: AstTree) -> List[str]:
    """Level-order labels; siblings keep their source order."""
    out = []
    queue = deque([tree.root])
    while queue:
        n = tree[queue.popleft()]
        out.append(n.label)
        queue.extend(n.children)
    return out


def sbt_encode(tree: AstTree) -> List[str]:
    """
    Structure-based traversal.

    ``SBT(n) = ( label(n) SBT(c1) ... SBT(ck) ) label(n)``; every node
    contributes exactly four tokens.
    """
    out: List[str] = []
    stack: List[Tuple[int, bool]] = [(tree.root, False)]
    while stack:
        node_id, closing = stack.pop()
        label = tree[node_id].label
        if closing:
            out.append(CLOSE)
            out.append(label)
            continue
        out.append(OPEN)
        out.append(label)
        stack.append((node_id, True))
        for c in reversed(tree[node_id].children):
            stack.append((c, False))
    return out


def sbt_decode(
    tokens: Sequence[str], kinds: Optional[Sequence[NodeKind]] = None
) -> AstTree:
    """
    Rebuild a tree from its SBT token sequence.

    The token after an opening or closing bracket is always a label, so
    labels that look like brackets decode unambiguously.

    Parameters
    ----------
    tokens : sequence of str
        Output of :func:`sbt_encode`
    kinds : sequence of NodeKind, optional
        Node kinds in preorder. When omitted, kinds are inferred from shape
        (leaves become Value).

    Returns
    -------
    AstTree

    Raises
    ------
    TreeFormatError
        On unbalanced brackets, a mismatched closing label or trailing tokens.
    """
    if not tokens:
        raise TreeFormatError("empty SBT sequence", 0)

    labels: List[str] = []
    children: List[List[int]] = []
    stack: List[int] = []
    pos = 0
    n_tokens = len(tokens)
    while pos < n_tokens:
        token = tokens[pos]
        if token == OPEN:
            if pos + 1 >= n_tokens:
                raise TreeFormatError("missing label after '('", pos + 1)
            if labels and not stack:
                raise TreeFormatError("tokens after the root was closed", pos)
            node_id = len(labels)
            labels.append(tokens[pos + 1])
            children.append([])
            if stack:
                children[stack[-1]].append(node_id)
            stack.append(node_id)
            pos += 2
        elif token == CLOSE:
            if not stack:
                raise TreeFormatError("unbalanced ')'", pos)
            if pos + 1 >= n_tokens:
                raise TreeFormatError("missing label after ')'", pos + 1)
            node_id = stack.pop()
            closing = tokens[pos + 1]
            if closing != labels[node_id]:
                raise TreeFormatError(
                    f"closing label {closing!r} does not match {labels[node_id]!r}",
                    pos + 1,
                )
            pos += 2
        else:
            raise TreeFormatError(f"expected '(' or ')', found {token!r}", pos)
    if stack:
        raise TreeFormatError("unclosed '('", n_tokens)

    if kinds is not None and len(kinds) != len(labels):
        raise InputError(f"{len(kinds)} kinds supplied for {len(labels)} nodes")
    nodes = []
    for i, label in enumerate(labels):
        if kinds is not None:
            kind = NodeKind(kinds[i])
        else:
            kind = infer_kind(len(children[i]), all(not children[c] for c in children[i]))
        nodes.append(AstNode(i, label, kind, tuple(children[i])))
    return AstTree(tuple(nodes))


def mask_leaves(tree: AstTree) -> AstTree:
    """Copy of ``tree`` with every Value label replaced by ``<mask>``."""
    nodes = tuple(
        replace(n, label=MASK_TOKEN) if n.kind is NodeKind.VALUE else n
        for n in tree.nodes
    )
    return AstTree(nodes, tree.root)


def token_sequence(tree: AstTree) -> List[str]:
    """Value labels in document order (the plain code-token view)."""
    return tree.labels(tree.value_leaves())
