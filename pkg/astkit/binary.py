"""
Binary-tree conversion.

Two passes over a mutable draft of the tree:

1. top-down, a node with more than two children keeps its leftmost child and
   moves the rest under a synthetic ``<grp>`` node (which is split again if
   it still has more than two children);
2. top-down, every single-child node is merged with its child into one node
   labeled ``parent:child``.

Afterwards every node has zero or two children.
"""

from typing import List

from astkit.tree import AstTree, build_tree

GROUP_LABEL = "<grp>"
MERGE_SEPARATOR = ":"


class _Draft:
    __slots__ = ("label", "children")

    kind = None

    def __init__(self, label: str, children: List["_Draft"]):
        self.label = label
        self.children = children


def _draft(tree: AstTree) -> _Draft:
    drafts = [_Draft(n.label, []) for n in tree.nodes]
    for n in tree.nodes:
        drafts[n.id].children = [drafts[c] for c in n.children]
    return drafts[tree.root]


def to_binary(tree: AstTree) -> AstTree:
    """
    Convert ``tree`` into a binary tree.

    Parameters
    ----------
    tree : AstTree

    Returns
    -------
    AstTree
        Every node has 0 or 2 children; kinds are re-derived from shape
    """
    root = _draft(tree)

    stack = [root]
    while stack:
        current = stack.pop()
        if len(current.children) > 2:
            current.children = [current.children[0], _Draft(GROUP_LABEL, current.children[1:])]
        stack.extend(current.children)

    stack = [root]
    while stack:
        current = stack.pop()
        while len(current.children) == 1:
            only = current.children[0]
            current.label = f"{current.label}{MERGE_SEPARATOR}{only.label}"
            current.children = only.children
        stack.extend(current.children)

    return build_tree(root)
