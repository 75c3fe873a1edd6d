"""
AST Paths and Path-Contexts
===========================

A path-context is a triple ``(x_start, path, x_end)`` where the path climbs
from one Value leaf to the lowest common ancestor (LCA) of the pair and
descends to the other leaf. Paths are bounded by length (edges) and by
width (child-index gap at the LCA).

Contexts are enumerated bottom-up: every node keeps the leaves of its subtree
that are close enough to still form a path, and pairs are formed only at
their LCA. That avoids scanning all leaf pairs of large trees.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from astkit.config import PathConfig
from astkit.sexpr import escape_label
from astkit.tree import AstTree, NodeKind

logger = logging.getLogger(__name__)

UP = "up"
DOWN = "down"
_ARROWS = {UP: "^", DOWN: "_"}


@dataclass(frozen=True)
class PathContext:
    """
    One leaf-to-leaf path-context.

    Attributes
    ----------
    start_value, end_value : str
        Labels of the two Value endpoints, left leaf first
    start, end : int
        Node ids of the endpoints
    nodes : tuple of str
        Labels along the path, endpoints included (``length + 1`` items)
    directions : tuple of str
        ``"up"`` run followed by a ``"down"`` run (``length`` items)
    length : int
        Number of edges
    width : int
        Child-index gap of the two branches at the LCA
    """

    start_value: str
    end_value: str
    start: int
    end: int
    nodes: Tuple[str, ...]
    directions: Tuple[str, ...]
    length: int
    width: int

    @property
    def path(self) -> List[str]:
        """Alternating ``n1 d1 n2 ... dk nk+1`` sequence."""
        out = [self.nodes[0]]
        for direction, label in zip(self.directions, self.nodes[1:]):
            out.append(direction)
            out.append(label)
        return out

    def to_tsv(self) -> str:
        parts = [escape_label(self.nodes[0])]
        for direction, label in zip(self.directions, self.nodes[1:]):
            parts.append(_ARROWS[direction])
            parts.append(escape_label(label))
        return "\t".join(
            (escape_label(self.start_value), " ".join(parts), escape_label(self.end_value))
        )


# ============================================================================
# Extraction
# ============================================================================

def _candidate_pairs(tree: AstTree, max_length: int, max_width: int) -> List[Tuple[int, int, int, int, int, int]]:
    """All (start, end, lca, d_start, d_end, width) within the bounds."""
    reach = max_length - 1
    below: Dict[int, List[Tuple[int, int]]] = {}
    found = []
    for n in reversed(tree.nodes):
        if not n.children:
            below[n.id] = [(n.id, 0)] if n.kind is NodeKind.VALUE else []
            continue
        branches = []
        for c in n.children:
            branches.append([(leaf, d + 1) for leaf, d in below.pop(c) if d + 1 <= max_length])
        for i, left in enumerate(branches):
            if not left:
                continue
            for j in range(i + 1, min(len(branches), i + max_width + 1)):
                for leaf_a, d_a in left:
                    for leaf_b, d_b in branches[j]:
                        if d_a + d_b <= max_length:
                            found.append((leaf_a, leaf_b, n.id, d_a, d_b, j - i))
        below[n.id] = [item for branch in branches for item in branch if item[1] <= reach]
    found.sort()
    return found


def _materialize(tree: AstTree, start: int, end: int, lca: int, d_start: int, d_end: int, width: int) -> PathContext:
    parents = tree.parents
    up = [start]
    while up[-1] != lca:
        up.append(parents[up[-1]])
    down = [end]
    while down[-1] != lca:
        down.append(parents[down[-1]])
    ids = up + down[-2::-1]
    return PathContext(
        start_value=tree[start].label,
        end_value=tree[end].label,
        start=start,
        end=end,
        nodes=tuple(tree.labels(ids)),
        directions=(UP,) * d_start + (DOWN,) * d_end,
        length=d_start + d_end,
        width=width,
    )


def extract_path_contexts(tree: AstTree, config: Optional[PathConfig] = None) -> List[PathContext]:
    """
    Extract bounded path-contexts between Value leaves.

    Parameters
    ----------
    tree : AstTree
    config : PathConfig, optional

    Returns
    -------
    list of PathContext
        Ordered by (start, end). When more than ``config.max_contexts``
        contexts exist, a seeded uniform sample of that size is returned.
    """
    config = config or PathConfig()
    candidates = _candidate_pairs(tree, config.max_length, config.max_width)
    if config.max_contexts is not None and len(candidates) > config.max_contexts:
        rng = np.random.default_rng(config.sample_seed)
        keep = np.sort(rng.choice(len(candidates), size=config.max_contexts, replace=False))
        logger.debug("sampled %d of %d path contexts", config.max_contexts, len(candidates))
        candidates = [candidates[i] for i in keep]
    return [_materialize(tree, *c) for c in candidates]
