"""
Tree Statistics
===============

Per-tree size, depth, branching factor, unique types and unique tokens, and
their corpus-level mean/median.
"""

from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from astkit.errors import InputError
from astkit.tokens import split_subtokens
from astkit.tree import AstTree, NodeKind

METRICS = ("size", "depth", "branching", "unique_types", "unique_tokens")


@dataclass(frozen=True)
class TreeStats:
    """
    Statistics for a single tree.

    Attributes
    ----------
    size : int
        Number of nodes, Value leaves included
    depth : int
        Nodes on the longest root-to-node path (a lone root has depth 1)
    branching_factor : float
        Mean child count over non-leaf nodes, 0 for a leaf-only tree
    unique_types : int
        Distinct labels among non-leaf nodes
    unique_tokens : int
        Distinct sub-tokens among Value labels
    """

    size: int
    depth: int
    branching_factor: float
    unique_types: int
    unique_tokens: int

    def as_row(self) -> Dict[str, float]:
        return {
            "size": self.size,
            "depth": self.depth,
            "branching": self.branching_factor,
            "unique_types": self.unique_types,
            "unique_tokens": self.unique_tokens,
        }


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    median: float


@dataclass(frozen=True)
class CorpusStats:
    """Mean and median of every tree statistic over a corpus."""

    count: int
    size: MetricSummary
    depth: MetricSummary
    branching: MetricSummary
    unique_types: MetricSummary
    unique_tokens: MetricSummary

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def tree_stats(
    tree: AstTree,
    subtokenizer: Optional[Callable[[str], List[str]]] = None,
    exclude_value_children: bool = False,
) -> TreeStats:
    """
    Compute the five tree statistics.

    Parameters
    ----------
    tree : AstTree
    subtokenizer : callable, optional
        Maps a Value label to sub-tokens; defaults to :func:`split_subtokens`
    exclude_value_children : bool
        Ignore Value nodes when computing the branching factor. Terminals then
        count as leaves.

    Returns
    -------
    TreeStats
    """
    subtokenizer = subtokenizer or split_subtokens

    types = set()
    tokens = set()
    children_total = 0
    inner_nodes = 0
    for n in tree.nodes:
        if n.children:
            types.add(n.label)
        if n.kind is NodeKind.VALUE:
            tokens.update(subtokenizer(n.label))

        if exclude_value_children:
            if n.kind is NodeKind.VALUE:
                continue
            kept = sum(1 for c in n.children if tree[c].kind is not NodeKind.VALUE)
        else:
            kept = len(n.children)
        if kept:
            children_total += kept
            inner_nodes += 1

    return TreeStats(
        size=len(tree),
        depth=max(tree.depths) + 1,
        branching_factor=children_total / inner_nodes if inner_nodes else 0.0,
        unique_types=len(types),
        unique_tokens=len(tokens),
    )


def aggregate_stats(stats: Sequence[TreeStats]) -> CorpusStats:
    """
    Mean and median of each statistic.

    Raises
    ------
    InputError
        If ``stats`` is empty.
    """
    if not stats:
        raise InputError("cannot aggregate an empty list of tree statistics")
    table = np.array([list(s.as_row().values()) for s in stats], dtype=float)
    summaries = {
        name: MetricSummary(float(np.mean(table[:, i])), float(np.median(table[:, i])))
        for i, name in enumerate(METRICS)
    }
    return CorpusStats(count=len(stats), **summaries)
