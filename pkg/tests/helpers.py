"""
Shared test helpers: hypothesis strategies and brute-force oracles.
"""

import importlib.util
from collections import deque
from itertools import combinations
from typing import Dict, List, Sequence, Set, Tuple

import networkx as nx
import pytest
from hypothesis import strategies as st

from astkit.tree import AstTree, NodeKind, build_tree, node

HAS_JAVA_GRAMMAR = (
    importlib.util.find_spec("tree_sitter") is not None
    and importlib.util.find_spec("tree_sitter_java") is not None
)

requires_java = pytest.mark.skipif(
    not HAS_JAVA_GRAMMAR, reason="tree-sitter-java is not installed"
)

# Labels that stress the serializers: brackets, the mask token, whitespace,
# escapes and non-ASCII text.
AWKWARD_LABELS = (
    "A", "B", "C", "x", "y", "z", "(", ")", "<mask>", "", "a b", "%", "%41",
    '"q"', "#T", "\\", "\\<mask>", "é", "<grp>", "if_statement", "\t",
)


# ============================================================================
# Random trees
# ============================================================================

def tree_from_parents(parents: Sequence[int], labels: Sequence[str]) -> AstTree:
    """Tree from a parent array where ``parents[i] < i`` and ``parents[0] == -1``."""
    children: List[List[int]] = [[] for _ in parents]
    for i, p in enumerate(parents):
        if p >= 0:
            children[p].append(i)
    specs = [None] * len(parents)
    for i in reversed(range(len(parents))):
        specs[i] = node(labels[i], *(specs[c] for c in children[i]))
    return build_tree(specs[0])


@st.composite
def trees(draw, max_nodes: int = 60, labels: Sequence[str] = AWKWARD_LABELS, unique: bool = False):
    """
    Random trees with shape-inferred kinds.

    Parents are drawn either uniformly or from the last few nodes, which
    mixes bushy and deep shapes. ``unique=True`` labels node ``i`` as
    ``n<i>``.
    """
    size = draw(st.integers(min_value=1, max_value=max_nodes))
    rnd = draw(st.randoms(use_true_random=False))
    parents = [-1]
    for i in range(1, size):
        window = rnd.choice((1, 3, i))
        parents.append(rnd.randrange(max(0, i - window), i))
    if unique:
        names = [f"n{i}" for i in range(size)]
    else:
        names = [rnd.choice(labels) for _ in range(size)]
    return tree_from_parents(parents, names)


@st.composite
def reachable_graphs(draw, max_nodes: int = 50):
    """Random digraphs on 0..n-1 where every node is reachable from 0."""
    size = draw(st.integers(min_value=1, max_value=max_nodes))
    rnd = draw(st.randoms(use_true_random=False))
    graph = nx.DiGraph()
    graph.add_node(0)
    for i in range(1, size):
        graph.add_edge(rnd.randrange(i), i)
    for _ in range(rnd.randrange(2 * size + 1)):
        graph.add_edge(rnd.randrange(size), rnd.randrange(size))
    return graph


# ============================================================================
# Oracles
# ============================================================================

def _ancestors(tree: AstTree, node_id: int) -> List[int]:
    """``node_id`` followed by its ancestors up to the root."""
    chain = [node_id]
    while tree.parents[chain[-1]] >= 0:
        chain.append(tree.parents[chain[-1]])
    return chain


def brute_force_contexts(tree: AstTree, max_length: int, max_width: int) -> Set[Tuple]:
    """Every bounded Value-leaf pair, checked one pair at a time."""
    leaves = [n.id for n in tree.nodes if n.kind is NodeKind.VALUE]
    found = set()
    for a, b in combinations(sorted(leaves), 2):
        up_a = _ancestors(tree, a)
        up_b = _ancestors(tree, b)
        common = set(up_b)
        lca = next(x for x in up_a if x in common)
        d_a = up_a.index(lca)
        d_b = up_b.index(lca)
        if d_a + d_b > max_length:
            continue
        width = abs(tree.child_index[up_b[d_b - 1]] - tree.child_index[up_a[d_a - 1]])
        if width > max_width:
            continue
        ids = up_a[: d_a + 1] + list(reversed(up_b[:d_b]))
        found.add((a, b, d_a + d_b, width, tuple(tree.labels(ids))))
    return found


def brute_force_relations(tree: AstTree, max_distance: int) -> Tuple[Set[Tuple], Set[Tuple]]:
    """All-pairs ancestor and sibling distances within ``max_distance``."""
    ancestors = set()
    siblings = set()
    for i, j in combinations(range(len(tree)), 2):
        chain = _ancestors(tree, j)
        if i in chain and 0 < chain.index(i) <= max_distance:
            ancestors.add((i, j, chain.index(i)))
        if tree.parents[i] == tree.parents[j] and tree.parents[i] >= 0:
            gap = tree.child_index[j] - tree.child_index[i]
            if 0 < gap <= max_distance:
                siblings.add((i, j, gap))
    return ancestors, siblings


def _reachable(graph: nx.DiGraph, entry: int, removed: int) -> Set[int]:
    if entry == removed:
        return set()
    seen = {entry}
    queue = deque([entry])
    while queue:
        current = queue.popleft()
        for nxt in graph.successors(current):
            if nxt != removed and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def brute_force_idom(graph: nx.DiGraph, entry: int) -> Dict[int, int]:
    """Immediate dominators by deleting each node and re-checking reachability."""
    nodes = list(graph.nodes)
    strict: Dict[int, Set[int]] = {v: set() for v in nodes}
    for u in nodes:
        still = _reachable(graph, entry, u)
        for v in nodes:
            if v != u and v not in still:
                strict[v].add(u)
    idom = {}
    for v in nodes:
        if v == entry:
            continue
        # dominators form a chain; the nearest one has the most dominators
        idom[v] = max(strict[v], key=lambda d: len(strict[d]))
    return idom
