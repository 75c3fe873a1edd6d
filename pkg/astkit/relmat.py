"""
Relationship Matrices
=====================

Sparse ancestor-descendant (``A``) and sibling (``S``) distance matrices for
tree-structured attention, indexed by preorder node id and thresholded at a
maximum distance ``P``.

Only pairs ``i < j`` with a positive distance are stored; the mirrored entry
is ``-d`` and the diagonal is 0.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from astkit.errors import InputError
from astkit.tree import AstTree

Entry = Tuple[int, int, int]


@dataclass(frozen=True)
class RelationMatrices:
    """
    Sparse relation matrices of one tree.

    Attributes
    ----------
    size : int
        Number of nodes (N)
    max_distance : int
        Threshold P
    ancestor_entries : list of (i, j, d)
        ``i`` is an ancestor of ``j`` at distance ``d``
    sibling_entries : list of (i, j, d)
        ``i`` and ``j`` share a parent, ``i`` is ``d`` positions to the left
    """

    size: int
    max_distance: int
    ancestor_entries: List[Entry]
    sibling_entries: List[Entry]

    @property
    def node_order(self) -> List[int]:
        return list(range(self.size))

    def to_dense(self, kind: str) -> np.ndarray:
        """
        Signed N×N distance matrix for ``kind`` ("A" or "S").

        Pairs without a relation within ``P`` hold ``nan``; the diagonal is 0.
        """
        entries = self._entries(kind)
        dense = np.full((self.size, self.size), np.nan)
        np.fill_diagonal(dense, 0.0)
        for i, j, d in entries:
            dense[i, j] = d
            dense[j, i] = -d
        return dense

    def delta_matrix(self, kind: str) -> np.ndarray:
        """
        Relative-position index matrix (``delta_index`` applied elementwise).

        Values lie in ``{0} ∪ [1, 2P+1]``; the diagonal maps to ``P + 1``.
        """
        dense = self.to_dense(kind)
        p = self.max_distance
        delta = np.zeros(dense.shape, dtype=np.int64)
        known = ~np.isnan(dense)
        delta[known] = dense[known].astype(np.int64) + p + 1
        return delta

    def to_coo(self) -> str:
        """COO text form: header line, then ``A``/``S`` entry lines."""
        lines = [f"# nodes={self.size} P={self.max_distance} order=preorder"]
        lines.extend(f"A {i} {j} {d}" for i, j, d in self.ancestor_entries)
        lines.extend(f"S {i} {j} {d}" for i, j, d in self.sibling_entries)
        return "\n".join(lines) + "\n"

    def _entries(self, kind: str) -> List[Entry]:
        if kind == "A":
            return self.ancestor_entries
        if kind == "S":
            return self.sibling_entries
        raise InputError(f"unknown relation kind {kind!r}; expected 'A' or 'S'")


def compute_relations(tree: AstTree, max_distance: int = 7) -> RelationMatrices:
    """
    Ancestor and sibling distances up to ``max_distance``.

    Parameters
    ----------
    tree : AstTree
    max_distance : int
        Threshold P (>= 1)

    Returns
    -------
    RelationMatrices
        Entries sorted by (i, j)

    Raises
    ------
    InputError
        If ``max_distance`` < 1.
    """
    if max_distance < 1:
        raise InputError("max_distance must be >= 1")
    parents = tree.parents

    ancestors: List[Entry] = []
    for n in tree.nodes:
        up = parents[n.id]
        d = 1
        while up >= 0 and d <= max_distance:
            ancestors.append((up, n.id, d))
            up = parents[up]
            d += 1
    ancestors.sort()

    siblings: List[Entry] = []
    for n in tree.nodes:
        kids = n.children
        for a in range(len(kids)):
            for b in range(a + 1, min(len(kids), a + max_distance + 1)):
                siblings.append((kids[a], kids[b], b - a))
    siblings.sort()

    return RelationMatrices(len(tree), max_distance, ancestors, siblings)


def delta_index(distance: Union[int, float], max_distance: int) -> int:
    """
    Map a signed distance to its embedding index.

    ``d + P + 1`` when ``-P <= d <= P``, otherwise 0 (including infinities).
    A NaN distance raises ``InputError``.

    >>> delta_index(1, 7)
    9
    >>> delta_index(-7, 7)
    1
    """
    if max_distance < 1:
        raise InputError("max_distance must be >= 1")
    if math.isnan(distance):
        raise InputError("distance must not be NaN")
    if math.isinf(distance) or abs(distance) > max_distance:
        return 0
    return int(distance) + max_distance + 1
