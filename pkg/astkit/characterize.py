"""
Sample characterization: token Jaccard similarity between two snippets, the
share of a text's tokens found in a snippet (ease for summaries, relevance for
queries) and interval histograms over such values.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from astkit.config import TokenizerConfig
from astkit.errors import InputError
from astkit.tokens import tokenize


@dataclass(frozen=True)
class Bin:
    low: float
    high: float
    closed_low: bool
    count: int
    mean: float

    @property
    def interval(self) -> str:
        return f"{'[' if self.closed_low else '('}{self.low:g}, {self.high:g}]"


@dataclass(frozen=True)
class Histogram:
    """Per-interval counts and means plus out-of-range tallies."""

    bins: List[Bin]
    underflow: int = 0
    overflow: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bins": [
                {"interval": b.interval, "low": b.low, "high": b.high, "count": b.count, "mean": b.mean}
                for b in self.bins
            ],
            "underflow": self.underflow,
            "overflow": self.overflow,
        }


def jaccard(code1: str, code2: str, tokenizer: Optional[TokenizerConfig] = None) -> float:
    """
    ``|T1 ∩ T2| / |T1 ∪ T2|`` over token sets.

    Raises
    ------
    InputError
        If both snippets have no tokens.
    """
    first = tokenize(code1, tokenizer).set
    second = tokenize(code2, tokenizer).set
    if not first and not second:
        raise InputError("jaccard is undefined for two empty token sets")
    return len(first & second) / len(first | second)


def overlap_ratio(text: str, code: str, tokenizer: Optional[TokenizerConfig] = None) -> float:
    """
    Share of the tokens of ``text`` that also occur in ``code``.

    Raises
    ------
    InputError
        If ``text`` has no tokens.
    """
    words = tokenize(text, tokenizer).set
    if not words:
        raise InputError("overlap ratio is undefined for a text without tokens")
    return len(words & tokenize(code, tokenizer).set) / len(words)


def bin_counts(values: Sequence[float], edges: Sequence[float]) -> Histogram:
    """
    Histogram of ``values`` over ``edges``.

    The first bin is closed ``[e0, e1]``; every later bin is ``(lo, hi]``.
    Values below ``e0`` or above the last edge are counted as underflow and
    overflow. Empty bins report a mean of 0.

    Raises
    ------
    InputError
        If edges are fewer than two or not strictly ascending.
    """
    edges_arr = np.asarray(edges, dtype=float)
    if edges_arr.size < 2 or np.any(np.diff(edges_arr) <= 0):
        raise InputError("bin edges must be at least two strictly ascending values")
    data = np.asarray(values, dtype=float)

    # side='left' puts a value equal to an edge into the bin that edge closes
    index = np.searchsorted(edges_arr, data, side="left")
    index[data == edges_arr[0]] = 1
    underflow = int(np.sum(index == 0))
    overflow = int(np.sum(index == edges_arr.size))

    bins = []
    for b in range(1, edges_arr.size):
        members = data[index == b]
        bins.append(Bin(
            low=float(edges_arr[b - 1]),
            high=float(edges_arr[b]),
            closed_low=b == 1,
            count=int(members.size),
            mean=float(members.mean()) if members.size else 0.0,
        ))
    return Histogram(bins=bins, underflow=underflow, overflow=overflow)
