"""
Evaluation Metrics
==================

Reference implementations of the task metrics:

- clone detection: precision/recall/F1 and the decision-threshold sweep,
- code search: SR@k and MRR (plus FRank derivation from a similarity matrix),
- summarization: BLEU-4 (scored by nltk), METEOR and ROUGE-L over token lists.

Every metric returns 0 where its denominator would be zero.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from nltk.translate.bleu_score import SmoothingFunction, modified_precision, sentence_bleu
from nltk.translate.bleu_score import corpus_bleu as nltk_corpus_bleu

from astkit.errors import InputError

logger = logging.getLogger(__name__)

THRESHOLD_GRID = np.arange(1, 100) / 100
BLEU_ORDER = 4
METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5
ROUGE_BETA = 1.2
# Upper bound on memoized alignment states before falling back to greedy.
_METEOR_STATE_LIMIT = 200_000


# ============================================================================
# Runs
# ============================================================================

@dataclass(frozen=True)
class ClassifierRun:
    """Per-pair clone scores with gold labels."""

    ids: Tuple[str, ...]
    scores: Tuple[float, ...]
    labels: Tuple[int, ...]

    def __post_init__(self):
        if not (len(self.ids) == len(self.scores) == len(self.labels)):
            raise InputError("ids, scores and labels must have equal lengths")
        if len(set(self.ids)) != len(self.ids):
            raise InputError("classifier run ids must be unique")
        if any(not 0.0 <= s <= 1.0 for s in self.scores):
            raise InputError("scores must lie in [0, 1]")
        if any(label not in (0, 1) for label in self.labels):
            raise InputError("labels must be 0 or 1")


@dataclass(frozen=True)
class RankedRun:
    """Per-query rank of the ground-truth result (FRank)."""

    ids: Tuple[str, ...]
    ranks: Tuple[int, ...]

    def __post_init__(self):
        if len(self.ids) != len(self.ranks):
            raise InputError("ids and ranks must have equal lengths")
        if any(r < 1 for r in self.ranks):
            raise InputError("ranks must be >= 1")


class PrecisionRecallF1(NamedTuple):
    precision: float
    recall: float
    f1: float


# ============================================================================
# Clone detection
# ============================================================================

def precision_recall_f1(predictions: Sequence[int], labels: Sequence[int]) -> PrecisionRecallF1:
    """
    Precision, recall and F1 of binary predictions.

    Raises
    ------
    InputError
        If the two sequences differ in length.
    """
    if len(predictions) != len(labels):
        raise InputError(
            f"{len(predictions)} predictions for {len(labels)} labels"
        )
    pred = np.asarray(predictions, dtype=bool)
    gold = np.asarray(labels, dtype=bool)
    tp = int(np.sum(pred & gold))
    fp = int(np.sum(pred & ~gold))
    fn = int(np.sum(~pred & gold))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrecisionRecallF1(precision, recall, f1)


def predict(scores: Sequence[float], threshold: float, strict: bool = False) -> np.ndarray:
    values = np.asarray(scores, dtype=float)
    return values > threshold if strict else values >= threshold


def sweep_threshold(run: ClassifierRun, strict: bool = False) -> Tuple[float, float]:
    """
    Best decision threshold on the 0.01..0.99 grid.

    By default a pair is a clone when ``score >= δ``. The threshold rule
    usually published for this sweep is the strict ``score > δ``; pass
    ``strict=True`` to reproduce it. The two rules pick different δ*
    whenever a score sits on a grid point, and the reported δ* is only
    comparable to numbers produced under the same rule.

    Parameters
    ----------
    run : ClassifierRun
    strict : bool
        Predict a clone when ``score > δ`` instead of ``score >= δ``

    Returns
    -------
    tuple
        (δ*, F1*); ties go to the smallest δ
    """
    if not run.ids:
        raise InputError("cannot sweep an empty run")
    f1s = [precision_recall_f1(predict(run.scores, delta, strict), run.labels).f1 for delta in THRESHOLD_GRID]
    best = int(np.argmax(f1s))
    return float(THRESHOLD_GRID[best]), float(f1s[best])


# ============================================================================
# Code search
# ============================================================================

def success_rate_at_k(run: RankedRun, k: int) -> float:
    """Fraction of queries whose ground truth ranks within the top ``k``."""
    if k < 1:
        raise InputError("k must be >= 1")
    if not run.ranks:
        raise InputError("cannot score an empty ranked run")
    return float(np.mean(np.asarray(run.ranks) <= k))


def mrr(run: RankedRun) -> float:
    """Mean reciprocal rank."""
    if not run.ranks:
        raise InputError("cannot score an empty ranked run")
    return float(np.mean(1.0 / np.asarray(run.ranks, dtype=float)))


def first_ranks(similarity: np.ndarray) -> List[int]:
    """
    FRank per query from a query × candidate similarity matrix.

    The correct candidate of query ``i`` is column ``i``. Candidates scoring
    the same as the correct one are ranked ahead of it.
    """
    sim = np.asarray(similarity, dtype=float)
    if sim.ndim != 2 or sim.shape[0] > sim.shape[1]:
        raise InputError("similarity must be a queries x candidates matrix with a gold column per query")
    gold = sim[np.arange(sim.shape[0]), np.arange(sim.shape[0])]
    ahead = (sim >= gold[:, None]).sum(axis=1) - 1
    return [int(r) + 1 for r in ahead]


# ============================================================================
# Summarization
# ============================================================================

_SMOOTHING = SmoothingFunction()
_BLEU_WEIGHTS = (1.0 / BLEU_ORDER,) * BLEU_ORDER


def _precision_counts(candidate: Sequence[str], reference: Sequence[str]) -> List[int]:
    """Clipped n-gram match counts for n = 1..4."""
    return [
        modified_precision([list(reference)], list(candidate), n).numerator
        for n in range(1, BLEU_ORDER + 1)
    ]


def _check_reference(reference: Sequence[str]) -> None:
    if not reference:
        raise InputError("reference must not be empty")


def bleu(candidate: Sequence[str], reference: Sequence[str], smooth: bool = False) -> float:
    """
    Sentence-level BLEU-4 with brevity penalty.

    Parameters
    ----------
    candidate, reference : sequence of str
    smooth : bool
        Add one to numerator and denominator of the 2..4-gram precisions
        (nltk ``SmoothingFunction().method2``)

    Returns
    -------
    float
        0 for an empty candidate, or when a precision is zero without
        smoothing
    """
    _check_reference(reference)
    if not candidate:
        return 0.0
    if not smooth and 0 in _precision_counts(candidate, reference):
        return 0.0
    return float(sentence_bleu(
        [list(reference)],
        list(candidate),
        weights=_BLEU_WEIGHTS,
        smoothing_function=_SMOOTHING.method2 if smooth else _SMOOTHING.method0,
    ))


def corpus_bleu(candidates: Sequence[Sequence[str]], references: Sequence[Sequence[str]], smooth: bool = False) -> float:
    """BLEU-4 over pooled n-gram counts and lengths of the whole corpus."""
    if len(candidates) != len(references):
        raise InputError("candidates and references must pair up")
    if not references:
        raise InputError("cannot score an empty corpus")
    pooled = [0] * BLEU_ORDER
    for candidate, reference in zip(candidates, references):
        _check_reference(reference)
        pooled = [a + b for a, b in zip(pooled, _precision_counts(candidate, reference))]
    if pooled[0] == 0 or (not smooth and 0 in pooled):
        return 0.0
    return float(nltk_corpus_bleu(
        [[list(r)] for r in references],
        [list(c) for c in candidates],
        weights=_BLEU_WEIGHTS,
        smoothing_function=_SMOOTHING.method2 if smooth else _SMOOTHING.method0,
    ))


def _greedy_alignment(candidate: Sequence[str], reference: Sequence[str]) -> List[Tuple[int, int]]:
    """Repeatedly align the longest common run of unaligned positions."""
    used_c: set = set()
    used_r: set = set()
    pairs: List[Tuple[int, int]] = []
    while True:
        best = (0, -1, -1)
        for i in range(len(candidate)):
            for j in range(len(reference)):
                k = 0
                while (i + k < len(candidate) and j + k < len(reference)
                       and i + k not in used_c and j + k not in used_r
                       and candidate[i + k] == reference[j + k]):
                    k += 1
                if k > best[0]:
                    best = (k, i, j)
        length, i, j = best
        if length == 0:
            return sorted(pairs)
        for k in range(length):
            used_c.add(i + k)
            used_r.add(j + k)
            pairs.append((i + k, j + k))


def _count_chunks(pairs: Sequence[Tuple[int, int]]) -> int:
    chunks = 0
    previous: Optional[Tuple[int, int]] = None
    for i, j in sorted(pairs):
        if previous is None or i != previous[0] + 1 or j != previous[1] + 1:
            chunks += 1
        previous = (i, j)
    return chunks


def _meteor_alignment(candidate: Sequence[str], reference: Sequence[str]) -> Tuple[int, int]:
    """(matches, chunks) of a maximal exact alignment with the fewest chunks."""
    positions: Dict[str, List[int]] = {}
    for j, token in enumerate(reference):
        positions.setdefault(token, []).append(j)
    remaining_after = [0] * len(candidate)
    seen: Counter = Counter()
    for i in range(len(candidate) - 1, -1, -1):
        remaining_after[i] = seen[candidate[i]]
        seen[candidate[i]] += 1
    matches = sum(min(count, len(positions.get(token, ()))) for token, count in Counter(candidate).items())
    if matches == 0:
        return 0, 0

    memo: Dict[Tuple[int, int, int], int] = {}

    class _TooLarge(Exception):
        pass

    def best(i: int, prev: int, used: int) -> int:
        if i == len(candidate):
            return 0
        key = (i, prev, used)
        if key in memo:
            return memo[key]
        if len(memo) > _METEOR_STATE_LIMIT:
            raise _TooLarge
        token = candidate[i]
        free = [j for j in positions.get(token, ()) if not used >> j & 1]
        result = math.inf
        if len(free) <= remaining_after[i]:
            result = best(i + 1, -1, used)
        for j in free:
            cost = 0 if prev >= 0 and j == prev + 1 else 1
            result = min(result, cost + best(i + 1, j, used | 1 << j))
        memo[key] = result
        return result

    if len(candidate) < 300:
        try:
            return matches, int(best(0, -1, 0))
        except _TooLarge:
            logger.debug("alignment search too large; using greedy alignment")
    pairs = _greedy_alignment(candidate, reference)
    return len(pairs), _count_chunks(pairs)


def meteor(
    candidate: Sequence[str],
    reference: Sequence[str],
    alpha: float = METEOR_ALPHA,
    beta: float = METEOR_BETA,
    gamma: float = METEOR_GAMMA,
) -> float:
    """
    METEOR with exact unigram matching.

    ``F = P·R / (α·P + (1-α)·R)``, ``penalty = γ·(chunks/m)^β`` and
    ``score = (1 - penalty)·F``. Identical inputs still carry the one-chunk
    penalty, so the score is below 1.
    """
    if not reference:
        raise InputError("reference must not be empty")
    if not candidate:
        return 0.0
    matched, chunks = _meteor_alignment(candidate, reference)
    if matched == 0:
        return 0.0
    precision = matched / len(candidate)
    recall = matched / len(reference)
    fmean = precision * recall / (alpha * precision + (1 - alpha) * recall)
    penalty = gamma * (chunks / matched) ** beta
    return (1 - penalty) * fmean


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            current.append(previous[j - 1] + 1 if x == y else max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str], beta: float = ROUGE_BETA) -> float:
    """LCS-based F-measure weighted towards recall by ``beta``."""
    if not reference:
        raise InputError("reference must not be empty")
    lcs = lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return (1 + beta ** 2) * precision * recall / (recall + beta ** 2 * precision)
