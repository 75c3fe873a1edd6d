"""
Run Comparison
==============

Contrasts two runs over the same sample ids: Venn-style overlap counts for
binary outcomes, per-sample winner counts for real-valued outcomes, and
interval histograms of a characterization value (for example Jaccard
similarity) split by outcome.
"""

from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

from astkit.characterize import Histogram, bin_counts
from astkit.errors import InputError


@dataclass(frozen=True)
class ComparisonReport:
    """
    Outcome of :func:`compare_runs`.

    ``counts`` holds ``both``/``only_a``/``only_b``/``neither`` in binary
    mode and ``a_better``/``b_better``/``tie`` in real mode. The histograms
    bin the characterization value of the samples each run got right (binary
    mode) or of every sample (real mode).
    """

    mode: str
    total: int
    counts: Dict[str, int]
    histogram_a: Optional[Histogram] = None
    histogram_b: Optional[Histogram] = None
    histogram_all: Optional[Histogram] = None

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"mode": self.mode, "total": self.total, "counts": dict(self.counts)}
        if self.histogram_all is not None:
            out["intervals"] = _interval_table(self.histogram_a, self.histogram_b, self.histogram_all)
        return out


def _interval_table(a: Histogram, b: Histogram, everything: Histogram) -> list:
    return [
        {
            "interval": row.interval,
            "count_a": ra.count,
            "count_b": rb.count,
            "count": row.count,
            "mean": row.mean,
        }
        for ra, rb, row in zip(a.bins, b.bins, everything.bins)
    ]


OUTCOME_KINDS = ("auto", "binary", "real")


def _is_binary(values: Sequence[float]) -> bool:
    return all(v in (0, 1) for v in values)


def compare_runs(
    run_a: Mapping[str, float],
    run_b: Mapping[str, float],
    bin_edges: Optional[Sequence[float]] = None,
    values: Optional[Mapping[str, float]] = None,
    higher_is_better: bool = True,
    outcome_kind: str = "auto",
) -> ComparisonReport:
    """
    Compare two runs keyed by sample id.

    Parameters
    ----------
    run_a, run_b : mapping of id to outcome
        Binary (0/1) outcomes or real-valued scores; both runs must cover
        the same ids
    bin_edges : sequence of float, optional
        Interval edges for the characterization histograms
    values : mapping of id to float, optional
        Characterization value per id; required with ``bin_edges``
    higher_is_better : bool
        Orientation of real-valued outcomes
    outcome_kind : str
        ``binary``, ``real`` or ``auto``. ``auto`` treats the runs as binary
        when every outcome is 0 or 1, so a real-valued run that happens to
        score only 0.0 and 1.0 needs ``real`` set explicitly

    Returns
    -------
    ComparisonReport

    Raises
    ------
    InputError
        On id mismatch, missing characterization values, an unknown
        ``outcome_kind`` or non-0/1 outcomes with ``outcome_kind="binary"``.
    """
    if outcome_kind not in OUTCOME_KINDS:
        raise InputError(f"unknown outcome kind {outcome_kind!r}; expected one of {OUTCOME_KINDS}")
    if set(run_a) != set(run_b):
        missing = sorted(set(run_a) ^ set(run_b))
        raise InputError(f"runs cover different ids, e.g. {missing[:5]}")
    ids = sorted(run_a)
    a = np.array([run_a[i] for i in ids], dtype=float)
    b = np.array([run_b[i] for i in ids], dtype=float)

    if outcome_kind == "auto":
        binary = _is_binary(a) and _is_binary(b)
    else:
        binary = outcome_kind == "binary"
        if binary and not (_is_binary(a) and _is_binary(b)):
            raise InputError("binary comparison needs 0/1 outcomes in both runs")
    if binary:
        hit_a, hit_b = a == 1, b == 1
        counts = {
            "both": int(np.sum(hit_a & hit_b)),
            "only_a": int(np.sum(hit_a & ~hit_b)),
            "only_b": int(np.sum(~hit_a & hit_b)),
            "neither": int(np.sum(~hit_a & ~hit_b)),
        }
    else:
        sign = 1.0 if higher_is_better else -1.0
        diff = sign * (a - b)
        hit_a, hit_b = diff > 0, diff < 0
        counts = {
            "a_better": int(np.sum(hit_a)),
            "b_better": int(np.sum(hit_b)),
            "tie": int(np.sum(diff == 0)),
        }

    report_kwargs: Dict[str, Any] = {}
    if bin_edges is not None:
        if values is None:
            raise InputError("bin edges given without characterization values")
        missing = [i for i in ids if i not in values]
        if missing:
            raise InputError(f"no characterization value for ids {missing[:5]}")
        v = np.array([values[i] for i in ids], dtype=float)
        report_kwargs = {
            "histogram_a": bin_counts(v[hit_a], bin_edges),
            "histogram_b": bin_counts(v[hit_b], bin_edges),
            "histogram_all": bin_counts(v, bin_edges),
        }
    return ComparisonReport(
        mode="binary" if binary else "real", total=len(ids), counts=counts, **report_kwargs
    )
