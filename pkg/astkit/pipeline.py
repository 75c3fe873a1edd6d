"""
Corpus Pipeline
===============

Per-record work for the command-line subcommands and the parallel driver
that runs it.

Records are processed independently by :func:`run_records`. Each worker
process builds its own parser on first use, and results are re-sorted by id
before they are returned, so output never depends on scheduling or on the
number of workers.
"""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from astkit.binary import to_binary
from astkit.characterize import bin_counts, jaccard, overlap_ratio
from astkit.config import AstkitConfig
from astkit.corpus import CorpusRecord
from astkit.errors import AstkitError, ConfigurationError, InputError
from astkit.frontend import SourceSnippet, parse_method
from astkit.metrics import (
    ClassifierRun,
    RankedRun,
    bleu,
    corpus_bleu,
    meteor,
    mrr,
    precision_recall_f1,
    predict,
    rouge_l,
    success_rate_at_k,
    sweep_threshold,
)
from astkit.paths import extract_path_contexts
from astkit.relmat import compute_relations
from astkit.sexpr import format_bfs, format_sbt, format_tokens, from_sexpr, to_sexpr
from astkit.split import split_asts
from astkit.stats import METRICS, TreeStats, aggregate_stats, tree_stats
from astkit.tokens import split_subtokens
from astkit.tree import AstTree, token_sequence

logger = logging.getLogger(__name__)

TRANSFORMS = (
    "raw", "bfs", "sbt", "sbt-notok", "path", "binary", "split", "tokens", "token-sbt-notok",
)
SEARCH_CUTOFFS = (1, 5, 10)


@dataclass(frozen=True)
class RecordResult:
    """Output row or error row for one record."""

    id: str
    row: Optional[Dict[str, Any]] = None
    error: Optional[Dict[str, Any]] = None


# ============================================================================
# Per-record work
# ============================================================================

def load_tree(record: CorpusRecord, config: AstkitConfig) -> Tuple[AstTree, int]:
    """Tree of a record and its error node count (0 for pre-parsed trees)."""
    if record.tree is not None:
        return from_sexpr(record.tree), 0
    outcome = parse_method(SourceSnippet(record.id, record.code), config.frontend)
    return outcome.tree, outcome.error_node_count


def transform_record(record: CorpusRecord, method: str, config: AstkitConfig) -> Dict[str, Any]:
    """Apply one preprocessing transform and build the output row."""
    if method == "split":
        if record.code is None:
            raise InputError("the split transform needs source code, not a pre-parsed tree")
        split = split_asts(SourceSnippet(record.id, record.code), config.frontend)
        return {
            "id": record.id,
            "blocks": [to_sexpr(t) for t in split.trees],
            "skipped_blocks": split.skipped_blocks,
        }

    tree, _ = load_tree(record, config)
    if method == "raw":
        return {"id": record.id, "tree": to_sexpr(tree)}
    if method == "bfs":
        return {"id": record.id, "bfs": format_bfs(tree)}
    if method == "sbt":
        return {"id": record.id, "sbt": format_sbt(tree)}
    if method == "sbt-notok":
        return {"id": record.id, "sbt": format_sbt(tree, masked=True)}
    if method == "tokens":
        return {"id": record.id, "tokens": format_tokens(token_sequence(tree))}
    if method == "token-sbt-notok":
        return {
            "id": record.id,
            "tokens": format_tokens(token_sequence(tree)),
            "sbt": format_sbt(tree, masked=True),
        }
    if method == "path":
        contexts = extract_path_contexts(tree, config.paths)
        return {"id": record.id, "contexts": [c.to_tsv() for c in contexts]}
    if method == "binary":
        return {"id": record.id, "tree": to_sexpr(to_binary(tree))}
    raise InputError(f"unknown transform {method!r}")


def _parse_row(record: CorpusRecord, config: AstkitConfig) -> Dict[str, Any]:
    tree, errors = load_tree(record, config)
    return {"id": record.id, "tree": to_sexpr(tree), "errors": errors}


def _stats_row(record: CorpusRecord, config: AstkitConfig, exclude_value_children: bool) -> Dict[str, Any]:
    tree, _ = load_tree(record, config)
    row = {"id": record.id}
    row.update(tree_stats(tree, split_subtokens, exclude_value_children).as_row())
    return row


def _relmat_row(record: CorpusRecord, config: AstkitConfig) -> Dict[str, Any]:
    tree, _ = load_tree(record, config)
    return {"id": record.id, "coo": compute_relations(tree, config.max_distance).to_coo()}


def _error_result(record_id: str, exc: BaseException) -> RecordResult:
    return RecordResult(record_id, error={
        "id": record_id, "error": type(exc).__name__, "message": str(exc),
    })


def process_record(
    record: CorpusRecord,
    task: str,
    config: AstkitConfig,
    method: Optional[str] = None,
    exclude_value_children: bool = False,
) -> RecordResult:
    """
    Run ``task`` on one record, turning any failure into an error row.

    ``ConfigurationError`` is re-raised: it affects every record alike.

    Parameters
    ----------
    record : CorpusRecord
    task : str
        ``parse``, ``stats``, ``transform`` or ``relmat``
    config : AstkitConfig
    method : str, optional
        Transform name for ``task="transform"``
    exclude_value_children : bool
        Branching-factor variant for ``task="stats"``
    """
    try:
        if task == "parse":
            row = _parse_row(record, config)
        elif task == "stats":
            row = _stats_row(record, config, exclude_value_children)
        elif task == "transform":
            row = transform_record(record, method, config)
        elif task == "relmat":
            row = _relmat_row(record, config)
        else:
            raise InputError(f"unknown task {task!r}")
    except ConfigurationError:
        raise
    except AstkitError as exc:
        logger.debug("record %s failed: %s", record.id, exc)
        return _error_result(record.id, exc)
    except Exception as exc:  # pylint: disable=broad-except
        logger.warning("record %s failed unexpectedly: %s: %s", record.id, type(exc).__name__, exc)
        return _error_result(record.id, exc)
    return RecordResult(record.id, row=row)


# ============================================================================
# Driver
# ============================================================================

def parallel_map(
    func: Callable[[Any], Any],
    items: Sequence[Any],
    jobs: Optional[int] = None,
    desc: str = "records",
    quiet: bool = False,
) -> List[Any]:
    """
    Map ``func`` over ``items`` with joblib's process backend.

    ``jobs=None`` uses every core; ``jobs=1`` runs in-process.
    """
    progress = tqdm(items, desc=desc, disable=quiet, leave=False)
    if jobs == 1 or len(items) < 2:
        return [func(item) for item in progress]
    return Parallel(n_jobs=jobs if jobs is not None else -1, backend="loky")(
        delayed(func)(item) for item in progress
    )


def run_records(
    records: Sequence[CorpusRecord],
    task: str,
    config: AstkitConfig,
    method: Optional[str] = None,
    exclude_value_children: bool = False,
    quiet: bool = False,
) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    """
    Process a corpus.

    Returns
    -------
    tuple
        (output rows, error rows), both sorted by id
    """
    worker = partial(
        process_record,
        task=task,
        config=config,
        method=method,
        exclude_value_children=exclude_value_children,
    )
    results = parallel_map(worker, list(records), config.jobs, desc=task, quiet=quiet)
    results.sort(key=lambda r: r.id)
    rows = [r.row for r in results if r.row is not None]
    errors = [r.error for r in results if r.error is not None]
    if errors:
        logger.warning("%d of %d records failed", len(errors), len(results))
    return rows, errors


def stats_frame(rows: Iterable[Mapping[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=["id", *METRICS])


def stats_summary(rows: Sequence[Mapping[str, Any]], error_count: int) -> Dict[str, Any]:
    """Corpus mean/median per metric plus the error count."""
    stats = [
        TreeStats(r["size"], r["depth"], r["branching"], r["unique_types"], r["unique_tokens"])
        for r in rows
    ]
    summary: Dict[str, Any] = {"errors": error_count}
    if stats:
        summary.update(aggregate_stats(stats).to_dict())
    else:
        summary["count"] = 0
    return summary


# ============================================================================
# Characterization
# ============================================================================

def _pair_value(pair: Tuple[str, str, str, str], tokenizer) -> Dict[str, Any]:
    pair_id, code_a, code_b, _ = pair
    try:
        return {"id": pair_id, "metric": "jaccard", "value": jaccard(code_a, code_b, tokenizer)}
    except AstkitError as exc:
        return {"id": pair_id, "error": type(exc).__name__, "message": str(exc)}


def _text_value(item: Tuple[str, str, str, str], tokenizer) -> Dict[str, Any]:
    record_id, text, code, metric = item
    try:
        return {"id": record_id, "metric": metric, "value": overlap_ratio(text, code, tokenizer)}
    except AstkitError as exc:
        return {"id": record_id, "error": type(exc).__name__, "message": str(exc)}


def characterize_pairs(
    records: Mapping[str, CorpusRecord],
    pairs: Sequence[Tuple[str, str]],
    config: AstkitConfig,
    quiet: bool = False,
) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    """Token Jaccard similarity per code pair; pair ids are ``a:b``."""
    items = []
    errors = []
    for a, b in pairs:
        pair_id = f"{a}:{b}"
        missing = [i for i in (a, b) if i not in records or records[i].code is None]
        if missing:
            errors.append({"id": pair_id, "error": "InputError", "message": f"no code for {missing}"})
            continue
        items.append((pair_id, records[a].code, records[b].code, "jaccard"))
    values = parallel_map(partial(_pair_value, tokenizer=config.tokenizer), items, config.jobs, "pairs", quiet)
    return _split_values(values, errors)


def characterize_texts(
    records: Sequence[CorpusRecord],
    field: str,
    config: AstkitConfig,
    quiet: bool = False,
) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    """Ease (``field="summary"``) or relevance (``field="query"``) per record."""
    metric = "ease" if field == "summary" else "relevance"
    items = []
    errors = []
    for record in records:
        text = getattr(record, field)
        if text is None or record.code is None:
            errors.append({"id": record.id, "error": "InputError", "message": f"record lacks {field} or code"})
            continue
        items.append((record.id, text, record.code, metric))
    values = parallel_map(partial(_text_value, tokenizer=config.tokenizer), items, config.jobs, field, quiet)
    return _split_values(values, errors)


def _split_values(values: List[Dict[str, Any]], errors: List[Dict[str, Any]]):
    rows = sorted((v for v in values if "value" in v), key=lambda v: v["id"])
    errors = sorted(errors + [v for v in values if "error" in v], key=lambda v: v["id"])
    return rows, errors


def histogram_report(rows: Sequence[Mapping[str, Any]], edges: Sequence[float]) -> Dict[str, Any]:
    return bin_counts([r["value"] for r in rows], edges).to_dict()


# ============================================================================
# Scoring
# ============================================================================

def score_clone(run: ClassifierRun, threshold: Optional[float] = None, strict: bool = False) -> Dict[str, Any]:
    """Best-threshold F1 on the grid, plus P/R/F1 at a fixed threshold if given."""
    delta, best_f1 = sweep_threshold(run, strict=strict)
    at = threshold if threshold is not None else delta
    prf = precision_recall_f1(predict(run.scores, at, strict), run.labels)
    return {
        "task": "clone",
        "count": len(run.ids),
        "threshold": at,
        "best_threshold": delta,
        "best_f1": best_f1,
        "precision": prf.precision,
        "recall": prf.recall,
        "f1": prf.f1,
        "comparison": ">" if strict else ">=",
    }


def score_search(run: RankedRun, cutoffs: Sequence[int] = SEARCH_CUTOFFS) -> Dict[str, Any]:
    report: Dict[str, Any] = {"task": "search", "count": len(run.ids), "mrr": mrr(run)}
    for k in cutoffs:
        report[f"sr@{k}"] = success_rate_at_k(run, k)
    return report


def score_summarization(rows: Sequence[Tuple[str, List[str], List[str]]], smooth: bool = False) -> Dict[str, Any]:
    """Corpus BLEU plus mean sentence BLEU, METEOR and ROUGE-L."""
    if not rows:
        raise InputError("cannot score an empty generation run")
    candidates = [r[1] for r in rows]
    references = [r[2] for r in rows]
    n = len(rows)
    return {
        "task": "summarization",
        "count": n,
        "smooth": smooth,
        "bleu": corpus_bleu(candidates, references, smooth),
        "sentence_bleu": sum(bleu(c, r, smooth) for c, r in zip(candidates, references)) / n,
        "meteor": sum(meteor(c, r) for c, r in zip(candidates, references)) / n,
        "rouge_l": sum(rouge_l(c, r) for c, r in zip(candidates, references)) / n,
    }
