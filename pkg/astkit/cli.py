#!/usr/bin/env python3
"""
Command-line interface for astkit.

Usage:
    astkit parse corpus.jsonl -o trees.jsonl
    astkit stats corpus.jsonl -o stats.csv
    astkit transform corpus.jsonl --method sbt -o sbt.jsonl
    astkit relmat corpus.jsonl --max-distance 7 -o relmat.jsonl
    astkit characterize corpus.jsonl --metric jaccard --pairs pairs.tsv -o s.csv
    astkit characterize corpus.jsonl --metric overlap --field summary -o e.csv
    astkit score --task search ranks.jsonl -o report.json
    astkit compare run_a.jsonl run_b.jsonl --values s.csv --bins jaccard -o venn.json

Exit status: 0 on success (per-record failures go to ``<output>.errors.jsonl``),
1 when an input or configuration file cannot be used, 2 on bad flags.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from astkit import __version__
from astkit.compare import compare_runs
from astkit.config import BIN_PRESETS, AstkitConfig, load_config, resolve_bins
from astkit.corpus import (
    dumps,
    errors_path,
    read_classifier_run,
    read_corpus,
    read_generation_run,
    read_outcomes,
    read_ranked_run,
    write_atomic,
    write_jsonl,
)
from astkit.errors import AstkitError, InputError
from astkit.logging_utils import configure_logging
from astkit.pipeline import (
    TRANSFORMS,
    characterize_pairs,
    characterize_texts,
    histogram_report,
    run_records,
    score_clone,
    score_search,
    score_summarization,
    stats_frame,
    stats_summary,
)

logger = logging.getLogger("astkit.cli")


# ============================================================================
# Argument parsing
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML configuration file")
    common.add_argument("--jobs", type=int, help="Worker processes (default: all cores)")
    common.add_argument("--seed", type=int, help="Seed for every sampler (default: 0)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only, no progress bars")

    parser = argparse.ArgumentParser(
        prog="astkit",
        description="AST extraction, preprocessing transforms and evaluation metrics for method-level code",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="Parse a corpus into s-expression trees")
    _io(p)
    p.add_argument("--keep-punctuation", action="store_true", help="Keep { } ( ) ; , . tokens")

    p = sub.add_parser("stats", parents=[common], help="Per-tree statistics and corpus summary")
    _io(p)
    p.add_argument("--summary", type=Path, help="Summary JSON (default: <output>.summary.json)")
    p.add_argument("--exclude-value-children", action="store_true",
                   help="Ignore Value leaves when computing the branching factor")

    p = sub.add_parser("transform", parents=[common], help="Apply a preprocessing transform")
    _io(p)
    p.add_argument("--method", required=True, choices=TRANSFORMS)
    p.add_argument("--max-length", type=int, help="Path transform: maximum path length")
    p.add_argument("--max-width", type=int, help="Path transform: maximum width")
    p.add_argument("--max-contexts", type=int, help="Path transform: contexts kept per method (0 = all)")

    p = sub.add_parser("relmat", parents=[common], help="Ancestor and sibling relation matrices")
    _io(p)
    p.add_argument("--max-distance", type=int, help="Distance threshold P (default: 7)")

    p = sub.add_parser("characterize", parents=[common], help="Sample characterization metrics")
    _io(p)
    p.add_argument("--metric", required=True, choices=("jaccard", "overlap"))
    p.add_argument("--pairs", type=Path, help="TSV of id pairs (jaccard)")
    p.add_argument("--field", choices=("summary", "query"), default="summary",
                   help="Text compared against the code (overlap)")
    p.add_argument("--bins", help=f"Histogram edges: one of {', '.join(BIN_PRESETS)} or comma-separated values")
    p.add_argument("--histogram", type=Path, help="Histogram JSON (default: <output>.hist.json)")
    p.add_argument("--tokenizer", help="Pretrained tokenizer name for external tokenization")

    p = sub.add_parser("score", parents=[common], help="Evaluate a run file")
    p.add_argument("run", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--task", required=True, choices=("clone", "search", "summarization"))
    p.add_argument("--threshold", type=float, help="Clone: also report P/R/F1 at this threshold")
    p.add_argument("--strict-threshold", action="store_true", help="Clone: predict when score > threshold")
    p.add_argument("--smooth", action="store_true", help="Summarization: smoothed BLEU")

    p = sub.add_parser("compare", parents=[common], help="Compare two runs over the same ids")
    p.add_argument("run_a", type=Path)
    p.add_argument("run_b", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--field", help="Outcome field in the run files")
    p.add_argument("--values", type=Path, help="Characterization CSV (id,metric,value) to bin by")
    p.add_argument("--bins", help="Histogram edges: preset name or comma-separated values")
    p.add_argument("--lower-is-better", action="store_true")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--binary", dest="outcome_kind", action="store_const", const="binary",
                      help="Treat outcomes as 0/1 hits (Venn counts)")
    kind.add_argument("--real", dest="outcome_kind", action="store_const", const="real",
                      help="Treat outcomes as scores (winner counts), even if all are 0 or 1")
    p.set_defaults(outcome_kind="auto")
    return parser


def _io(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", type=Path, help="Corpus JSONL")
    p.add_argument("-o", "--output", type=Path, required=True)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    paths: Dict[str, Any] = {}
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.seed is not None:
        paths["sample_seed"] = args.seed
    if getattr(args, "keep_punctuation", False):
        overrides["frontend"] = {"drop_punctuation": False}
    if getattr(args, "max_distance", None) is not None:
        overrides["max_distance"] = args.max_distance
    if getattr(args, "max_length", None) is not None:
        paths["max_length"] = args.max_length
    if getattr(args, "max_width", None) is not None:
        paths["max_width"] = args.max_width
    if getattr(args, "max_contexts", None) is not None:
        paths["max_contexts"] = args.max_contexts or None
    if getattr(args, "tokenizer", None):
        overrides["tokenizer"] = {"mode": "external", "external_spec": args.tokenizer}
    if getattr(args, "strict_threshold", False):
        overrides["strict_threshold"] = True
    if paths:
        overrides["paths"] = paths
    return overrides


# ============================================================================
# Commands
# ============================================================================

def _write_records(output: Path, rows: List[Dict[str, Any]], errors: List[Dict[str, Any]]) -> None:
    write_jsonl(output, rows)
    write_jsonl(errors_path(output), errors)


def _report(command: str, total: int, written: int, errors: int) -> None:
    print(dumps({"command": command, "records": total, "written": written, "errors": errors}))


def cmd_records(args: argparse.Namespace, config: AstkitConfig) -> int:
    records = read_corpus(args.input)
    method = getattr(args, "method", None)
    rows, errors = run_records(
        records,
        args.command,
        config,
        method=method,
        exclude_value_children=getattr(args, "exclude_value_children", False),
        quiet=args.quiet,
    )
    if args.command == "stats":
        write_atomic(args.output, stats_frame(rows).to_csv(index=False))
        write_jsonl(errors_path(args.output), errors)
        summary_path = args.summary or args.output.with_name(args.output.stem + ".summary.json")
        write_atomic(summary_path, dumps(stats_summary(rows, len(errors))) + "\n")
    else:
        _write_records(args.output, rows, errors)
    _report(args.command, len(records), len(rows), len(errors))
    return 0


def _read_pairs(path: Path) -> List[Tuple[str, str]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 2:
                raise InputError(f"{path}:{number}: expected two tab-separated ids")
            pairs.append((parts[0], parts[1]))
    return pairs


def cmd_characterize(args: argparse.Namespace, config: AstkitConfig) -> int:
    records = read_corpus(args.input)
    if args.metric == "jaccard":
        if args.pairs is None:
            raise InputError("--metric jaccard needs --pairs")
        by_id = {r.id: r for r in records}
        pairs = _read_pairs(args.pairs)
        rows, errors = characterize_pairs(by_id, pairs, config, quiet=args.quiet)
        total = len(pairs)
        default_bins = "jaccard"
    else:
        rows, errors = characterize_texts(records, args.field, config, quiet=args.quiet)
        total = len(records)
        default_bins = "ease" if args.field == "summary" else "relevance"

    frame = pd.DataFrame(rows, columns=["id", "metric", "value"])
    write_atomic(args.output, frame.to_csv(index=False))
    write_jsonl(errors_path(args.output), errors)
    edges = resolve_bins(args.bins or default_bins)
    histogram_path = args.histogram or args.output.with_name(args.output.stem + ".hist.json")
    write_atomic(histogram_path, dumps(histogram_report(rows, edges)) + "\n")
    _report("characterize", total, len(rows), len(errors))
    return 0


def cmd_score(args: argparse.Namespace, config: AstkitConfig) -> int:
    if args.task == "clone":
        report = score_clone(read_classifier_run(args.run), args.threshold, config.strict_threshold)
    elif args.task == "search":
        report = score_search(read_ranked_run(args.run))
    else:
        report = score_summarization(read_generation_run(args.run), smooth=args.smooth)
    write_atomic(args.output, dumps(report) + "\n")
    print(dumps(report))
    return 0


def cmd_compare(args: argparse.Namespace, config: AstkitConfig) -> int:
    run_a = read_outcomes(args.run_a, args.field)
    run_b = read_outcomes(args.run_b, args.field)
    values: Optional[Dict[str, float]] = None
    edges = resolve_bins(args.bins)
    if args.values is not None:
        frame = pd.read_csv(args.values, dtype={"id": str})
        values = dict(zip(frame["id"], frame["value"].astype(float)))
        if edges is None:
            metric = str(frame["metric"].iloc[0]) if len(frame) else "jaccard"
            edges = BIN_PRESETS.get(metric, BIN_PRESETS["jaccard"])
    report = compare_runs(
        run_a, run_b, bin_edges=edges if values is not None else None,
        values=values, higher_is_better=not args.lower_is_better,
        outcome_kind=args.outcome_kind,
    )
    write_atomic(args.output, dumps(report.to_dict()) + "\n")
    print(dumps(report.to_dict()))
    return 0


COMMANDS = {
    "parse": cmd_records,
    "stats": cmd_records,
    "transform": cmd_records,
    "relmat": cmd_records,
    "characterize": cmd_characterize,
    "score": cmd_score,
    "compare": cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)
    configure_logging(-1 if args.quiet else (1 if args.verbose else 0))
    try:
        config = load_config(args.config, _overrides(args))
        return COMMANDS[args.command](args, config)
    except (OSError, KeyError, ValueError, AstkitError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
