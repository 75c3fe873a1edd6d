"""
Corpus and run-file I/O.

All inputs are JSONL. Outputs are written atomically: the content goes to a
temporary file next to the target which is then renamed over it.
"""

import json
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple, Union

from astkit.errors import InputError
from astkit.metrics import ClassifierRun, RankedRun

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class CorpusRecord:
    """
    One corpus sample.

    ``tree`` carries a pre-parsed s-expression for records produced by an
    external parser; such records need no ``code``.
    """

    id: str
    code: Optional[str] = None
    summary: Optional[str] = None
    query: Optional[str] = None
    tree: Optional[str] = None

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "CorpusRecord":
        if "id" not in obj:
            raise InputError("record has no 'id'")
        if obj.get("code") is None and obj.get("tree") is None:
            raise InputError(f"record {obj['id']!r} has neither 'code' nor 'tree'")
        return cls(
            id=str(obj["id"]),
            code=obj.get("code"),
            summary=obj.get("summary"),
            query=obj.get("query"),
            tree=obj.get("tree"),
        )


# ============================================================================
# Reading
# ============================================================================

def iter_jsonl(path: PathLike) -> Iterator[Tuple[int, Dict[str, Any]]]:
    """Yield ``(line_number, object)``; blank lines are skipped."""
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{number}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise InputError(f"{path}:{number}: expected a JSON object")
            yield number, obj


def _unique(ids: Iterable[str], path: PathLike) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise InputError(f"{path}: duplicate id {i!r}")
        seen.add(i)


def read_corpus(path: PathLike) -> List[CorpusRecord]:
    """
    Load a corpus file.

    Raises
    ------
    OSError
        If the file cannot be read.
    InputError
        On malformed lines or duplicate ids.
    """
    records = []
    for number, obj in iter_jsonl(path):
        try:
            records.append(CorpusRecord.from_json(obj))
        except InputError as exc:
            raise InputError(f"{path}:{number}: {exc}") from exc
    _unique((r.id for r in records), path)
    logger.info("read %d records from %s", len(records), path)
    return records


def read_classifier_run(path: PathLike) -> ClassifierRun:
    """``{"id", "score", "label"}`` lines, sorted by id."""
    rows = sorted(
        ((str(o["id"]), float(o["score"]), int(o["label"])) for _, o in iter_jsonl(path)),
        key=lambda row: row[0],
    )
    _unique((r[0] for r in rows), path)
    return ClassifierRun(
        ids=tuple(r[0] for r in rows),
        scores=tuple(r[1] for r in rows),
        labels=tuple(r[2] for r in rows),
    )


def read_ranked_run(path: PathLike) -> RankedRun:
    """``{"id", "rank"}`` lines, sorted by id."""
    rows = sorted((str(o["id"]), int(o["rank"])) for _, o in iter_jsonl(path))
    _unique((r[0] for r in rows), path)
    return RankedRun(ids=tuple(r[0] for r in rows), ranks=tuple(r[1] for r in rows))


def read_generation_run(path: PathLike) -> List[Tuple[str, List[str], List[str]]]:
    """``{"id", "candidate", "reference"}`` lines as whitespace-split tokens."""
    rows = sorted(
        (str(o["id"]), str(o["candidate"]).split(), str(o["reference"]).split())
        for _, o in iter_jsonl(path)
    )
    _unique((r[0] for r in rows), path)
    return rows


def read_outcomes(path: PathLike, field: Optional[str] = None) -> Dict[str, float]:
    """
    Per-id outcome of a run file.

    Uses ``field`` when given, otherwise the first of ``correct``, ``value``,
    ``score`` present on each line.
    """
    rows: List[Tuple[str, float]] = []
    for number, obj in iter_jsonl(path):
        keys = [field] if field else ["correct", "value", "score"]
        key = next((k for k in keys if k in obj), None)
        if key is None or "id" not in obj:
            raise InputError(f"{path}:{number}: no id or outcome field")
        rows.append((str(obj["id"]), float(obj[key])))
    _unique((r[0] for r in rows), path)
    return dict(rows)


# ============================================================================
# Writing
# ============================================================================

def dumps(obj: Any) -> str:
    """Deterministic single-line JSON."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_atomic(path: PathLike, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_jsonl(path: PathLike, rows: Iterable[Dict[str, Any]]) -> None:
    write_atomic(path, "".join(dumps(row) + "\n" for row in rows))


def errors_path(output: PathLike) -> Path:
    """Sidecar next to ``output``: ``out.jsonl`` -> ``out.errors.jsonl``."""
    output = Path(output)
    stem = output.name[: -len(output.suffix)] if output.suffix else output.name
    return output.with_name(f"{stem}.errors.jsonl")
