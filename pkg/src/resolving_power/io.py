"""Score files and delimited / JSON report output."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .scores import DegenerateDataError, LabeledScores

HEADER = ("score", "label")


class ScoreFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def parse_scores(text: str) -> LabeledScores:
    """Parse ``score,label`` CSV text. Line numbers in errors are 1-based."""
    reader = csv.reader(io.StringIO(text))
    scores, labels = [], []
    header_seen = False
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if not header_seen:
            if tuple(c.lower() for c in cells) != HEADER:
                raise ScoreFileError(f"expected header 'score,label', got {','.join(row)!r}", line)
            header_seen = True
            continue
        if len(cells) != 2:
            raise ScoreFileError(f"expected 2 fields, got {len(cells)}", line)
        try:
            s = float(cells[0])
        except ValueError:
            raise ScoreFileError(f"score {cells[0]!r} is not a decimal number", line) from None
        if not math.isfinite(s):
            raise ScoreFileError(f"score {cells[0]!r} is not finite", line)
        if cells[1] not in ("0", "1"):
            raise ScoreFileError(f"label {cells[1]!r} is not 0 or 1", line)
        scores.append(s)
        labels.append(int(cells[1]))
    if not header_seen:
        raise ScoreFileError("empty score file")
    try:
        return LabeledScores(scores, labels)
    except DegenerateDataError as exc:
        raise DegenerateDataError(f"score file: {exc}") from None


def read_scores(path: str | Path) -> LabeledScores:
    return parse_scores(Path(path).read_text(encoding="utf-8"))


def format_scores(data: LabeledScores) -> str:
    lines = ["score,label"]
    lines += [f"{s!r},{int(l)}" for s, l in zip(data.scores.tolist(), data.labels.tolist())]
    return "\n".join(lines) + "\n"


def write_scores(path: str | Path, data: LabeledScores) -> None:
    Path(path).write_text(format_scores(data), encoding="utf-8")


def _cell(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def format_tsv(rows: Iterable[dict], columns: list[str] | None = None, fmt=_cell) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    out = ["\t".join(columns)]
    out += ["\t".join(fmt(r.get(c)) for c in columns) for r in rows]
    return "\n".join(out) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def format_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"
