# Report Utilities
# Reading series files and writing deterministic JSON reports

import json
import os

from modules.series_module import (
    TruncatedSeries,
    VariableSignature,
    dumps_series,
    loads_series,
    parse_expression,
)
from utilities.config import JSON_INDENT, SERIES_FILE_SUFFIX
from utilities.logger import emit_log


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=JSON_INDENT, ensure_ascii=False) + "\n"


def load_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_json(path, obj):
    text = dumps_json(obj)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    emit_log(f"[REPORT] Wrote {path}", level="debug")
    return text


def load_series_file(path, signature: VariableSignature, order: int) -> TruncatedSeries:
    """Series file in record form; a plain expression is accepted for anything else."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    if path.endswith(SERIES_FILE_SUFFIX) or "\t" in text:
        series = loads_series(text, signature, order)
    else:
        series = parse_expression(" ".join(text.split()), signature, order)
    emit_log(f"[REPORT] Loaded {os.path.basename(path)}: {series}", level="debug")
    return series


def write_series_file(path, series: TruncatedSeries):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_series(series))
