"""Self-describing CSV and JSON reports.

CSV starts with a ``# config=<json>`` line, then a header row; floats carry
17 significant digits and complex cells read ``re+imi``. Extra summary keys
follow the rows as ``# key=<json>`` lines. JSON documents hold ``config``,
``rows`` and any extra summary keys.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from pathlib import Path
from typing import Any, Sequence

import orjson

from charpoly.models import OutputFormat, RunConfig
from charpoly.utils.complexparse import format_complex

log = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, (dict, list, tuple)):
        return orjson.dumps(_json_value(value), option=orjson.OPT_SORT_KEYS).decode()
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def config_json(run: RunConfig) -> bytes:
    return orjson.dumps(run.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS)


def render_csv(
    run: RunConfig,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    extra: dict[str, Any] | None = None,
) -> str:
    buffer = io.StringIO()
    buffer.write("# config=" + config_json(run).decode() + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    for key in sorted(extra or {}):
        value = orjson.dumps(_json_value(extra[key]), option=orjson.OPT_SORT_KEYS).decode()
        buffer.write(f"# {key}={value}\n")
    return buffer.getvalue()


def render_json(
    run: RunConfig,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    extra: dict[str, Any] | None = None,
) -> str:
    document: dict[str, Any] = {"config": run.model_dump(mode="json")}
    document["rows"] = [dict(zip(header, (_json_value(v) for v in row))) for row in rows]
    for key, value in (extra or {}).items():
        document[key] = _json_value(value)
    return orjson.dumps(document, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS).decode() + "\n"


def render(
    run: RunConfig,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    extra: dict[str, Any] | None = None,
) -> str:
    if run.format == OutputFormat.json:
        return render_json(run, header, rows, extra)
    return render_csv(run, header, rows, extra)


def emit(
    run: RunConfig,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    extra: dict[str, Any] | None = None,
) -> str:
    """Renders the report and writes it to run.out, or returns it for standard output."""
    text = render(run, header, rows, extra)
    if run.out is not None:
        Path(run.out).write_text(text)
        log.info("Wrote %d rows to %s", len(rows), run.out)
    return text
