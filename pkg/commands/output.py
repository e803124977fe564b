"""
Command Output

Rendering of command results as JSON, JSON lines, CSV or aligned tables.
Rendering is deterministic: same result, same bytes.
"""
import csv
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO


@dataclass
class CommandResult:
    """What a command produced, independent of the output format"""
    payload: Any = None
    records: Iterable[Dict[str, Any]] = field(default_factory=list)
    columns: Sequence[str] = ()
    rows: List[Sequence[Any]] = field(default_factory=list)
    json_lines: bool = False
    exit_code: int = 0


def _dumps(value: Any, indent: Optional[int] = None) -> str:
    return json.dumps(value, ensure_ascii=False, indent=indent)


def render_json(result: CommandResult, stream: TextIO) -> None:
    if result.json_lines:
        for record in result.records:
            stream.write(_dumps(record) + "\n")
        return
    stream.write(_dumps(result.payload, indent=2) + "\n")


def render_csv(result: CommandResult, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow(row)


def render_table(result: CommandResult, stream: TextIO) -> None:
    cells = [[str(c) for c in result.columns]] + [[str(c) for c in row] for row in result.rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(result.columns))]
    for index, line in enumerate(cells):
        stream.write("  ".join(value.ljust(width) for value, width in zip(line, widths)).rstrip() + "\n")
        if index == 0:
            stream.write("  ".join("-" * width for width in widths) + "\n")


RENDERERS = {"json": render_json, "csv": render_csv, "table": render_table}


def render(result: CommandResult, fmt: str, stream: TextIO) -> None:
    """Write the result in the requested format"""
    if fmt != "json" and not result.columns:
        render_json(result, stream)
        return
    RENDERERS[fmt](result, stream)
