import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable

from unilab import __version__

TOOL = 'unilab'


def format_cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(columns: list[str], rows: Iterable[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def build_document(
    command: str, config: dict, seeds: dict, result: Any
) -> dict:
    return {
        'tool': TOOL,
        'version': __version__,
        'command': command,
        'config': config,
        'seeds': seeds,
        'result': result,
    }


def render_json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=False) + '\n'


def write_text(path: str | Path, text: str):
    """Write through a temporary file so readers never see partial output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    descriptor, temporary = tempfile.mkstemp(
        dir=path.parent, prefix=f'.{path.name}.', suffix='.partial'
    )
    try:
        with os.fdopen(descriptor, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(temporary, path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
