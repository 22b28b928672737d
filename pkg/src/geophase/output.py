"""File emission: round-trip-safe CSV/JSON and two-phase atomic writes."""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, Sequence


def fmt_float(x: float | None) -> str:
    """17 significant digits; empty string for missing values."""
    if x is None:
        return ""
    return format(x, ".17g")


def fmt_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Comma-separated, header row, LF line endings."""
    lines = [",".join(header)]
    lines.extend(",".join(fmt_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def to_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_files_atomic(files: dict[str, str]) -> None:
    """Write every file or none: stage all to temp names, then rename.

    Rename is atomic per file; staging everything first means an I/O failure
    cannot leave a partially written output behind.
    """
    staged: list[tuple[str, str]] = []
    try:
        for path, text in files.items():
            directory = os.path.dirname(os.path.abspath(path)) or "."
            os.makedirs(directory, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-geophase-")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
        while staged:
            tmp, path = staged.pop()
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
