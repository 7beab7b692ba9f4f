"""Shared CSV/number formatting helpers.

All CSV emitted by the package goes through these functions so that the
byte-level reproducibility guarantees (17 significant digits, ``.``
decimal separator, ``\\n`` line endings, UTF-8) hold everywhere.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def format_double(x: float) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    x = float(x)
    if x == 0.0:  # avoid "-0"
        x = 0.0
    return format(x, ".17g")


def format_cell(value) -> str:
    if isinstance(value, float):
        return format_double(value)
    return str(value)


def csv_lines(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Serialize rows to CSV text with a header and ``\\n`` newlines."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
