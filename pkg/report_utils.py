# --- report_utils.py ---
"""
Plain-text and YAML rendering helpers for evaluation output.
(No internal project imports besides constants)
"""

import math

import yaml

from constants import MISSING_CELL, REPORT_DECIMALS


def format_score(value: float | None, decimals: int = REPORT_DECIMALS) -> str:
    """Fixed-decimal score, or the missing-cell dash for absent values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return MISSING_CELL
    return f"{value:.{decimals}f}"


def render_table(header: list[str], rows: list[list[str]], separator_after: set[int] | None = None) -> str:
    """
    Renders an aligned text table.

    The first column is left-aligned, all others right-aligned. Columns whose
    index is in `separator_after` are followed by a " | " divider.

    Args:
        header: Column titles.
        rows: Cell strings, one list per row, same length as the header.
        separator_after: Column indices to draw a divider after.

    Returns:
        The table as a string ending in a newline.
    """
    separator_after = separator_after or set()
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def fmt(cells: list[str]) -> str:
        parts = []
        for i, cell in enumerate(cells):
            parts.append(cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i]))
            if i < len(cells) - 1:
                parts.append(" | " if i in separator_after else "  ")
        return "".join(parts).rstrip()

    lines = [fmt(header), "-" * len(fmt(header))]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines) + "\n"


def dump_yaml(data) -> str:
    return yaml.safe_dump(data, sort_keys=False, allow_unicode=True, default_flow_style=False)
