"""Canonical JSON and CSV helpers so reruns produce byte-identical files."""

from __future__ import annotations

import json


def canonical_dumps(obj):
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def fmt_float(v):
    """Pinned float formatting for CSV cells (comma separator, '.' decimal)."""
    if v is None:
        return ""
    return f"{v:.10g}"
