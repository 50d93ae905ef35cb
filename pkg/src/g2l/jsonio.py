"""Canonical JSON serialization so repeated runs produce byte-identical files."""

from __future__ import annotations

import json
from pathlib import Path


def canonical_json(obj, indent: int | None = None) -> str:
    if indent is None:
        return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    return json.dumps(obj, sort_keys=True, indent=indent) + "\n"


def write_json(path, obj, indent: int | None = None) -> None:
    Path(path).write_text(canonical_json(obj, indent=indent), encoding="utf-8")


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
