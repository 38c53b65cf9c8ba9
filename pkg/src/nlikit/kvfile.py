"""Flat key-value text files, used for corpus manifests and experiment configs.

Syntax: one `key = value` per line, `#` starts a comment, blank lines ignored.
Keys may not repeat.
"""

from __future__ import annotations

from .errors import DataError


def parse_keyvalue(text: str, source: str = "<string>") -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise DataError(f"{source}:{lineno}: empty key")
        if key in entries:
            raise DataError(f"{source}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def read_keyvalue(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_keyvalue(fh.read(), source=str(path))
