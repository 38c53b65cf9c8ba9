"""Gram-backend selection: compiled extension when available, pure numpy
otherwise.

The env var NLIKIT_STRKERN forces a backend ("native" or "pure") at import
time; `set_backend` switches at runtime. Both backends return identical
int64 matrices, so the choice never changes results, only speed.
"""

from __future__ import annotations

import os

from ..errors import ConfigError
from . import _purekern

try:
    from . import _fastkern
except ImportError:
    _fastkern = None

_BACKENDS = {"pure": _purekern}
if _fastkern is not None:
    _BACKENDS["native"] = _fastkern


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _resolve(name: str):
    if name == "auto":
        name = "native" if "native" in _BACKENDS else "pure"
    if name not in _BACKENDS:
        raise ConfigError(
            f"string-kernel backend {name!r} unavailable; "
            f"have {available_backends()}")
    return name, _BACKENDS[name]


_active_name, _active = _resolve(os.environ.get("NLIKIT_STRKERN", "auto").strip().lower() or "auto")


def set_backend(name: str) -> None:
    global _active_name, _active
    _active_name, _active = _resolve(name)


def backend_name() -> str:
    return _active_name


def gram_counts(ha, ca, oa, hb, cb, ob, kind_code: int, symmetric: bool):
    return _active.gram_counts(ha, ca, oa, hb, cb, ob, kind_code, symmetric)
