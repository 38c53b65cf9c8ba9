"""Versioned binary container with content checksum.

Shared by the Gram-matrix cache and trained-model files. Byte layout
(all integers little-endian; see docs/FORMATS.md):

    offset 0   8 bytes   magic b"NLIKITB\\x00"
    offset 8   uint32    format version (currently 1)
    offset 12  32 bytes  SHA-256 over every byte from offset 44 to EOF
    offset 44  uint32    length L of the metadata JSON
    offset 48  L bytes   UTF-8 JSON: {"kind": ..., "arrays": [...], "meta": {...}}
    then                 raw array payloads, C-order, in manifest order

Each entry of "arrays" is {"name": str, "dtype": str, "shape": [ints]} with a
little-endian numpy dtype string. Truncation or corruption fails the checksum.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import DataError

MAGIC = b"NLIKITB\x00"
FORMAT_VERSION = 1


def _le_dtype(arr: np.ndarray) -> np.ndarray:
    dt = arr.dtype.newbyteorder("<")
    return np.ascontiguousarray(arr, dtype=dt)


def write_envelope(path, kind: str, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    """Write atomically (temp file + rename), safe for concurrent readers."""
    manifest = []
    payloads = []
    for name, arr in arrays.items():
        arr = _le_dtype(np.asarray(arr))
        manifest.append({"name": name, "dtype": arr.dtype.str,
                         "shape": list(arr.shape)})
        payloads.append(arr.tobytes(order="C"))
    header = json.dumps({"kind": kind, "arrays": manifest, "meta": meta},
                        sort_keys=True).encode("utf-8")

    body = struct.pack("<I", len(header)) + header + b"".join(payloads)
    digest = hashlib.sha256(body).digest()
    blob = MAGIC + struct.pack("<I", FORMAT_VERSION) + digest + body

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_envelope(path, expected_kind: str | None = None):
    """Return (kind, meta, arrays). Raises DataError on any corruption."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"file not found: {path}")
    blob = path.read_bytes()
    if len(blob) < 48 or blob[:8] != MAGIC:
        raise DataError(f"{path}: not a nlikit binary file (bad magic)")
    (version,) = struct.unpack_from("<I", blob, 8)
    if version > FORMAT_VERSION:
        raise DataError(f"{path}: format version {version} is newer than "
                        f"supported version {FORMAT_VERSION}")
    stored = blob[12:44]
    body = blob[44:]
    if hashlib.sha256(body).digest() != stored:
        raise DataError(f"{path}: checksum mismatch (truncated or corrupt)")
    (hlen,) = struct.unpack_from("<I", body, 0)
    header = json.loads(body[4:4 + hlen].decode("utf-8"))
    kind = header.get("kind")
    if expected_kind is not None and kind != expected_kind:
        raise DataError(f"{path}: expected a {expected_kind!r} file, got {kind!r}")

    arrays: dict[str, np.ndarray] = {}
    offset = 4 + hlen
    for entry in header["arrays"]:
        dt = np.dtype(entry["dtype"])
        shape = tuple(entry["shape"])
        nbytes = dt.itemsize * int(np.prod(shape, dtype=np.int64)) if shape else dt.itemsize
        chunk = body[offset:offset + nbytes]
        if len(chunk) != nbytes:
            raise DataError(f"{path}: array payload truncated")
        arrays[entry["name"]] = np.frombuffer(chunk, dtype=dt).reshape(shape).copy()
        offset += nbytes
    if offset != len(body):
        raise DataError(f"{path}: trailing bytes after array payloads")
    return kind, header["meta"], arrays
