"""Binary container used for datasets, checkpoints, and prediction dumps.

Layout (all integers little-endian):

    магic   4 bytes  b"DFD1"
    u32     header length in bytes
    header  UTF-8 canonical JSON: schema version, record kind, named array
            shapes, checksum algorithm id, free-form metadata
    payload concatenated <f4 arrays in header order
    u64     checksum of the payload (first 8 bytes of its SHA-256)

Writes are atomic (temp file + rename) and loads verify the checksum, the
declared-vs-actual payload size, and the schema version.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

MAGIC = b"DFD1"
SCHEMA_VERSION = 1
CHECKSUM_ALGO = "sha256-trunc64"


class ContainerError(ValueError):
    """Malformed, truncated, or corrupt container file."""


class ChecksumError(ContainerError):
    """Payload checksum did not verify."""


class VersionError(ContainerError):
    """Unsupported container schema version."""


def _checksum(payload: bytes) -> int:
    return struct.unpack("<Q", hashlib.sha256(payload).digest()[:8])[0]


def _canonical_json(obj) -> bytes:
    return json.dumps(
        obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")


@dataclass(frozen=True)
class Container:
    kind: str
    meta: dict
    arrays: dict[str, np.ndarray]

    def array(self, name: str) -> np.ndarray:
        if name not in self.arrays:
            raise ContainerError(f"container has no array {name!r}")
        return self.arrays[name]


def write_container(
    path: str | Path,
    kind: str,
    arrays: Mapping[str, np.ndarray],
    meta: dict | None = None,
) -> None:
    """Serialize named float arrays plus metadata; atomic and deterministic."""
    path = Path(path)
    records = []
    chunks = []
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(np.asarray(arr), dtype="<f4")
        records.append({"name": str(name), "shape": list(arr.shape)})
        chunks.append(arr.tobytes())
    payload = b"".join(chunks)
    header = {
        "schema_version": SCHEMA_VERSION,
        "kind": str(kind),
        "dtype": "<f4",
        "checksum": CHECKSUM_ALGO,
        "records": records,
        "meta": meta or {},
    }
    header_bytes = _canonical_json(header)
    blob = b"".join(
        [
            MAGIC,
            struct.pack("<I", len(header_bytes)),
            header_bytes,
            payload,
            struct.pack("<Q", _checksum(payload)),
        ]
    )
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(blob)
    os.replace(tmp, path)


def read_container(path: str | Path) -> Container:
    """Load and fully verify a container file."""
    blob = Path(path).read_bytes()
    if len(blob) < 4 + 4 + 8:
        raise ContainerError(f"{path}: file too short to be a container")
    if blob[:4] != MAGIC:
        raise ContainerError(f"{path}: bad magic {blob[:4]!r}")
    (header_len,) = struct.unpack("<I", blob[4:8])
    header_end = 8 + header_len
    if header_end + 8 > len(blob):
        raise ContainerError(f"{path}: truncated header")
    try:
        header = json.loads(blob[8:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"{path}: unreadable header: {exc}") from exc
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise VersionError(f"{path}: schema version {version} unsupported")
    payload = blob[header_end:-8]
    (declared_sum,) = struct.unpack("<Q", blob[-8:])
    if _checksum(payload) != declared_sum:
        raise ChecksumError(f"{path}: payload checksum mismatch")
    n_elems = sum(int(np.prod(rec["shape"], dtype=np.int64)) for rec in header["records"])
    if n_elems * 4 != len(payload):
        raise ContainerError(
            f"{path}: declared shapes cover {n_elems * 4} bytes, "
            f"payload has {len(payload)}"
        )
    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for rec in header["records"]:
        shape = tuple(int(s) for s in rec["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        arrays[rec["name"]] = arr.reshape(shape)
        offset += count * 4
    return Container(kind=header["kind"], meta=header["meta"], arrays=arrays)
