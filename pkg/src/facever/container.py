"""Self-describing binary container used for every on-disk artifact.

Layout: 4 magic bytes, a little-endian uint32 header length, a canonical
JSON header, then the raw array bytes (little-endian, C order) in the order
listed under the header's "arrays" key.  Writes go through a temp file and
an atomic rename so a crashed run never leaves a partial artifact behind.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import ContainerError

MAGIC_MODEL = b"FVB1"
MAGIC_TENSORS = b"FVT1"
MAGIC_FEATURES = b"FVF1"
MAGIC_JB = b"FVJ1"

_ALLOWED_DTYPES = {"<f4", "<f8", "<i4", "<i8", "|u1"}


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_container(path, magic: bytes, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    """Write arrays plus metadata atomically (temp file, then rename)."""
    if len(magic) != 4:
        raise ContainerError(f"magic must be 4 bytes, got {magic!r}")
    entries = []
    blobs = []
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        dtype = arr.dtype.newbyteorder("<") if arr.dtype.byteorder == ">" else arr.dtype
        code = np.dtype(dtype).str
        if code not in _ALLOWED_DTYPES:
            raise ContainerError(f"unsupported dtype {code} for array {name!r}")
        data = np.ascontiguousarray(arr, dtype=dtype).tobytes()
        entries.append({"name": name, "shape": list(arr.shape), "dtype": code})
        blobs.append(data)
    header = _canonical_json({"meta": meta, "arrays": entries})

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(magic)
            fh.write(np.uint32(len(header)).tobytes())
            fh.write(header)
            for blob in blobs:
                fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_container(path, expected_magic: bytes | None = None):
    """Read a container; returns (meta, dict of arrays)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ContainerError(f"cannot read container {path}: {exc}") from exc
    if len(raw) < 8:
        raise ContainerError(f"{path}: truncated container")
    magic = raw[:4]
    if expected_magic is not None and magic != expected_magic:
        raise ContainerError(
            f"{path}: expected magic {expected_magic.decode()} but found {magic!r}"
        )
    header_len = int(np.frombuffer(raw[4:8], dtype="<u4")[0])
    if len(raw) < 8 + header_len:
        raise ContainerError(f"{path}: truncated header")
    try:
        header = json.loads(raw[8 : 8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"{path}: corrupt header: {exc}") from exc

    arrays = {}
    offset = 8 + header_len
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        dtype = np.dtype(entry["dtype"])
        count = int(np.prod(shape, dtype=np.int64))
        nbytes = dtype.itemsize * count
        if offset + nbytes > len(raw):
            raise ContainerError(f"{path}: array {entry['name']!r} truncated")
        arrays[entry["name"]] = np.frombuffer(
            raw, dtype=dtype, count=count, offset=offset
        ).reshape(shape).copy()
        offset += nbytes
    return header["meta"], arrays
