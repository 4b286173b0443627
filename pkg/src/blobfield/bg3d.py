"""BG3D tensor container: the interchange format for maps and parameters.

Layout, all little-endian:
    magic "BG3D" | u32 version (=1) | u32 entry count |
    per entry: u16 name length, UTF-8 name, u32 ndim, ndim x u32 dims,
    row-major f32 payload.

Payloads are f32; internal computation stays double and only rounds here.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import MalformedDocument

MAGIC = b"BG3D"
VERSION = 1


def write_tensors(tensors: dict[str, np.ndarray]) -> bytes:
    """Serialize named tensors; entry order follows dict order."""
    if len(tensors) == 0:
        raise MalformedDocument("container must hold at least one tensor")
    parts = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    for name, tensor in tensors.items():
        encoded = name.encode("utf-8")
        if not 0 < len(encoded) < 2 ** 16:
            raise MalformedDocument(f"tensor name length {len(encoded)} out of range")
        arr = np.ascontiguousarray(np.asarray(tensor), dtype="<f4")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<I", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(arr.tobytes(order="C"))
    return b"".join(parts)


def read_tensors(data: bytes) -> dict[str, np.ndarray]:
    """Parse a container; returns name -> f32 array (native byte order)."""
    view = memoryview(data)
    if len(view) < 12 or bytes(view[:4]) != MAGIC:
        raise MalformedDocument("missing BG3D magic")
    version, count = struct.unpack_from("<II", view, 4)
    if version != VERSION:
        raise MalformedDocument(f"unsupported BG3D version {version}")
    offset = 12
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        try:
            (name_len,) = struct.unpack_from("<H", view, offset)
            offset += 2
            name = bytes(view[offset:offset + name_len]).decode("utf-8")
            offset += name_len
            (ndim,) = struct.unpack_from("<I", view, offset)
            offset += 4
            dims = struct.unpack_from(f"<{ndim}I", view, offset)
            offset += 4 * ndim
        except (struct.error, UnicodeDecodeError) as exc:
            raise MalformedDocument(f"truncated or corrupt entry header: {exc}") from None
        if name in tensors:
            raise MalformedDocument(f"duplicate tensor name {name!r}")
        size = int(np.prod(dims, dtype=np.int64)) if ndim else 1
        nbytes = 4 * size
        if offset + nbytes > len(view):
            raise MalformedDocument(f"payload of {name!r} overruns the container")
        flat = np.frombuffer(view, dtype="<f4", count=size, offset=offset)
        tensors[name] = flat.reshape(dims).astype(np.float32)
        offset += nbytes
    if offset != len(view):
        raise MalformedDocument(f"{len(view) - offset} trailing bytes after last entry")
    return tensors
