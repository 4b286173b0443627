"""Minimal deterministic PNG writer (8-bit RGB, no filtering).

Hand-rolled so render output bytes depend only on pixel values, never on
imaging-library versions. Compression level is pinned for the same reason.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import ShapeMismatch

_COMPRESSION_LEVEL = 9


def _chunk(tag: bytes, payload: bytes) -> bytes:
    body = tag + payload
    return struct.pack(">I", len(payload)) + body + struct.pack(">I", zlib.crc32(body))


def encode_png(pixels: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as PNG bytes."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise ShapeMismatch(f"expected (H, W, 3) uint8, got {pixels.shape} {pixels.dtype}")
    h, w, _ = pixels.shape
    header = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    raw = np.empty((h, 1 + 3 * w), dtype=np.uint8)
    raw[:, 0] = 0  # per-row filter byte: none
    raw[:, 1:] = pixels.reshape(h, 3 * w)
    data = zlib.compress(raw.tobytes(), _COMPRESSION_LEVEL)
    return b"".join([
        b"\x89PNG\r\n\x1a\n",
        _chunk(b"IHDR", header),
        _chunk(b"IDAT", data),
        _chunk(b"IEND", b""),
    ])


def quantize(image: np.ndarray) -> np.ndarray:
    """Map a float image in [0, 1] to uint8 with round-half-even."""
    return np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
