"""Binary tensor container with bit-exact round-trips.

Layout (all integers little-endian):

    magic     8 bytes  b"CGCTENS1"
    d         u32      axis count
    dims      d x u64
    names     d null-terminated UTF-8 strings
    mask_flag u8       1 if a face-mask section follows the payload
    payload   8 * prod(dims) bytes, row-major float64 (IEEE-754, LE)
    mask      dims[0] * dims[1] bytes (u8, 1 = valid cell), only if flagged

The mask covers the first two axes (the face that gets clustered).
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError
from .tensor import DenseTensor

__all__ = ["MAGIC", "save_tensor", "load_tensor"]

MAGIC = b"CGCTENS1"
_MAX_AXES = 64


def save_tensor(path, t: DenseTensor, mask=None) -> None:
    """Write a tensor (and optional face mask) to ``path``."""
    if mask is not None:
        if t.ndim < 2:
            raise ValueError("a face mask requires at least 2 axes")
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (t.dims[0], t.dims[1]):
            raise ValueError(f"mask shape {mask.shape} does not match face {t.dims[:2]}")
    parts = [MAGIC, struct.pack("<I", t.ndim)]
    parts.append(struct.pack(f"<{t.ndim}Q", *t.dims))
    for name in t.axis_names:
        encoded = name.encode("utf-8")
        if b"\0" in encoded:
            raise ValueError("axis names cannot contain NUL")
        parts.append(encoded + b"\0")
    parts.append(struct.pack("<B", 1 if mask is not None else 0))
    parts.append(np.ascontiguousarray(t.data, dtype="<f8").tobytes())
    if mask is not None:
        parts.append(mask.astype(np.uint8).tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_tensor(path) -> tuple[DenseTensor, np.ndarray | None]:
    """Read a tensor written by save_tensor; returns (tensor, mask-or-None)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 4 or blob[: len(MAGIC)] != MAGIC:
        raise FormatError(f"{path}: bad magic, not a tensor file")
    off = len(MAGIC)
    (d,) = struct.unpack_from("<I", blob, off)
    off += 4
    if not 1 <= d <= _MAX_AXES:
        raise FormatError(f"{path}: implausible axis count {d}")
    if len(blob) < off + 8 * d:
        raise FormatError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{d}Q", blob, off)
    off += 8 * d
    names = []
    for _ in range(d):
        end = blob.find(b"\0", off)
        if end < 0:
            raise FormatError(f"{path}: unterminated axis name")
        names.append(blob[off:end].decode("utf-8"))
        off = end + 1
    if len(blob) < off + 1:
        raise FormatError(f"{path}: missing mask flag")
    mask_flag = blob[off]
    off += 1
    if mask_flag not in (0, 1):
        raise FormatError(f"{path}: invalid mask flag {mask_flag}")
    count = 1
    for n in dims:
        count *= int(n)
    payload_bytes = 8 * count
    if len(blob) < off + payload_bytes:
        raise FormatError(
            f"{path}: payload truncated ({len(blob) - off} bytes, need {payload_bytes})"
        )
    data = np.frombuffer(blob, dtype="<f8", count=count, offset=off).astype(
        np.float64, copy=True
    )
    off += payload_bytes
    mask = None
    if mask_flag:
        if d < 2:
            raise FormatError(f"{path}: mask flagged on a {d}-way tensor")
        face = int(dims[0]) * int(dims[1])
        if len(blob) < off + face:
            raise FormatError(f"{path}: mask section truncated")
        mask = (
            np.frombuffer(blob, dtype=np.uint8, count=face, offset=off)
            .reshape(int(dims[0]), int(dims[1]))
            .astype(bool)
        )
        off += face
    if len(blob) != off:
        raise FormatError(f"{path}: {len(blob) - off} trailing bytes")
    return DenseTensor(tuple(int(n) for n in dims), data, tuple(names)), mask
