"""Binary tensor files and the image content hash used by the file adapter.

File layout (little-endian): magic ``STF1`` | u32 version=1 | u32 rank (>= 1)
| rank x u32 dims | product(dims) x f32 payload.  Values are widened to
float64 on load.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import TensorFormatError

MAGIC = b"STF1"
VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def write_tensor_file(t: np.ndarray, path: str | Path) -> None:
    """Serialize an array (rank >= 1) as a 32-bit tensor file."""
    t = np.asarray(t, dtype=np.float64)
    if t.ndim < 1:
        raise TensorFormatError("rank-0 tensors cannot be serialized; rank must be >= 1")
    header = struct.pack("<4sII", MAGIC, VERSION, t.ndim)
    dims = struct.pack(f"<{t.ndim}I", *t.shape)
    payload = t.astype("<f4").tobytes()
    Path(path).write_bytes(header + dims + payload)


def read_tensor_file(path: str | Path) -> np.ndarray:
    """Load a tensor file, validating magic, version, rank and byte counts."""
    raw = Path(path).read_bytes()
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise TensorFormatError(f"bad magic {raw[:4]!r}, expected {MAGIC!r}", offset=0)
    if len(raw) < 12:
        raise TensorFormatError(
            f"truncated header: got {len(raw)} bytes, need at least 12", offset=len(raw)
        )
    version, rank = struct.unpack_from("<II", raw, 4)
    if version != VERSION:
        raise TensorFormatError(f"unsupported version {version}", offset=4)
    if rank < 1:
        raise TensorFormatError(f"rank must be >= 1, got {rank}", offset=8)
    dims_end = 12 + 4 * rank
    if len(raw) < dims_end:
        raise TensorFormatError(
            f"truncated dims: got {len(raw)} bytes, need {dims_end}", offset=len(raw)
        )
    dims = struct.unpack_from(f"<{rank}I", raw, 12)
    if any(d < 1 for d in dims):
        raise TensorFormatError(f"dims must be positive, got {dims}", offset=12)
    count = int(np.prod(dims))
    expected = dims_end + 4 * count
    if len(raw) != expected:
        raise TensorFormatError(
            f"payload size mismatch: expected {expected} bytes, got {len(raw)}",
            offset=len(raw),
        )
    payload = np.frombuffer(raw, dtype="<f4", offset=dims_end, count=count)
    return payload.astype(np.float64).reshape(dims)


def image_hash(image: np.ndarray) -> str:
    """64-bit FNV-1a over the 32-bit little-endian pixel payload, as hex.

    Stable content key for file-adapter lookups; not a cryptographic hash.
    """
    data = np.ascontiguousarray(np.asarray(image, dtype=np.float64)).astype("<f4").tobytes()
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _U64
    return f"{h:016x}"
