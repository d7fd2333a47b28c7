"""Binary instance files.

Layout (all little-endian)::

    offset 0   magic  b"QBF1"
    offset 4   mode   u8       0 = dense, 1 = sparse
    offset 5   n      u32
    offset 9   payload

Dense payload: the ``n(n+1)/2`` upper-triangle entries in row-major order as
f64. Sparse payload: ``nnz`` as u64, then ``nnz`` records ``(row u32, col u32,
value f64)`` sorted by ``(row, col)`` with ``row <= col``.

The sparse form is written iff ``16 * nnz < 8 * n(n+1)/2``.
"""

from __future__ import annotations

import io
import os
import struct

import numpy as np

from .core import QuboInstance
from .errors import FormatError

MAGIC = b"QBF1"
DENSE, SPARSE = 0, 1
_HEADER = struct.Struct("<4sBI")
_RECORD = np.dtype([("row", "<u4"), ("col", "<u4"), ("value", "<f8")])


def choose_mode(n: int, nnz: int) -> int:
    return SPARSE if 16 * nnz < 8 * (n * (n + 1) // 2) else DENSE


def dumps(q: QuboInstance) -> bytes:
    n = q.n
    rows, cols = np.triu_indices(n)
    values = q.m[rows, cols]
    nz = values != 0
    mode = choose_mode(n, int(nz.sum()))
    out = [_HEADER.pack(MAGIC, mode, n)]
    if mode == DENSE:
        out.append(values.astype("<f8").tobytes())
    else:
        rec = np.empty(int(nz.sum()), dtype=_RECORD)
        rec["row"], rec["col"], rec["value"] = rows[nz], cols[nz], values[nz]
        out.append(struct.pack("<Q", rec.size))
        out.append(rec.tobytes())
    return b"".join(out)


def loads(data: bytes) -> QuboInstance:
    if len(data) < _HEADER.size:
        raise FormatError("truncated header", len(data))
    magic, mode, n = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    off = _HEADER.size
    m = np.zeros((n, n))
    if mode == DENSE:
        count = n * (n + 1) // 2
        end = off + 8 * count
        if len(data) < end:
            raise FormatError(f"truncated dense payload, expected {8 * count} bytes", len(data))
        m[np.triu_indices(n)] = np.frombuffer(data, dtype="<f8", count=count, offset=off)
    elif mode == SPARSE:
        if len(data) < off + 8:
            raise FormatError("truncated sparse count", len(data))
        (nnz,) = struct.unpack_from("<Q", data, off)
        off += 8
        end = off + _RECORD.itemsize * nnz
        if len(data) < end:
            raise FormatError(f"truncated sparse payload, expected {nnz} records", len(data))
        rec = np.frombuffer(data, dtype=_RECORD, count=nnz, offset=off)
        rows = rec["row"].astype(np.int64)
        cols = rec["col"].astype(np.int64)
        bad = np.flatnonzero((rows > cols) | (cols >= n))
        if bad.size:
            k = int(bad[0])
            raise FormatError(
                f"sparse record {k} at ({rows[k]}, {cols[k]}) is not in the upper triangle of n={n}",
                off + _RECORD.itemsize * k,
            )
        keys = rows * max(n, 1) + cols
        bad = np.flatnonzero(np.diff(keys) <= 0)
        if bad.size:
            k = int(bad[0]) + 1
            raise FormatError(f"sparse record {k} is unsorted or duplicated", off + _RECORD.itemsize * k)
        m[rows, cols] = rec["value"]
    else:
        raise FormatError(f"unknown mode byte {mode}", 4)
    if end != len(data):
        raise FormatError(f"{len(data) - end} trailing bytes", end)
    if not np.all(np.isfinite(m)):
        raise FormatError("non-finite weight in payload", _HEADER.size)
    return QuboInstance(m)


def save(q: QuboInstance, destination) -> None:
    """Write to a path or a binary file object."""
    data = dumps(q)
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "wb") as fh:
            fh.write(data)
    else:
        destination.write(data)


def load(source) -> QuboInstance:
    """Read from a path, a binary file object or a bytes buffer."""
    if isinstance(source, (bytes, bytearray, memoryview)):
        return loads(bytes(source))
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return loads(fh.read())
    if isinstance(source, io.TextIOBase):
        raise TypeError("instance files must be opened in binary mode")
    return loads(source.read())
