"""Bit vector helpers: text form, enumeration and random vectors.

Vectors are 1-d float arrays with entries 0 and 1. Integer index ``k`` encodes
``x_i = (k >> i) & 1`` (x_0 is the least significant bit).
"""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from .config import caps, check_cap
from .errors import InstanceError, ParseError


def from_string(s: str) -> np.ndarray:
    if not s:
        raise ParseError("empty bit string", 0)
    for p, ch in enumerate(s):
        if ch not in "01":
            raise ParseError(f"illegal character {ch!r} in bit string", p)
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8).astype(np.float64) - 48.0


def to_string(x) -> str:
    x = np.asarray(x)
    if x.ndim != 1:
        raise InstanceError("to_string takes a single bit vector")
    return "".join("1" if v else "0" for v in x)


def to_index(x) -> int:
    """Integer index of a bit vector under the package bit order."""
    k = 0
    for i, v in enumerate(np.asarray(x)):
        if v:
            k |= 1 << i
    return k


def from_index(k: int, n: int) -> np.ndarray:
    return ((k >> np.arange(n, dtype=np.int64)) & 1).astype(np.float64)


def all_bitvectors(n: int) -> Iterator[np.ndarray]:
    """Yield all 2^n vectors in ascending index order. No size cap."""
    if n < 1:
        raise InstanceError("n must be at least 1")
    for k in range(1 << n):
        yield from_index(k, n)


def all_bitvectors_array(n: int, cap: int | None = None) -> np.ndarray:
    """All 2^n vectors as rows of a ``(2**n, n)`` array, in index order."""
    if n < 1:
        raise InstanceError("n must be at least 1")
    check_cap("all_bitvectors_array", n, caps.array if cap is None else cap)
    k = np.arange(1 << n, dtype=np.int64)
    return ((k[:, None] >> np.arange(n)) & 1).astype(np.float64)


def gray_sequence(n: int) -> Iterator[int]:
    """Flip indices of the reflected Gray code: the number of trailing zeros
    of ``k`` for ``k = 1 .. 2**n - 1``. Starting at all-zeros, applying them
    in order visits every vector once."""
    if n < 1:
        raise InstanceError("n must be at least 1")
    for k in range(1, 1 << n):
        yield (k & -k).bit_length() - 1


def random_bits(n: int, seed: int | None = None) -> np.ndarray:
    if n < 1:
        raise InstanceError("n must be at least 1")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, n).astype(np.float64)


def flip(x, *positions: int) -> np.ndarray:
    y = np.array(x, dtype=np.float64)
    for p in positions:
        y[p] = 1.0 - y[p]
    return y
