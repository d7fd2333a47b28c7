"""The QUBO instance type.

An instance is characterized by an upper-triangular weight matrix ``Q``; the
energy of a binary vector ``x`` is ``sum_{i<=j} Q[i, j] * x[i] * x[j]``.
Diagonal entries are linear terms because ``x_i**2 == x_i``.

Bit order is fixed throughout the package: position ``p`` of a vector is
variable ``x_p``, and an integer index ``k`` stands for the vector with
``x_i = (k >> i) & 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InstanceError


def _as_bits(q_n: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != q_n:
        raise InstanceError(f"expected bit vector(s) of length {q_n}, got shape {x.shape}")
    return x


class QuboInstance:
    """Immutable QUBO instance.

    Parameters
    ----------
    weights : array_like, shape (n, n)
        Any square matrix; it is folded into upper-triangular form with
        ``Q_ij + Q_ji`` above the diagonal, which preserves ``z^T m z``.
    """

    __slots__ = ("_m",)

    def __init__(self, weights):
        m = np.array(weights, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InstanceError(f"weight matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InstanceError("weight matrix contains NaN or Inf")
        m = np.triu(m) + np.triu(m.T, 1)
        m.setflags(write=False)
        self._m = m

    @classmethod
    def from_matrix(cls, m) -> QuboInstance:
        return cls(m)

    @classmethod
    def random(
        cls,
        n: int,
        distr: str = "normal",
        density: float = 1.0,
        seed: int | None = None,
    ) -> QuboInstance:
        """Random instance; each upper-triangle entry is nonzero with
        probability ``density``. ``distr`` is ``'normal'`` (standard normal) or
        ``'uniform'`` (uniform on [-1, 1])."""
        if n < 1:
            raise InstanceError("n must be at least 1")
        if not 0.0 <= density <= 1.0:
            raise InstanceError(f"density must lie in [0, 1], got {density}")
        rng = np.random.default_rng(seed)
        if distr == "normal":
            values = rng.standard_normal((n, n))
        elif distr == "uniform":
            values = rng.uniform(-1.0, 1.0, (n, n))
        else:
            raise InstanceError(f"unknown distribution {distr!r}")
        mask = rng.random((n, n)) < density
        return cls(np.triu(np.where(mask, values, 0.0)))

    @classmethod
    def zeros(cls, n: int) -> QuboInstance:
        return cls(np.zeros((n, n)))

    @property
    def m(self) -> np.ndarray:
        """Upper-triangular weight matrix (read-only view)."""
        return self._m

    @property
    def n(self) -> int:
        return self._m.shape[0]

    def symmetric(self) -> np.ndarray:
        return (self._m + self._m.T) / 2

    def __repr__(self) -> str:
        return f"QuboInstance(n={self.n})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuboInstance):
            return NotImplemented
        return self._m.shape == other._m.shape and bool(np.array_equal(self._m, other._m))

    __hash__ = None

    def nnz(self) -> int:
        return int(np.count_nonzero(self._m))

    def density(self) -> float:
        n = self.n
        return self.nnz() / (n * (n + 1) / 2) if n else 0.0

    def _split(self):
        c = np.diag(self._m)
        r = self._m + self._m.T
        np.fill_diagonal(r, 0.0)
        return c, r

    def energy(self, x):
        """Energy of one vector (float) or of each row of a matrix (array)."""
        x = _as_bits(self.n, x)
        e = np.einsum("...i,...i->...", x @ self._m, x)
        return float(e) if x.ndim == 1 else e

    __call__ = energy

    def dx(self, x):
        """Energy change of flipping each bit: ``E(flip_i(x)) - E(x)``."""
        x = _as_bits(self.n, x)
        c, r = self._split()
        return (1.0 - 2.0 * x) * (c + x @ r)

    def dx2(self, x) -> np.ndarray:
        """Matrix of energy changes when bits i and j are flipped together.

        The diagonal equals :meth:`dx`.
        """
        x = _as_bits(self.n, x)
        if x.ndim != 1:
            raise InstanceError("dx2 takes a single bit vector")
        d = self.dx(x)
        _, r = self._split()
        s = 1.0 - 2.0 * x
        out = d[:, None] + d[None, :] + np.outer(s, s) * r
        np.fill_diagonal(out, d)
        return out

    def unique_weights(self) -> np.ndarray:
        return np.unique(self._m[np.triu_indices(self.n)])

    def dynamic_range(self) -> float:
        """``log2(max D / min D)`` where D holds the pairwise differences of
        the distinct upper-triangle values (zeros included). 0 if fewer than
        two distinct values."""
        u = self.unique_weights()
        if u.size < 2:
            return 0.0
        return float(np.log2((u[-1] - u[0]) / np.min(np.diff(u))))

    def to_ising(self) -> IsingModel:
        """Equivalent Ising model under ``x_i = (s_i + 1) / 2``."""
        c, r = self._split()
        j = np.triu(self._m, 1) / 4
        h = c / 2 + r.sum(axis=1) / 4
        const = float(np.triu(self._m, 1).sum() / 4 + c.sum() / 2)
        return IsingModel(h=h, J=j, constant=const)


@dataclass(frozen=True)
class IsingModel:
    """``E(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + constant`` over
    spins in {-1, +1}."""

    h: np.ndarray
    J: np.ndarray
    constant: float = 0.0

    def energy(self, s):
        s = np.asarray(s, dtype=np.float64)
        e = np.einsum("...i,...i->...", s @ self.J, s) + s @ self.h + self.constant
        return float(e) if s.ndim == 1 else e

    def energy_of_bits(self, x):
        return self.energy(2.0 * np.asarray(x, dtype=np.float64) - 1.0)

    def to_qubo(self) -> tuple[QuboInstance, float]:
        """Inverse map; returns the instance and the constant offset."""
        n = self.h.shape[0]
        m = 4.0 * np.triu(self.J, 1)
        lin = 2.0 * self.h - 2.0 * (np.triu(self.J, 1).sum(axis=0) + np.triu(self.J, 1).sum(axis=1))
        m[np.diag_indices(n)] = lin
        const = float(self.constant - self.h.sum() + np.triu(self.J, 1).sum())
        return QuboInstance(m), const


@dataclass
class Solution:
    """A bit vector with its energy and solver diagnostics."""

    x: np.ndarray
    energy: float
    meta: dict[str, Any] = field(default_factory=dict)


def from_matrix(m) -> QuboInstance:
    return QuboInstance(m)


def random(n: int, distr: str = "normal", density: float = 1.0, seed: int | None = None) -> QuboInstance:
    return QuboInstance.random(n, distr=distr, density=density, seed=seed)
