"""Empirical distributions over bit vectors."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable

import numpy as np

from .bitvec import from_string, to_string
from .config import caps, check_cap
from .core import QuboInstance
from .errors import InstanceError, ParseError
from .probability import probabilities


class BinarySample:
    """Multiset of bit vectors of length ``n``, stored as bit-string counts.

    Text form: one bit string per line, optionally followed by ``×count``
    (an ASCII ``x`` is accepted on input).
    """

    def __init__(self, n: int, counts: dict[str, int] | None = None):
        if n < 1:
            raise InstanceError("n must be at least 1")
        self.n = n
        self.counts: Counter[str] = Counter()
        for key, cnt in (counts or {}).items():
            self._add(key, cnt)

    def _add(self, key: str, count: int) -> None:
        if len(key) != self.n or set(key) - {"0", "1"}:
            raise InstanceError(f"expected a bit string of length {self.n}, got {key!r}")
        if count < 1:
            raise InstanceError("counts must be positive")
        self.counts[key] += int(count)

    @classmethod
    def from_vectors(cls, xs: Iterable, n: int | None = None) -> BinarySample:
        xs = [np.asarray(x) for x in xs]
        if n is None:
            if not xs:
                raise InstanceError("cannot infer n from an empty collection")
            n = len(xs[0])
        s = cls(n)
        for x in xs:
            s.record(x)
        return s

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return self.total

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinarySample):
            return NotImplemented
        return self.n == other.n and self.counts == other.counts

    def __repr__(self) -> str:
        return f"BinarySample(n={self.n}, total={self.total}, distinct={len(self.counts)})"

    def _key(self, x) -> str:
        key = x if isinstance(x, str) else to_string(np.asarray(x))
        if len(key) != self.n:
            raise InstanceError(f"expected a vector of length {self.n}, got length {len(key)}")
        return key

    def _require_nonempty(self) -> int:
        total = self.total
        if total == 0:
            raise InstanceError("sample is empty")
        return total

    def record(self, x, count: int = 1) -> BinarySample:
        self._add(self._key(x), count)
        return self

    def count(self, x) -> int:
        return self.counts.get(self._key(x), 0)

    def empirical_probability(self, x) -> float:
        total = self._require_nonempty()
        return self.count(x) / total

    def keys_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct vectors as rows, and their counts."""
        keys = sorted(self.counts)
        xs = np.array([from_string(k) for k in keys]).reshape(len(keys), self.n)
        return xs, np.array([self.counts[k] for k in keys], dtype=np.int64)

    def subsample(self, m: int, seed: int | None = None) -> BinarySample:
        """``m`` draws without replacement."""
        total = self.total
        if not 1 <= m <= total:
            raise InstanceError(f"subsample size must lie in [1, {total}], got {m}")
        keys = sorted(self.counts)
        counts = np.array([self.counts[k] for k in keys], dtype=np.int64)
        rng = np.random.default_rng(seed)
        picked = rng.multivariate_hypergeometric(counts, m)
        return BinarySample(self.n, {k: int(c) for k, c in zip(keys, picked) if c > 0})

    def sufficient_statistic(self) -> np.ndarray:
        """Upper-triangular matrix of averaged ``x_i * x_j`` (diagonal holds
        the first moments)."""
        total = self._require_nonempty()
        xs, counts = self.keys_array()
        s = (xs * counts[:, None]).T @ xs / total
        return np.triu(s)

    def probability_vector(self, cap: int | None = None) -> np.ndarray:
        """Empirical distribution over all ``2**n`` indices."""
        total = self._require_nonempty()
        check_cap("probability_vector", self.n, caps.array if cap is None else cap)
        p = np.zeros(1 << self.n)
        for key, cnt in self.counts.items():
            p[int(key[::-1], 2)] = cnt / total
        return p

    def dumps(self) -> str:
        return "".join(f"{k}×{c}\n" if c > 1 else f"{k}\n" for k, c in sorted(self.counts.items()))

    @classmethod
    def loads(cls, text: str, n: int | None = None) -> BinarySample:
        sample = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            key, sep, cnt = line.replace("×", "x").partition("x")
            key = key.strip()
            try:
                count = int(cnt) if sep else 1
            except ValueError:
                raise ParseError(f"bad count on line {lineno}: {cnt!r}") from None
            if sample is None:
                sample = cls(n if n is not None else len(key))
            try:
                sample._add(key, count)
            except InstanceError as e:
                raise ParseError(f"line {lineno}: {e}") from None
        if sample is None:
            if n is None:
                raise ParseError("no vectors in sample text")
            sample = cls(n)
        return sample


def _as_distribution(d, n: int | None = None):
    if isinstance(d, BinarySample):
        total = d._require_nonempty()
        return d.n, {int(k[::-1], 2): c / total for k, c in d.counts.items()}
    p = np.asarray(d, dtype=np.float64)
    if p.ndim != 1 or p.size < 2 or p.size & (p.size - 1):
        raise InstanceError("a probability vector must have length 2**n")
    return p.size.bit_length() - 1, p


def hellinger(p, q) -> float:
    """Hellinger distance ``sqrt(sum (sqrt p - sqrt q)**2) / sqrt 2``.

    Either argument may be a :class:`BinarySample` or an exact probability
    vector of length ``2**n`` in index order. The result lies in [0, 1].
    """
    n_p, dp = _as_distribution(p)
    n_q, dq = _as_distribution(q)
    if n_p != n_q:
        raise InstanceError(f"distributions over different n ({n_p} vs {n_q})")
    if isinstance(dp, dict) and isinstance(dq, dict):
        keys = dp.keys() | dq.keys()
        sq = sum((np.sqrt(dp.get(k, 0.0)) - np.sqrt(dq.get(k, 0.0))) ** 2 for k in keys)
    else:
        vp, vq = (_dense(d, n_p) for d in (dp, dq))
        sq = np.sum((np.sqrt(vp) - np.sqrt(vq)) ** 2)
    return float(min(1.0, np.sqrt(sq / 2.0)))


def _dense(d, n: int) -> np.ndarray:
    if isinstance(d, dict):
        check_cap("hellinger", n, caps.array)
        v = np.zeros(1 << n)
        for k, val in d.items():
            v[k] = val
        return v
    return d


def gibbs_sample_exact(q: QuboInstance, beta: float, m: int, seed: int | None = None) -> BinarySample:
    """``m`` independent draws from the Gibbs distribution by inverse CDF."""
    if m < 1:
        raise InstanceError("m must be at least 1")
    p = probabilities(q, beta)
    cdf = np.cumsum(p)
    rng = np.random.default_rng(seed)
    draws = np.minimum(np.searchsorted(cdf, rng.random(m) * cdf[-1], side="right"), p.size - 1)
    idx, counts = np.unique(draws, return_counts=True)
    n = q.n
    return BinarySample(n, {format(int(k), f"0{n}b")[::-1]: int(c) for k, c in zip(idx, counts)})
