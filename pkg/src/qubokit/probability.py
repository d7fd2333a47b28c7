"""Gibbs distribution of an instance: ``P(x) = exp(-beta * E(x)) / Z``.

All quantities here are exact and exponential in ``n``; the sizes are bounded
by :data:`qubokit.config.caps`.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .config import caps, check_cap
from .core import QuboInstance
from .errors import InstanceError
from .solving import map_prefixes


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta > 0:
        raise InstanceError(f"beta must be positive, got {beta}")
    return beta


def _logaddexp_all(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    m = values.max()
    return float(m + np.log(np.exp(values - m).sum()))


def log_partition(q: QuboInstance, beta: float = 1.0, threads: int = 1, cap: int | None = None) -> float:
    """Natural log of ``sum_x exp(-beta E(x))``.

    Streams a Gray-code walk with a running log-sum-exp, so memory stays
    O(n). ``threads`` shards the walk by the top bits.
    """
    beta = _check_beta(beta)
    n = q.n
    check_cap("log_partition", n, caps.exact if cap is None else cap)
    if n == 0:
        return 0.0
    c, ptr, idx, val = K.prepare(q.m)
    parts = map_prefixes(lambda x, base, nlow: K.gray_logsumexp(c, ptr, idx, val, x, nlow, beta), n, threads)
    return _logaddexp_all(parts)


def partition_function(q: QuboInstance, beta: float = 1.0, log: bool = False) -> float:
    logz = log_partition(q, beta)
    return logz if log else float(np.exp(logz))


def energies(q: QuboInstance, cap: int | None = None) -> np.ndarray:
    """Energies of all ``2**n`` vectors in index order."""
    check_cap("energies", q.n, caps.array if cap is None else cap)
    c, ptr, idx, val = K.prepare(q.m)
    return K.gray_energies(c, ptr, idx, val, q.n)


def probabilities(q: QuboInstance, beta: float = 1.0, cap: int | None = None) -> np.ndarray:
    """Probability of every vector; entry ``k`` belongs to index ``k``."""
    beta = _check_beta(beta)
    check_cap("probabilities", q.n, caps.array if cap is None else cap)
    logits = -beta * energies(q, cap=cap)
    logits -= logits.max()
    p = np.exp(logits)
    return p / p.sum()


def pairwise_marginals(q: QuboInstance, beta: float = 1.0, threads: int = 1, cap: int | None = None) -> np.ndarray:
    """Symmetric matrix with ``M[i, j] = P[x_i = 1 and x_j = 1]`` and
    ``M[i, i] = P[x_i = 1]``."""
    beta = _check_beta(beta)
    n = q.n
    check_cap("pairwise_marginals", n, caps.exact if cap is None else cap)
    logz = log_partition(q, beta, threads=threads, cap=cap)
    c, ptr, idx, val = K.prepare(q.m)
    parts = map_prefixes(
        lambda x, base, nlow: K.gray_moments(c, ptr, idx, val, x, nlow, beta, logz), n, threads
    )
    upper = np.sum(parts, axis=0)
    m = upper + np.triu(upper, 1).T
    return np.clip(m, 0.0, 1.0)
