"""Compiled inner loops (numba).

All walks use the same incremental bookkeeping: ``g[j]`` is the energy change
of flipping bit ``j`` in the current state. Flipping bit ``b`` adds ``g[b]`` to
the energy, negates ``g[b]`` and touches only the neighbors of ``b``.
"""

import numpy as np
from numba import njit


def couplings(m):
    """Split an upper-triangular weight matrix into linear terms and the
    symmetric, zero-diagonal coupling matrix."""
    c = np.ascontiguousarray(np.diag(m), dtype=np.float64)
    r = m + m.T
    np.fill_diagonal(r, 0.0)
    return c, np.ascontiguousarray(r, dtype=np.float64)


def neighbors(r):
    """CSR adjacency of a symmetric coupling matrix."""
    n = r.shape[0]
    rows, cols = np.nonzero(r)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, rows + 1, 1)
    ptr = np.cumsum(ptr)
    return ptr, cols.astype(np.int64), r[rows, cols].astype(np.float64)


def prepare(m):
    """``(c, ptr, idx, val)`` for the walk kernels."""
    c, r = couplings(m)
    return (c, *neighbors(r))


@njit(cache=True, nogil=True)
def _init_state(c, ptr, idx, val, x):
    n = c.shape[0]
    g = np.empty(n)
    e = 0.0
    for i in range(n):
        s = c[i]
        for p in range(ptr[i], ptr[i + 1]):
            s += val[p] * x[idx[p]]
        g[i] = (1.0 - 2.0 * x[i]) * s
        if x[i] == 1:
            # each pair counted twice in the symmetric sum
            h = c[i]
            for p in range(ptr[i], ptr[i + 1]):
                h += 0.5 * val[p] * x[idx[p]]
            e += h
    return e, g


@njit(cache=True, nogil=True)
def _flip(b, x, g, ptr, idx, val):
    d = 1.0 - 2.0 * x[b]  # +1 when bit goes 0 -> 1
    x[b] = 1 - x[b]
    for p in range(ptr[b], ptr[b + 1]):
        j = idx[p]
        g[j] += (1.0 - 2.0 * x[j]) * val[p] * d
    g[b] = -g[b]


@njit(cache=True, nogil=True)
def _ctz(k):
    b = 0
    while (k & 1) == 0:
        k >>= 1
        b += 1
    return b


@njit(cache=True, nogil=True)
def gray_minimum(c, ptr, idx, val, x, base, nlow, tol, tie_cap):
    """Gray-walk the lowest ``nlow`` bits of ``x`` (upper bits fixed).

    Returns (best energy, best index, tie indices, tie count). Ties are states
    within ``tol`` of the best; the reported index is the smallest among them.
    """
    e, g = _init_state(c, ptr, idx, val, x)
    cur = base
    best = e
    best_idx = cur
    ties = np.empty(max(tie_cap, 1), dtype=np.int64)
    ties[0] = cur
    nties = 1
    for k in range(1, np.int64(1) << nlow):
        b = _ctz(k)
        e += g[b]
        _flip(b, x, g, ptr, idx, val)
        cur ^= np.int64(1) << b
        if e < best - tol:
            best = e
            best_idx = cur
            ties[0] = cur
            nties = 1
        elif e <= best + tol:
            if e < best:
                best = e
            if cur < best_idx:
                best_idx = cur
            if nties < tie_cap:
                ties[nties] = cur
            nties += 1
    return best, best_idx, ties, nties


@njit(cache=True, nogil=True)
def gray_logsumexp(c, ptr, idx, val, x, nlow, beta):
    """log sum exp(-beta E) over the lowest ``nlow`` bits, streaming."""
    e, g = _init_state(c, ptr, idx, val, x)
    m = -beta * e
    s = 1.0
    for k in range(1, np.int64(1) << nlow):
        b = _ctz(k)
        e += g[b]
        _flip(b, x, g, ptr, idx, val)
        v = -beta * e
        if v > m:
            s = s * np.exp(m - v) + 1.0
            m = v
        else:
            s += np.exp(v - m)
    return m + np.log(s)


@njit(cache=True, nogil=True)
def gray_energies(c, ptr, idx, val, n):
    """Energies of all 2^n states, indexed by the integer encoding."""
    x = np.zeros(n, dtype=np.int8)
    e, g = _init_state(c, ptr, idx, val, x)
    out = np.empty(np.int64(1) << n)
    out[0] = e
    cur = np.int64(0)
    for k in range(1, np.int64(1) << n):
        b = _ctz(k)
        e += g[b]
        _flip(b, x, g, ptr, idx, val)
        cur ^= np.int64(1) << b
        out[cur] = e
    return out


@njit(cache=True, nogil=True)
def gray_moments(c, ptr, idx, val, x, nlow, beta, logz):
    """Sum of P(x) x x^T over the lowest ``nlow`` bits (upper bits fixed)."""
    n = c.shape[0]
    e, g = _init_state(c, ptr, idx, val, x)
    acc = np.zeros((n, n))
    ones = np.empty(n, dtype=np.int64)
    for k in range(np.int64(1) << nlow):
        if k > 0:
            b = _ctz(k)
            e += g[b]
            _flip(b, x, g, ptr, idx, val)
        p = np.exp(-beta * e - logz)
        cnt = 0
        for i in range(n):
            if x[i] == 1:
                ones[cnt] = i
                cnt += 1
        for a in range(cnt):
            ia = ones[a]
            for bb in range(a, cnt):
                acc[ia, ones[bb]] += p
    return acc


@njit(cache=True, nogil=True)
def steepest_descent(c, ptr, idx, val, x):
    """Flip the most improving bit until no flip improves. Modifies ``x``."""
    n = c.shape[0]
    e, g = _init_state(c, ptr, idx, val, x)
    steps = 0
    while n > 0:
        b = 0
        for i in range(1, n):
            if g[i] < g[b]:
                b = i
        if g[b] >= 0.0:
            break
        e += g[b]
        _flip(b, x, g, ptr, idx, val)
        steps += 1
    return e, steps


@njit(cache=True, nogil=True)
def anneal(c, ptr, idx, val, x, best_x, e, best, temps, flips, unif):
    """Metropolis single-flip chain over pre-drawn proposals and uniforms."""
    n = c.shape[0]
    _, g = _init_state(c, ptr, idx, val, x)
    accepted = 0
    for t in range(flips.shape[0]):
        b = flips[t]
        de = g[b]
        if de <= 0.0 or unif[t] < np.exp(-de / temps[t]):
            e += de
            _flip(b, x, g, ptr, idx, val)
            accepted += 1
            if e < best:
                best = e
                for i in range(n):
                    best_x[i] = x[i]
    return e, best, accepted
