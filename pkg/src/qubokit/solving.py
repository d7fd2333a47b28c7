"""Exact and heuristic solvers."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels as K
from .config import caps, check_cap
from .core import QuboInstance, Solution
from .errors import InstanceError

TIE_TOL = 1e-9


def prefix_split(n: int, threads: int) -> tuple[int, int]:
    """Number of fixed top bits and of walked low bits for ``threads``."""
    p = min(n, math.ceil(math.log2(threads))) if threads > 1 else 0
    return p, n - p


def prefix_state(n: int, nlow: int, prefix: int) -> tuple[np.ndarray, int]:
    base = prefix << nlow
    x = ((base >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)
    return x, base


def map_prefixes(kernel, n: int, threads: int):
    """Run ``kernel(x0, base, nlow)`` once per prefix of the top bits and
    return the results in prefix order."""
    p, nlow = prefix_split(n, threads)

    def task(prefix):
        x, base = prefix_state(n, nlow, prefix)
        return kernel(x, base, nlow)

    if threads <= 1 or p == 0:
        return [task(k) for k in range(1 << p)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(task, range(1 << p)))


def brute_force(
    q: QuboInstance,
    threads: int = 1,
    return_ties: bool = False,
    tie_cap: int = 1024,
    cap: int | None = None,
) -> Solution:
    """Exhaustive minimization by Gray-code walks.

    The top ``ceil(log2(threads))`` bits are fixed to each prefix and the
    remaining bits are walked in parallel. Among minimizers (energies within
    1e-9 of the best) the one with the smallest integer index is returned, so
    the result does not depend on ``threads``. With ``return_ties`` the
    minimizer indices (up to ``tie_cap``) are stored in ``meta['ties']``.
    """
    if threads < 1:
        raise InstanceError("threads must be at least 1")
    n = q.n
    check_cap("brute_force", n, caps.brute_force if cap is None else cap)
    if n == 0:
        return Solution(np.zeros(0), 0.0, {"threads": threads, "ties": [0]} if return_ties else {"threads": threads})
    c, ptr, idx, val = K.prepare(q.m)
    results = map_prefixes(
        lambda x, base, nlow: K.gray_minimum(c, ptr, idx, val, x, base, nlow, TIE_TOL, tie_cap if return_ties else 1),
        n,
        threads,
    )
    best = min(r[0] for r in results)
    tied = [r for r in results if r[0] <= best + TIE_TOL]
    k = min(r[1] for r in tied)
    x = ((k >> np.arange(n, dtype=np.int64)) & 1).astype(np.float64)
    meta = {"threads": threads, "index": int(k)}
    if return_ties:
        ties = sorted(int(t) for r in tied for t in r[2][: min(r[3], tie_cap)])
        meta["ties"] = ties[:tie_cap]
        meta["num_ties"] = int(sum(r[3] for r in tied))
    return Solution(x, q.energy(x), meta)


def local_search(q: QuboInstance, restarts: int = 10, seed: int | None = None) -> Solution:
    """Steepest descent from random starts.

    Each restart repeatedly flips the bit with the most negative flip cost
    (smallest index on ties) until no flip lowers the energy. The best local
    minimum over all restarts is returned; it is 1-opt.
    """
    if restarts < 1:
        raise InstanceError("restarts must be at least 1")
    n = q.n
    if n == 0:
        return Solution(np.zeros(0), 0.0, {"restarts": restarts, "seed": seed, "steps": 0})
    c, ptr, idx, val = K.prepare(q.m)
    rng = np.random.default_rng(seed)
    best_x, best_e, total = None, math.inf, 0
    for _ in range(restarts):
        x = rng.integers(0, 2, n).astype(np.int8)
        e, steps = K.steepest_descent(c, ptr, idx, val, x)
        total += steps
        if e < best_e:
            best_x, best_e = x.copy(), e
    x = best_x.astype(np.float64)
    return Solution(x, q.energy(x), {"restarts": restarts, "seed": seed, "steps": int(total)})


def auto_temperature(q: QuboInstance, seed: int | None = None, probes: int = 100) -> float:
    """Largest absolute flip cost seen at ``probes`` random vectors."""
    if q.n == 0:
        return 1.0
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 2, (probes, q.n)).astype(np.float64)
    t = float(np.max(np.abs(q.dx(x))))
    return t if t > 0 else 1.0


def simulated_annealing(
    q: QuboInstance,
    steps: int = 10_000,
    t0: float | str = "auto",
    alpha: float | None = None,
    seed: int | None = None,
    chunk: int = 1 << 16,
) -> Solution:
    """Single-flip Metropolis annealing with a geometric schedule.

    At step ``t`` a uniformly chosen bit is flipped if the energy does not
    increase, or otherwise with probability ``exp(-dE / T_t)`` where
    ``T_t = t0 * alpha**t``. ``alpha=None`` picks ``alpha`` so that the
    final temperature is ``1e-3 * t0``. Returns the best state seen.
    """
    if steps < 1:
        raise InstanceError("steps must be at least 1")
    if alpha is None:
        alpha = 1e-3 ** (1.0 / steps)
    if not 0.0 < alpha < 1.0:
        raise InstanceError(f"alpha must lie in (0, 1), got {alpha}")
    rng = np.random.default_rng(seed)
    if t0 == "auto":
        t0 = auto_temperature(q, seed=rng.integers(2**63))
    t0 = float(t0)
    if t0 <= 0:
        raise InstanceError("t0 must be positive")
    n = q.n
    if n == 0:
        return Solution(np.zeros(0), 0.0, {"steps": steps, "t0": t0, "alpha": alpha, "seed": seed})
    c, ptr, idx, val = K.prepare(q.m)
    x = rng.integers(0, 2, n).astype(np.int8)
    best_x = x.copy()
    e = q.energy(x)
    best = e
    log_alpha = math.log(alpha)
    accepted = 0
    for start in range(0, steps, chunk):
        size = min(chunk, steps - start)
        flips = rng.integers(0, n, size)
        unif = rng.random(size)
        temps = t0 * np.exp(log_alpha * np.arange(start, start + size))
        temps = np.maximum(temps, np.finfo(np.float64).tiny)
        e, best, acc = K.anneal(c, ptr, idx, val, x, best_x, e, best, temps, flips, unif)
        accepted += acc
    xb = best_x.astype(np.float64)
    meta = {"steps": steps, "t0": t0, "alpha": alpha, "seed": seed, "accepted": int(accepted)}
    return Solution(xb, q.energy(xb), meta)
