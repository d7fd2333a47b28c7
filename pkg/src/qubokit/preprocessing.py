"""Optimality-preserving instance reduction.

:func:`qpro_plus` finds variables (and variable pairs) whose value in some
optimal solution can be decided from the weights alone.
:func:`reduce_dynamic_range` merges weights with neighboring values while
keeping at least one original minimizer optimal.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from .assignment import PartialAssignment
from .core import QuboInstance
from .solving import brute_force, local_search


@dataclass
class PersistencyReport:
    """Result of :func:`qpro_plus`.

    ``rules_fired`` lists ``(rule, variables)`` in firing order, with
    variables given as full-space indices.
    """

    assignment: PartialAssignment
    rules_fired: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)

    def apply(self, q: QuboInstance) -> tuple[QuboInstance, float]:
        return self.assignment.apply(q)

    def __str__(self) -> str:
        return str(self.assignment)


def _find_rule(q: QuboInstance):
    """First applicable rule as ``(name, constraint)`` in reduced indices."""
    n = q.n
    c = np.diag(q.m)
    r = q.m + q.m.T
    np.fill_diagonal(r, 0.0)
    pos = np.maximum(r, 0.0)
    neg = np.minimum(r, 0.0)
    dpos = pos.sum(axis=1)
    dneg = neg.sum(axis=1)
    for i in range(n):
        if c[i] + dneg[i] >= 0:
            return "R0", (i, None, 0)
        if c[i] + dpos[i] <= 0:
            return "R1", (i, None, 1)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            rij = r[i, j]
            pos_wo = dpos[i] - pos[i, j]
            neg_wo = dneg[i] - neg[i, j]
            # x_j = 1 forces x_i = 1 and x_j = 0 forces x_i = 0
            if c[i] + rij + pos_wo <= 0 and c[i] + neg_wo >= 0:
                return "R2", (i, j, 0)
            # x_j = 1 forces x_i = 0 and x_j = 0 forces x_i = 1
            if c[i] + rij + neg_wo >= 0 and c[i] + pos_wo <= 0:
                return "R3", (i, j, 1)
    return None


def qpro_plus(q: QuboInstance) -> PersistencyReport:
    """Greedy persistency search.

    With ``c_i = Q_ii``, symmetric couplings ``r_ij`` and ``D_i^+`` / ``D_i^-``
    the sums of the positive / negative couplings of ``i``:

    * R0: ``c_i + D_i^- >= 0`` fixes ``x_i = 0``
    * R1: ``c_i + D_i^+ <= 0`` fixes ``x_i = 1``
    * R2: ``c_i + r_ij + D_i^{+,-j} <= 0`` and ``c_i + D_i^{-,-j} >= 0``
      tie ``x_i = x_j``
    * R3: ``c_i + r_ij + D_i^{-,-j} >= 0`` and ``c_i + D_i^{+,-j} <= 0``
      tie ``x_i != x_j``

    Single-variable rules are scanned before pairs. After every firing the
    constraint is substituted and the scan restarts on the smaller instance.
    Each rule keeps at least one minimizer, so the minimum energy of the
    reduced instance plus its constant equals that of ``q``.
    """
    full = PartialAssignment(q.n)
    current = q
    fired: list[tuple[str, tuple[int, ...]]] = []
    while current.n > 0:
        hit = _find_rule(current)
        if hit is None:
            break
        name, (i, j, par) = hit
        step = PartialAssignment(current.n, [(i, j, par)])
        current, _ = step.apply(current)
        fi = full.free[i]
        fj = None if j is None else full.free[j]
        full = full.constrain([(fi, fj, par)])
        fired.append((name, (fi,) if fj is None else (fi, fj)))
    return PersistencyReport(full, fired)


# ---------------------------------------------------------------------------
# bounds


def subspace_lower_bound(q: QuboInstance) -> float:
    """Sum of the negative weights; no vector can do better."""
    return float(np.minimum(q.m, 0.0).sum())


def subspace_upper_bound(q: QuboInstance, seed: int | None = 0, restarts: int = 4) -> float:
    """Energy of the best local minimum from ``restarts`` random starts."""
    if q.n == 0:
        return 0.0
    return local_search(q, restarts=restarts, seed=seed).energy


def _bounds(q: QuboInstance, seed, exact_below: int) -> tuple[float, float]:
    if q.n == 0:
        return 0.0, 0.0
    if q.n <= exact_below:
        e = brute_force(q).energy
        return e, e
    return subspace_lower_bound(q), subspace_upper_bound(q, seed)


# ---------------------------------------------------------------------------
# dynamic range


def _dr(values: np.ndarray) -> float:
    u = np.unique(values)
    if u.size < 2:
        return 0.0
    return float(np.log2((u[-1] - u[0]) / np.min(np.diff(u))))


_MARGIN = 1e-9


def _position_bounds(q: QuboInstance, i: int, j: int, seed, exact_below: int):
    """Energy bounds on the subspace where term (i, j) is active (A) and on
    its complement (B)."""
    n = q.n

    def clamp(fixed):
        pa = PartialAssignment(n, [(v, None, b) for v, b in fixed])
        sub, const = pa.apply(q)
        lo, hi = _bounds(sub, seed, exact_below)
        return lo + const, hi + const

    if i == j:
        a = clamp([(i, 1)])
        b = clamp([(i, 0)])
    else:
        a = clamp([(i, 1), (j, 1)])
        b0 = clamp([(i, 0)])
        b1 = clamp([(i, 1), (j, 0)])
        b = (min(b0[0], b1[0]), min(b0[1], b1[1]))
    return a, b


def _is_safe(delta: float, bounds) -> bool:
    """Whether changing the active-subspace energies by ``delta`` keeps the
    new minimizers a subset of the old ones."""
    (lb_a, ub_a), (lb_b, ub_b) = bounds
    if delta > 0:
        return ub_b <= lb_a or delta < lb_b - ub_a - _MARGIN
    return ub_a <= lb_b or -delta < lb_a - ub_b - _MARGIN


def dynamic_range_steps(
    q: QuboInstance, seed: int | None = 0, exact_below: int = 16, max_steps: int | None = None
) -> Iterator[QuboInstance]:
    """Yield the instance after each accepted move of
    :func:`reduce_dynamic_range`."""
    m = np.array(q.m)
    n = q.n
    rows, cols = np.triu_indices(n)
    steps = 0
    while max_steps is None or steps < max_steps:
        values = m[rows, cols]
        current = _dr(values)
        if current == 0.0:
            return
        distinct = np.unique(values)
        candidates = []
        for p, (i, j) in enumerate(zip(rows, cols)):
            w = values[p]
            k = int(np.searchsorted(distinct, w))
            for target in (distinct[k - 1] if k > 0 else None, distinct[k + 1] if k + 1 < distinct.size else None):
                if target is None:
                    continue
                trial = values.copy()
                trial[p] = target
                gain = current - _dr(trial)
                if gain > 1e-12:
                    candidates.append((-gain, int(i), int(j), float(target - w), float(target)))
        candidates.sort()
        inst = QuboInstance(m)
        cache = {}
        for _, i, j, delta, target in candidates:
            if (i, j) not in cache:
                cache[i, j] = _position_bounds(inst, i, j, seed, exact_below)
            if _is_safe(delta, cache[i, j]):
                m[i, j] = target
                steps += 1
                yield QuboInstance(m)
                break
        else:
            return


def reduce_dynamic_range(
    q: QuboInstance, seed: int | None = 0, exact_below: int = 16, max_steps: int | None = None
) -> QuboInstance:
    """Lower the dynamic range without losing the optimum.

    Each move shifts one weight onto the nearest distinct value above or
    below it. Shifting weight ``(i, j)`` by ``delta`` changes the energy only
    on the subspace A where ``x_i = x_j = 1``; with bounds on the minimum
    energy inside A and its complement B the move is accepted when

    * ``delta > 0`` and ``ub(B) <= lb(A)``, or ``delta < lb(B) - ub(A)``
    * ``delta < 0`` and ``ub(A) <= lb(B)``, or ``-delta < lb(A) - ub(B)``

    which guarantees that every minimizer of the result minimizes ``q``.
    Among safe moves the one with the largest decrease in dynamic range wins
    (smallest ``(i, j)`` on ties). Lower bounds are the sum of negative
    weights and upper bounds come from local search; sub-instances with at
    most ``exact_below`` variables are solved exactly instead.
    """
    out = q
    for out in dynamic_range_steps(q, seed=seed, exact_below=exact_below, max_steps=max_steps):
        pass
    return out
