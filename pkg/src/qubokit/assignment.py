"""Partial assignments (clamping).

A partial assignment fixes variables to constants or ties them to other
variables, either equal or negated. Internally it is a union-find over the
variables plus one extra node ``ZERO`` (the constant 0); every link carries a
parity bit, so ``x = 1`` is stored as "x is the negation of ZERO". Each class
not containing ZERO has a free representative, its smallest variable index.

Two text formats are accepted.

Assignment expressions::

    stmt_list := stmt (';' stmt)* [';']
    stmt      := varlist ('=' | '!=') rhs
    varlist   := var (',' var)*
    var       := 'x' digits
    rhs       := '0' | '1' | ['!'] var

e.g. ``'x0, x3 = 0; x7 = 1; x12 = x8; x13 != x9'`` or ``'x5=!x4'``.

Bit vector expressions, one token per variable::

    '0' | '1' | '*' | '[' digits ']' | '[!' digits ']'

e.g. ``'**00**[1]*1[!4]1'``: ``*`` is free, ``[k]`` copies ``x_k`` and
``[!k]`` negates it.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping

import numpy as np

from .config import caps, check_cap
from .core import QuboInstance
from .errors import ConflictError, InstanceError, ParseError

# (variable, other variable or None for the constant 0, parity)
Constraint = tuple[int, "int | None", int]


class PartialAssignment:
    """Parity constraints over ``n`` binary variables. Immutable once built;
    use the module-level constructors or :meth:`constrain`."""

    def __init__(self, n: int, constraints: Iterable[Constraint] = ()):
        if n < 0:
            raise InstanceError("n must be non-negative")
        self._n = n
        self._parent = list(range(n + 1))
        self._parity = [0] * (n + 1)
        for i, j, par in constraints:
            self._union(i, j, par)
        self._freeze()

    # -- union-find ---------------------------------------------------------

    def _find(self, v: int) -> tuple[int, int]:
        path = []
        while self._parent[v] != v:
            path.append(v)
            v = self._parent[v]
        root = v
        # compress, accumulating parity from the top of the path down
        acc = 0
        for u in reversed(path):
            acc ^= self._parity[u]
            self._parity[u] = acc
            self._parent[u] = root
        return root, (self._parity[path[0]] if path else 0)

    def _union(self, a: int, b: int | None, parity: int, position: int | None = None) -> None:
        zero = self._n
        for v in (a, b):
            if v is not None and not 0 <= v < self._n:
                raise ParseError(f"variable x{v} out of range for n={self._n}", position)
        b = zero if b is None else b
        ra, pa = self._find(a)
        rb, pb = self._find(b)
        rel = pa ^ pb ^ (parity & 1)
        if ra == rb:
            if rel:
                if b == zero:
                    text = f"x{a} = {parity & 1}"
                else:
                    text = f"x{a} {'!=' if parity & 1 else '='} x{b}"
                raise ConflictError(
                    f"conflicting constraint {text}",
                    variables=[v for v in (a, b) if v != zero],
                    position=position,
                )
            return
        if ra == zero or (rb != zero and ra < rb):
            root, child = ra, rb
        else:
            root, child = rb, ra
        self._parent[child] = root
        self._parity[child] = rel

    def _freeze(self) -> None:
        n = self._n
        resolved = [self._find(i) for i in range(n)]
        self._root = np.array([r for r, _ in resolved], dtype=np.int64)
        self._par = np.array([p for _, p in resolved], dtype=np.int64)
        self._free = tuple(i for i in range(n) if self._root[i] == i)
        pos = {v: k for k, v in enumerate(self._free)}
        # x = offset + transform @ y
        self._offset = self._par.astype(np.float64)
        t = np.zeros((n, len(self._free)))
        for i in range(n):
            if self._root[i] != n:
                t[i, pos[int(self._root[i])]] = 1.0 - 2.0 * self._par[i]
        self._transform = t

    # -- construction -------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PartialAssignment:
        return cls(n)

    @classmethod
    def from_dict(cls, pairs: Mapping[int, int], n: int) -> PartialAssignment:
        return from_pairs(pairs, n)

    @classmethod
    def from_expression(cls, expr: str) -> PartialAssignment:
        return parse_bitvec_expr(expr)

    def constraints(self) -> list[Constraint]:
        """One constraint per non-representative variable; rebuilding from
        these gives an equivalent assignment."""
        out = []
        for i in range(self._n):
            r = int(self._root[i])
            if r == self._n:
                out.append((i, None, int(self._par[i])))
            elif r != i:
                out.append((i, r, int(self._par[i])))
        return out

    def constrain(self, constraints: Iterable[Constraint]) -> PartialAssignment:
        """New assignment with additional constraints."""
        return PartialAssignment(self._n, [*self.constraints(), *constraints])

    # -- queries ------------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def free(self) -> tuple[int, ...]:
        """Free representatives in ascending order; reduced variable k is
        ``free[k]``."""
        return self._free

    @property
    def num_free(self) -> int:
        return len(self._free)

    def is_identity(self) -> bool:
        return self.num_free == self._n

    def resolve(self, i: int) -> tuple[int | None, int]:
        """``(representative, parity)``; representative is None for constants."""
        r = int(self._root[i])
        return (None if r == self._n else r), int(self._par[i])

    def classes(self) -> frozenset:
        """Canonical description of the constraint classes, for comparison."""
        return frozenset((i, *self.resolve(i)) for i in range(self._n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialAssignment):
            return NotImplemented
        return self._n == other._n and self.classes() == other.classes()

    __hash__ = None

    def matches(self, x) -> bool:
        x = np.asarray(x)
        if x.shape != (self._n,):
            raise InstanceError(f"expected a vector of length {self._n}")
        return bool(np.array_equal(self.expand(self.restrict(x)), x))

    def restrict(self, x) -> np.ndarray:
        """Values of the free representatives in ``x``."""
        return np.asarray(x, dtype=np.float64)[list(self._free)]

    # -- operations ---------------------------------------------------------

    def apply(self, q: QuboInstance) -> tuple[QuboInstance, float]:
        """Substitute the constraints into ``q``.

        Returns the instance over the free variables and a constant with
        ``q(expand(y)) == reduced(y) + constant`` for every reduced ``y``.
        """
        if q.n != self._n:
            raise InstanceError(f"assignment has n={self._n} but instance has n={q.n}")
        m, a, t = q.m, self._offset, self._transform
        quad = t.T @ m @ t
        lin = t.T @ ((m + m.T) @ a)
        quad[np.diag_indices_from(quad)] += lin
        return QuboInstance(quad), float(a @ m @ a)

    def expand(self, x_reduced) -> np.ndarray:
        y = np.asarray(x_reduced, dtype=np.float64)
        if y.shape != (self.num_free,):
            raise InstanceError(f"expected a reduced vector of length {self.num_free}, got shape {y.shape}")
        return np.rint(self._offset + self._transform @ y)

    def enumerate_matches(self, cap: int | None = None) -> Iterator[np.ndarray]:
        """All full vectors consistent with the constraints, ordered by the
        index of their reduced vector."""
        k = self.num_free
        check_cap("enumerate_matches", k, caps.enumerate if cap is None else cap)
        for idx in range(1 << k):
            y = ((idx >> np.arange(k)) & 1).astype(np.float64)
            yield self.expand(y)

    # -- text output --------------------------------------------------------

    def to_canonical_string(self) -> str:
        """``'xa, xb = 0; xc = 1; xi = xj; xk != xl'`` with ties oriented from
        the larger to the smaller index."""
        zeros, ones, ties = [], [], []
        for i, j, par in self.constraints():
            if j is None:
                (ones if par else zeros).append(f"x{i}")
            else:
                ties.append(f"x{i} {'!=' if par else '='} x{j}")
        parts = []
        if zeros:
            parts.append(", ".join(zeros) + " = 0")
        if ones:
            parts.append(", ".join(ones) + " = 1")
        return "; ".join(parts + ties)

    def to_bitvec_expression(self) -> str:
        out = []
        for i in range(self._n):
            r, par = self.resolve(i)
            if r is None:
                out.append(str(par))
            elif r == i:
                out.append("*")
            else:
                out.append(f"[{'!' if par else ''}{r}]")
        return "".join(out)

    def __str__(self) -> str:
        return self.to_canonical_string()

    def __repr__(self) -> str:
        return f"PartialAssignment(n={self._n}, {self.to_canonical_string()!r})"


# ---------------------------------------------------------------------------
# parsers


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_end(self) -> bool:
        return self.peek() == ""

    def fail(self, expected: str):
        got = self.peek()
        found = repr(got) if got else "end of input"
        raise ParseError(f"expected {expected}, found {found}", self.pos)

    def accept(self, literal: str) -> bool:
        self.skip()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def digits(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected digits", self.pos)
        return int(self.text[start:self.pos])

    def var(self) -> tuple[int, int]:
        if self.peek() != "x":
            self.fail("variable 'x<index>'")
        start = self.pos
        self.pos += 1
        return self.digits(), start


def parse_assignment_expr(expr: str, n: int) -> PartialAssignment:
    """Parse e.g. ``'x0, x3 = 0; x7 = 1; x12 = x8; x13 != x9'``."""
    pa = PartialAssignment(n)
    rd = _Reader(expr)
    constraints: list[tuple[int, int | None, int, int]] = []

    def check(v: int, at: int) -> int:
        if v >= n:
            raise ParseError(f"variable x{v} out of range for n={n}", at)
        return v

    while not rd.at_end():
        lhs = [rd.var()]
        while rd.accept(","):
            lhs.append(rd.var())
        if rd.accept("!="):
            negate = 1
        elif rd.accept("="):
            negate = 0
        else:
            rd.fail("'=' or '!='")
        if rd.accept("!"):
            negate ^= 1
            rhs, rhs_at = rd.var()
            rhs = check(rhs, rhs_at)
        elif rd.peek() == "x":
            rhs, rhs_at = rd.var()
            rhs = check(rhs, rhs_at)
        elif rd.peek() in ("0", "1"):
            at = rd.pos
            value = rd.digits()
            if value not in (0, 1):
                raise ParseError("constant must be 0 or 1", at)
            rhs, negate = None, negate ^ value
        else:
            rd.fail("'0', '1' or a variable")
        for v, at in lhs:
            constraints.append((check(v, at), rhs, negate, at))
        if not rd.accept(";"):
            if not rd.at_end():
                rd.fail("';'")
    for v, rhs, par, at in constraints:
        pa._union(v, rhs, par, position=at)
    pa._freeze()
    return pa


def parse_bitvec_expr(expr: str) -> PartialAssignment:
    """Parse e.g. ``'**00**[1]*1[!4]1'``; the token count is ``n``."""
    tokens: list[tuple[int, int | None, int, int]] = []  # (var, ref, parity, pos)
    pos = 0
    while pos < len(expr):
        p = len(tokens)
        ch = expr[pos]
        if ch == "*":
            pos += 1
            tok = (p, p, 0, pos - 1)
        elif ch in "01":
            tok = (p, None, int(ch), pos)
            pos += 1
        elif ch == "[":
            start = pos
            pos += 1
            neg = 0
            if pos < len(expr) and expr[pos] == "!":
                neg = 1
                pos += 1
            d0 = pos
            while pos < len(expr) and expr[pos].isdigit():
                pos += 1
            if d0 == pos:
                raise ParseError("expected digits inside '[...]'", pos)
            ref = int(expr[d0:pos])
            if pos >= len(expr) or expr[pos] != "]":
                raise ParseError("expected ']'", pos)
            pos += 1
            tok = (p, ref, neg, start)
        else:
            raise ParseError(f"illegal character {ch!r} in bit vector expression", pos)
        tokens.append(tok)
    if not tokens:
        raise ParseError("empty bit vector expression", 0)
    n = len(tokens)
    pa = PartialAssignment(n)
    for var, ref, par, at in tokens:
        if ref is not None and ref >= n:
            raise ParseError(f"reference [{'!' if par else ''}{ref}] out of range for n={n}", at)
        pa._union(var, ref, par, position=at)
    pa._freeze()
    return pa


def from_pairs(pairs: Mapping[int, int], n: int) -> PartialAssignment:
    """Fix each listed variable to its value, e.g. ``{0: 1, 1: 1, 5: 0}``."""
    for i, v in pairs.items():
        if not 0 <= i < n:
            raise InstanceError(f"variable index {i} out of range for n={n}")
        if v not in (0, 1):
            raise InstanceError(f"value for x{i} must be 0 or 1, got {v!r}")
    return PartialAssignment(n, [(i, None, int(v)) for i, v in sorted(pairs.items())])


def partial_assignment(expr: str | None = None, n: int | None = None) -> PartialAssignment:
    """Build from an assignment expression (``n`` required) or, if ``n`` is
    omitted, from a bit vector expression."""
    if expr is None:
        if n is None:
            raise InstanceError("either expr or n is required")
        return PartialAssignment(n)
    if n is None:
        return parse_bitvec_expr(expr)
    return parse_assignment_expr(expr, n)
