import numpy as np
import pytest

from conftest import all_vectors, random_assignment_constraints
from qubokit.assignment import (
    PartialAssignment,
    from_pairs,
    parse_assignment_expr,
    parse_bitvec_expr,
    partial_assignment,
)
from qubokit.bitvec import to_string
from qubokit.core import QuboInstance
from qubokit.errors import ConflictError, InstanceError, ParseError, ResourceCapError


def satisfying(n, constraints):
    """Brute-force filter: all vectors meeting every constraint, as strings."""
    out = set()
    for x in all_vectors(n):
        if all((x[i] ^ (0 if j is None else x[j])) == p for i, j, p in constraints):
            out.add("".join(map(str, x)))
    return out


def matches(pa):
    return {to_string(x) for x in pa.enumerate_matches()}


class TestAssignmentExpr:
    def test_intro_example(self):
        pa = partial_assignment("x1=0; x5=!x4", n=16)
        assert pa.num_free == 14
        assert pa.resolve(1) == (None, 0)
        assert pa.resolve(5) == (4, 1)

    def test_section_example(self):
        pa = parse_assignment_expr("x0, x3 = 0; x7 = 1; x12 = x8; x13 != x9", 16)
        assert pa.num_free == 11
        cons = [(0, None, 0), (3, None, 0), (7, None, 1), (12, 8, 0), (13, 9, 1)]
        assert len(satisfying(16, cons)) == 2**11
        assert matches(pa) == satisfying(16, cons)

    def test_whitespace_and_trailing(self):
        a = parse_assignment_expr("  x0 ,x3=0 ;x7= 1;", 8)
        b = parse_assignment_expr("x0, x3 = 0; x7 = 1", 8)
        assert a == b

    def test_neq_constant(self):
        assert parse_assignment_expr("x0 != 0", 2).resolve(0) == (None, 1)
        assert parse_assignment_expr("x0 != 1", 2).resolve(0) == (None, 0)

    def test_double_negation(self):
        assert parse_assignment_expr("x1 != !x0", 2).resolve(1) == (0, 0)

    def test_empty_is_identity(self):
        assert parse_assignment_expr("", 3).is_identity()

    @pytest.mark.parametrize(
        "expr, pos",
        [
            ("x1=0; x1=1", 6),
            ("x2 != x2", 0),
            ("x0 = x1; x1 = x2; x2 != x0", 18),
            ("x0 = 1; x1 = x0; x1 = 0", 17),
        ],
    )
    def test_conflicts(self, expr, pos):
        with pytest.raises(ConflictError) as info:
            parse_assignment_expr(expr, 4)
        assert info.value.position == pos
        assert info.value.variables

    @pytest.mark.parametrize(
        "expr, pos",
        [
            ("x9 = 0", 0),
            ("x0 = x4", 5),
            ("x0 = 2", 5),
            ("x0 x1 = 0", 3),
            ("y0 = 1", 0),
            ("x = 1", 1),
            ("x0 =", 4),
            ("x0 = 1 x1 = 0", 7),
            ("x0 = !1", 6),
            ("x0, = 1", 4),
        ],
    )
    def test_syntax_and_range_errors(self, expr, pos):
        with pytest.raises(ParseError) as info:
            parse_assignment_expr(expr, 4)
        assert info.value.position == pos


class TestBitvecExpr:
    def test_example(self):
        pa = parse_bitvec_expr("**00**[1]*1[!4]1")
        assert pa.n == 11
        assert pa.free == (0, 1, 4, 5, 7)
        assert pa.resolve(6) == (1, 0)
        assert pa.resolve(9) == (4, 1)
        assert [pa.resolve(i) for i in (2, 3, 8, 10)] == [(None, 0), (None, 0), (None, 1), (None, 1)]
        assert len(list(pa.enumerate_matches())) == 32

    def test_single_free(self):
        pa = parse_bitvec_expr("*")
        assert pa.n == 1 and pa.is_identity()

    def test_self_negation(self):
        with pytest.raises(ConflictError):
            parse_bitvec_expr("[!0]")

    def test_chain_conflict(self):
        # x1 = x0, x2 = !x1, x0 = x2  ->  x0 = !x0
        with pytest.raises(ConflictError) as info:
            parse_bitvec_expr("[2][0][!1]")
        assert info.value.position == 6

    @pytest.mark.parametrize("expr, pos", [("*[3]", 1), ("*[", 2), ("*[!]", 3), ("[1", 2), ("*a", 1), ("", 0)])
    def test_errors(self, expr, pos):
        with pytest.raises(ParseError) as info:
            parse_bitvec_expr(expr)
        assert info.value.position == pos

    def test_round_trip(self):
        pa = parse_bitvec_expr("**00**[1]*1[!4]1")
        assert pa.to_bitvec_expression() == "**00**[1]*1[!4]1"


class TestFromPairs:
    def test_example(self):
        pa = from_pairs({0: 1, 1: 1, 5: 0}, n=10)
        assert pa.num_free == 7
        assert PartialAssignment.from_dict({0: 1, 1: 1, 5: 0}, n=10) == pa

    def test_empty(self):
        assert from_pairs({}, 5).is_identity()

    def test_out_of_range(self):
        with pytest.raises(InstanceError):
            from_pairs({7: 1}, 4)


class TestApply:
    def test_fix_one(self):
        q = QuboInstance([[1, 2, -1], [0, 1, 3], [0, 0, -2]])
        reduced, const = parse_assignment_expr("x1=1", 3).apply(q)
        assert reduced.m.tolist() == [[3, -1], [0, 1]]
        assert const == 1
        for y in all_vectors(2):
            x = [y[0], 1, y[1]]
            assert q(x) == reduced(y) + const

    def test_negated_tie(self):
        q = QuboInstance([[1, 5], [0, 2]])
        reduced, const = parse_assignment_expr("x1=!x0", 2).apply(q)
        assert reduced.m.tolist() == [[-1]] and const == 2
        assert q([1, 0]) == reduced([1]) + const
        assert q([0, 1]) == reduced([0]) + const

    def test_identity(self):
        q = QuboInstance.random(5, seed=1)
        reduced, const = PartialAssignment(5).apply(q)
        assert reduced == q and const == 0

    def test_all_fixed(self):
        q = QuboInstance([[1, 2], [0, 3]])
        reduced, const = from_pairs({0: 1, 1: 1}, 2).apply(q)
        assert reduced.n == 0 and const == 6
        assert q(from_pairs({0: 1, 1: 1}, 2).expand([])) == 6

    def test_size_mismatch(self):
        with pytest.raises(InstanceError):
            PartialAssignment(3).apply(QuboInstance.zeros(4))

    def test_energy_identity_random(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 9))
            pa = PartialAssignment(n, random_assignment_constraints(n, rng))
            q = QuboInstance.random(n, density=0.6, seed=int(rng.integers(1000)))
            reduced, const = pa.apply(q)
            for y in all_vectors(pa.num_free):
                assert q(pa.expand(y)) == pytest.approx(reduced(y) + const, abs=1e-9)


class TestExpand:
    def test_example(self):
        pa = parse_bitvec_expr("**00**[1]*1[!4]1")
        assert to_string(pa.expand([0, 1, 0, 1, 1])) == "01000111111"

    def test_identity(self):
        x = np.array([1.0, 0, 1, 1])
        assert np.array_equal(PartialAssignment(4).expand(x), x)

    def test_length_mismatch(self):
        with pytest.raises(InstanceError):
            parse_bitvec_expr("*0*").expand([1])

    def test_restrict_inverse(self, rng):
        pa = parse_bitvec_expr("**00**[1]*1[!4]1")
        for x in pa.enumerate_matches():
            assert np.array_equal(pa.expand(pa.restrict(x)), x)
            assert pa.matches(x)


class TestEnumerate:
    def test_identity(self):
        assert len(list(PartialAssignment(2).enumerate_matches())) == 4

    def test_constant(self):
        assert matches(parse_assignment_expr("x0=1", 2)) == {"10", "11"}

    def test_negation(self):
        assert matches(parse_assignment_expr("x1=!x0", 2)) == {"10", "01"}

    def test_cap(self):
        with pytest.raises(ResourceCapError):
            list(PartialAssignment(5).enumerate_matches(cap=4))

    def test_against_filter(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 9))
            cons = random_assignment_constraints(n, rng)
            pa = PartialAssignment(n, cons)
            found = list(pa.enumerate_matches())
            assert len(found) == 2**pa.num_free
            assert {to_string(x) for x in found} == satisfying(n, cons)
            expanded = {to_string(x) for x in found}
            for s in satisfying(n, []):
                x = np.array([int(c) for c in s])
                assert (s in expanded) == pa.matches(x)


class TestCanonical:
    def test_identity_empty(self):
        assert PartialAssignment(4).to_canonical_string() == ""

    def test_shape(self):
        expr = "x5, x8, x11, x13 = 0; x0, x3, x6, x9, x15, x16 = 1; x17 != x1"
        pa = parse_assignment_expr(expr, 20)
        assert str(pa) == expr

    def test_orientation(self):
        assert str(parse_assignment_expr("x1 = x4; x2 != x0", 5)) == "x2 != x0; x4 = x1"

    def test_indirect_chain(self):
        pa = parse_assignment_expr("x3 = x2; x2 != x1; x1 = 1", 4)
        assert str(pa) == "x2, x3 = 0; x1 = 1"

    def test_round_trip(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            pa = PartialAssignment(n, random_assignment_constraints(n, rng))
            again = parse_assignment_expr(pa.to_canonical_string(), n)
            assert again == pa
            assert matches(again) == matches(pa)
            assert parse_bitvec_expr(pa.to_bitvec_expression()) == pa


def test_conflict_detection_complete(rng):
    """Rejected iff no vector satisfies the constraints."""
    seen = {True: 0, False: 0}
    for _ in range(300):
        n = int(rng.integers(1, 7))
        cons = []
        for _ in range(int(rng.integers(1, 2 * n + 2))):
            i = int(rng.integers(n))
            j = None if rng.random() < 0.3 else int(rng.integers(n))
            cons.append((i, j, int(rng.integers(2))))
        feasible = bool(satisfying(n, cons))
        try:
            PartialAssignment(n, cons)
            accepted = True
        except ConflictError:
            accepted = False
        assert accepted == feasible
        seen[feasible] += 1
    assert seen[True] > 10 and seen[False] > 10
