from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from posetfix.errors import UsageError
from posetfix.spaces import (
    BoxSpace, CustomSpace, FiniteSpace, IntervalSpace, TupleSpace, audit_space,
    product_distance, tuple_leq,
)

REALS = IntervalSpace(float("-inf"), float("inf"), sample_lo=-1, sample_hi=1)
unit = st.floats(0, 1, allow_nan=False)


def quads(elem=unit):
    return st.tuples(elem, elem, elem, elem)


class TestProductDistance:
    def test_sum_of_absolute_differences(self):
        assert product_distance(TupleSpace(REALS, 4), (0, 0, 0, 0), (1, 2, 3, 4)) == 10

    def test_identical_tuples(self):
        ts = TupleSpace(IntervalSpace(0, 1), 3)
        assert product_distance(ts, (0.2, 0.4, 0.9), (0.2, 0.4, 0.9)) == 0

    def test_discrete_counts_differences(self):
        ts = TupleSpace(FiniteSpace.discrete_chain((0, 1)), 4)
        assert product_distance(ts, (0, 1, 0, 1), (1, 1, 0, 0)) == 2

    def test_arity_mismatch(self):
        with pytest.raises(UsageError):
            product_distance(TupleSpace(REALS, 4), (0, 0, 0), (0, 0, 0, 0))


class TestTupleLeq:
    def test_quartet_pattern(self):
        assert tuple_leq(TupleSpace(REALS, 4), (0, 1, 0, 1), (1, 0, 1, 0))

    def test_reflexive(self):
        ts = TupleSpace(REALS, 3)
        assert tuple_leq(ts, (0.3, -2, 5), (0.3, -2, 5))

    def test_coupled_second_coordinate_reverses(self):
        assert not tuple_leq(TupleSpace(REALS, 2), (0, 0), (1, 1))

    def test_patterns(self):
        assert [TupleSpace(REALS, n).pattern for n in (2, 3, 4)] == [
            (1, -1), (1, -1, 1), (1, -1, 1, -1),
        ]

    def test_arity_mismatch(self):
        with pytest.raises(UsageError):
            tuple_leq(TupleSpace(REALS, 2), (0, 0, 0), (0, 0))


class TestAudit:
    def test_reals_pass(self):
        assert audit_space(REALS, [0, 0.5, 1]).passed

    def test_signed_distance_breaks_symmetry(self):
        s = CustomSpace(lambda a, b: a - b, lambda a, b: a <= b, (0, 1))
        assert "symmetry" in audit_space(s, [0, 1]).axioms_violated()

    def test_strict_order_breaks_reflexivity(self):
        s = CustomSpace(lambda a, b: abs(a - b), lambda a, b: a < b, (0, 1))
        assert "reflexivity" in audit_space(s, [0, 1]).axioms_violated()

    def test_finite_tables_exact(self):
        s = FiniteSpace.discrete_chain(("a", "b", "c"))
        r = audit_space(s, s.sample())
        assert r.passed and r.eps_metric == 0

    def test_bad_triangle(self):
        d = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
        s = FiniteSpace((0, 1, 2), d, [[i == j for j in range(3)] for i in range(3)])
        assert "triangle" in audit_space(s, s.sample()).axioms_violated()

    def test_failing_callable_is_data(self):
        s = CustomSpace(lambda a, b: 1 / (a - b), lambda a, b: a <= b, (0, 1))
        assert "evaluation" in audit_space(s, [0, 1]).axioms_violated()

    def test_empty_sample(self):
        with pytest.raises(UsageError):
            audit_space(REALS, [])


class TestCarriers:
    def test_interval_grid_descriptor(self):
        s = IntervalSpace(0, 1, resolution=5)
        assert s.sample() == [0, 0.25, 0.5, 0.75, 1]
        assert s.grid_descriptor()["points"] == 5

    def test_unbounded_interval_needs_window(self):
        with pytest.raises(UsageError):
            IntervalSpace(0, float("inf"))

    def test_box_componentwise(self):
        b = BoxSpace((0, 0), (1, 1), resolution=3)
        assert b.leq((0, 0.5), (1, 0.5)) and not b.leq((0, 1), (1, 0))
        assert b.distance((0, 0), (1, 0.5)) == 1
        assert audit_space(b, b.sample()).passed

    def test_finite_rational_tables(self):
        s = FiniteSpace((0, 1), [[0, "1/3"], [Fraction(1, 3), 0]], [[1, 1], [0, 1]])
        assert s.distance(0, 1) == Fraction(1, 3)


@given(quads(), quads())
def test_product_distance_symmetric(a, b):
    ts = TupleSpace(IntervalSpace(0, 1), 4)
    assert product_distance(ts, a, b) == product_distance(ts, b, a)


@given(quads(), quads())
def test_product_distance_zero_iff_equal(a, b):
    ts = TupleSpace(IntervalSpace(0, 1), 4)
    assert (product_distance(ts, a, b) == 0) == (a == b)
    assert product_distance(ts, a, a) == 0


@given(quads(), quads(), quads())
def test_product_triangle(a, b, c):
    ts = TupleSpace(IntervalSpace(0, 1), 4)
    lhs = product_distance(ts, a, c)
    assert lhs <= product_distance(ts, a, b) + product_distance(ts, b, c) + 1e-12


small = st.sampled_from([0, 0.5, 1])


@given(quads(small), quads(small), quads(small))
def test_tuple_leq_partial_order(a, b, c):
    ts = TupleSpace(IntervalSpace(0, 1), 4)
    assert tuple_leq(ts, a, a)
    if tuple_leq(ts, a, b) and tuple_leq(ts, b, a):
        assert a == b
    if tuple_leq(ts, a, b) and tuple_leq(ts, b, c):
        assert tuple_leq(ts, a, c)


@given(st.sampled_from([2, 3, 4]), st.data())
def test_all_plus_pattern_is_componentwise(n, data):
    s = IntervalSpace(0, 1)
    a = data.draw(st.tuples(*[small] * n))
    b = data.draw(st.tuples(*[small] * n))
    ts = TupleSpace(s, n, pattern=(1,) * n)
    assert tuple_leq(ts, a, b) == all(s.leq(p, q) for p, q in zip(a, b))
