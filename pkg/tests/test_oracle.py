import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import HAND_SCHEMES, expr, two_point
from posetfix import comparators as C
from posetfix import engine as E
from posetfix import oracle as O
from posetfix.errors import UsageError
from posetfix.problem import Problem, Table
from posetfix.spaces import FiniteSpace, IntervalSpace


def hand_enumeration(F, elements, scheme):
    rows = HAND_SCHEMES[scheme]
    return [
        t for t in itertools.product(elements, repeat=len(rows))
        if all(F(*(t[j] for j in perm)) == t[i] for i, perm in enumerate(rows))
    ]


def test_projection_four_tuples():
    p = Problem(two_point(), 4, expr("x", exact=True), C.half())
    assert O.enumerate_fixed_points(p) == [(0, 0, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 1)]


def test_constant_zero():
    p = Problem(two_point(), 4, expr("0", exact=True), C.half())
    assert O.enumerate_fixed_points(p) == [(0, 0, 0, 0)]


def test_no_solution_is_empty():
    p = Problem(two_point(), 4, expr("1 - x", exact=True), C.half())
    assert O.enumerate_fixed_points(p) == []


def test_cyclic_projection():
    p = Problem(two_point(), 4, expr("x", exact=True), C.half(), scheme="cyclic")
    assert O.enumerate_fixed_points(p) == hand_enumeration(lambda *a: a[0], (0, 1), "cyclic")


def test_coincidence_points_use_g():
    g = Table({(0,): 1, (1,): 0})
    p = Problem(two_point(), 2, expr("x", 2, exact=True), C.linear(0.5), g=g)
    # F(x,y) = g(x) = 1 - x has no solution; F(y,x) = y = g(y) likewise
    assert O.enumerate_fixed_points(p) == []


def test_requires_finite():
    p = Problem(IntervalSpace(0, 1), 4, expr("x"), C.half())
    with pytest.raises(UsageError):
        O.enumerate_fixed_points(p)


def test_guard():
    big = FiniteSpace.discrete_chain(tuple(range(60)))
    p = Problem(big, 4, lambda *a: a[0], C.half())
    with pytest.raises(UsageError, match="smaller carrier"):
        O.enumerate_fixed_points(p)
    with pytest.raises(UsageError):
        O.verify_hypotheses_exhaustive(p)


def test_exhaustive_constant_passes():
    p = Problem(two_point(), 4, expr("0", exact=True), C.half())
    rep = O.verify_hypotheses_exhaustive(p, (0, 0, 0, 0))
    assert rep.passed and rep.exhaustive
    # comparable ordered pairs on a 2-chain: 3 per coordinate, so 3^4 = 81;
    # minus the 16 diagonal pairs leaves 65 distinct unordered pairs
    assert rep["contraction"].coverage == 65


def test_exhaustive_projection_contraction_fails():
    p = Problem(two_point(), 4, expr("x", exact=True), C.half())
    rec = O.verify_hypotheses_exhaustive(p)["contraction"]
    assert rec.verdict == "fail"
    # the pair at full distance sum 4: lhs 1 > phi(1) = 1/2
    assert rec.witness["lhs"] == 1 and rec.witness["lhs"] > rec.witness["rhs"]


def test_exhaustive_full_distance_pair():
    from posetfix.hypotheses import _contraction_case
    p = Problem(two_point(), 4, expr("x", exact=True), C.half())
    comparable, lhs, rhs, _ = _contraction_case(p, (0, 1, 0, 1), (1, 0, 1, 0))
    assert comparable and lhs == 1 and rhs == C.evaluate(C.half(), 1)


def test_empty_order_vacuous():
    s = FiniteSpace((0, 1), [[0, 1], [1, 0]], [[1, 0], [0, 1]])
    p = Problem(s, 4, expr("x", exact=True), C.half())
    assert O.verify_hypotheses_exhaustive(p).verdict("contraction") == "vacuous"


elements3 = ("a", "b", "c")


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(3)), st.lists(st.sampled_from(elements3), min_size=81, max_size=81),
       st.sampled_from(["alternating", "cyclic"]))
def test_relabeling_invariance(perm, values, scheme):
    base = FiniteSpace.discrete_chain(elements3)
    keys = list(itertools.product(elements3, repeat=4))
    F = Table(dict(zip(keys, values)))
    relabel = {e: elements3[perm[i]] for i, e in enumerate(elements3)}
    # relabelled carrier: element relabel[e_i] keeps e_i's rows
    new_elems = tuple(relabel[e] for e in elements3)
    moved = FiniteSpace(new_elems, base.distance_table, base.order_table)
    G = Table({tuple(relabel[a] for a in k): relabel[v] for k, v in zip(keys, values)})
    before = O.enumerate_fixed_points(Problem(base, 4, F, C.half(), scheme=scheme))
    after = O.enumerate_fixed_points(Problem(moved, 4, G, C.half(), scheme=scheme))
    assert sorted(after) == sorted(tuple(relabel[a] for a in t) for t in before)
    assert sorted(before) == sorted(hand_enumeration(F, elements3, scheme))


def monotone_tables():
    """Finite mappings x-weighted enough to converge on a 3-chain."""
    return st.sampled_from([
        lambda x, y, z, w: 1,
        lambda x, y, z, w: 0,
        lambda x, y, z, w: 2,
        lambda x, y, z, w: min(x, 1),
    ])


@settings(max_examples=12, deadline=None)
@given(monotone_tables(), st.tuples(*[st.sampled_from([0, 1, 2])] * 4))
def test_engine_results_are_oracle_members(F, seed):
    s = FiniteSpace.discrete_chain((0, 1, 2))
    p = Problem(s, 4, F, C.half())
    r = E.solve(p, seed, force=True, max_iter=60)
    if r.status == E.CONVERGED:
        assert r.final in O.enumerate_fixed_points(p)


def test_projection_engine_run_is_member():
    p = Problem(two_point(), 4, expr("x", exact=True), C.half())
    allowed = O.enumerate_fixed_points(p)
    for seed in itertools.product((0, 1), repeat=4):
        r = E.solve(p, seed, force=True, max_iter=20)
        if r.status == E.CONVERGED:
            assert r.final in allowed
