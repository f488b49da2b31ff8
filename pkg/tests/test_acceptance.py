"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line and the lines are repeated
in the terminal summary. Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import io
import itertools
import time
from fractions import Fraction

import pytest

from conftest import (
    ACCEPTANCE_LINES, DATA, HAND_SCHEMES, QUARTET_F, QUARTET_SEED, expr, grid_residual_argmin,
    quartet_problem, solve_affine, two_point,
)
from posetfix import cli, comparators as C, engine as E, hypotheses as H, oracle as O, problem_file
from posetfix.problem import Problem
from posetfix.spaces import IntervalSpace


def report(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


@pytest.fixture(scope="module")
def quartet_run():
    p = quartet_problem("alternating", grid=21)
    t0 = time.perf_counter()
    # timed end to end, including the gating hypothesis checks
    res = E.solve(p, QUARTET_SEED, samples=H.Sampling(resolution=21))
    return p, res.report, res, time.perf_counter() - t0


def test_quartet_convergence(quartet_run):
    p, rep, res, elapsed = quartet_run
    coeffs = [Fraction(1, 8), Fraction(-1, 8), Fraction(1, 8), Fraction(-1, 8)]
    exact = solve_affine(coeffs, Fraction(1, 2), HAND_SCHEMES["alternating"])
    grid = [i / 20 for i in range(21)]
    F = lambda x, y, z, w: (x - y + z - w) / 8 + 0.5  # noqa: E731
    _, best = grid_residual_argmin(F, HAND_SCHEMES["alternating"], grid)
    oracle_ok = exact == (Fraction(1, 2),) * 4 and best == (0.5,) * 4
    ok = (
        oracle_ok
        and rep.passed
        and res.status == E.CONVERGED
        and all(abs(v - float(e)) <= 1e-8 for v, e in zip(res.final, exact))
        and res.iterations <= 64
        and elapsed < 1.0
    )
    report("quartet convergence", ok,
           f"checks {'pass' if rep.passed else 'fail'}, {res.iterations} iterations, {elapsed:.3f}s")


def test_delta_decay_certificate(quartet_run):
    p, _, res, _ = quartet_run
    d = res.trace.deltas
    phi = lambda t: C.evaluate(p.comparator, t)  # noqa: E731
    decay = all(b <= 4 * phi(a / 4) + 1e-9 for a, b in zip(d, d[1:]))
    nonincreasing = all(b <= a for a, b in zip(d, d[1:]))
    report("delta-decay certificate", decay and nonincreasing and res.certificates["delta_decay_held"],
           f"deltas {d}")


def test_chain_monotonicity(quartet_run):
    p, _, res, _ = quartet_run
    flags, _ = E.chain_flags(res.trace, p.tuple_space)
    report("chain monotonicity", all(flags) and len(flags) == 4,
           f"flags {flags}, y-chain {[t[1] for t in res.trace.g_images]}")


def test_g_coincidence():
    pf = problem_file.load(DATA / "g_coincidence.json")
    p = pf.problem
    assert p.has_g and p.space.lo == float("-inf") and p.space.window == (-1, 1)
    # hand: g(F(t)) = (x - y + z - w)/4 = F(3x, 3y, 3z, 3w)
    t = (0.5, -0.25, 1.0, 0.75)
    hand = (t[0] - t[1] + t[2] - t[3]) / 4
    rep = H.check_all(p, pf.sampling, p.seed)
    res = E.solve(p, p.seed, report=rep)
    ok = (
        abs(p.apply_g(p.apply_F(t)) - hand) <= 1e-12
        and abs(p.apply_F(p.g_images(t)) - hand) <= 1e-12
        and rep.verdict("commutativity") == H.PASS
        and rep.verdict("contraction") == H.PASS
        and res.status == E.CONVERGED
        and res.residual <= 1e-8
        and all(abs(v) <= 1e-8 for v in res.final)
    )
    report("g-coincidence", ok, f"status {res.status}, residual {res.residual}")


def test_coupled_instance():
    p = Problem(IntervalSpace(0, 1, resolution=21), 2, expr("(x - y)/4 + 1/4", 2), C.linear(0.5))
    exact = solve_affine([Fraction(1, 4), Fraction(-1, 4)], Fraction(1, 4), HAND_SCHEMES["coupled"])
    res = E.solve(p, (0, 1))
    ok = (
        exact == (Fraction(1, 4),) * 2
        and res.status == E.CONVERGED
        and res.iterations <= 40
        and all(abs(v - 0.25) <= 1e-8 for v in res.final)
    )
    report("coupled theorem instance", ok, f"{res.iterations} iterations, final {res.final}")


def test_tripled_instance():
    w = C.linear_weights(1 / 16, 1 / 8, 1 / 16)
    p = Problem(IntervalSpace(0, 1, resolution=21), 3, expr("(x - 2*y + z)/16 + 0.3", 3), w)
    coeffs = [Fraction(1, 16), Fraction(-2, 16), Fraction(1, 16)]
    exact = solve_affine(coeffs, Fraction(3, 10), HAND_SCHEMES["tripled"])
    res = E.solve(p, (0, 1, 0))
    ok = (
        exact == (Fraction(3, 10),) * 3
        and res.status == E.CONVERGED
        and all(abs(v - 0.3) <= 1e-8 for v in res.final)
    )
    report("tripled theorem instance", ok, f"{res.iterations} iterations, final {res.final}")


def test_oracle_equivalence():
    p = Problem(two_point(), 4, expr("x", exact=True), C.half())
    rows = HAND_SCHEMES["alternating"]
    hand = {
        t for t in itertools.product((0, 1), repeat=4)
        if all(t[perm[0]] == t[i] for i, perm in enumerate(rows))
    }
    found = O.enumerate_fixed_points(p)
    expected = {(0, 0, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 1)}
    members = True
    converged = 0
    for seed in itertools.product((0, 1), repeat=4):
        res = E.solve(p, seed, force=True, max_iter=50)
        if res.status == E.CONVERGED:
            converged += 1
            members &= res.final in expected
    ok = set(found) == expected == hand and len(found) == 4 and members and converged > 0
    report("oracle equivalence", ok, f"{len(found)} tuples, {converged} converged runs")


def test_negative_gate():
    p = Problem(IntervalSpace(0, 1, resolution=21), 4, expr("x"), C.half())
    rec = H.check_contraction(p)["contraction"]
    _, lhs, rhs, _ = H._contraction_case(p, (0, 0, 0, 0), (1, 0, 0, 0))
    code = cli.main(["solve", str(DATA / "projection_interval.json")], io.StringIO(), io.StringIO())
    ok = (
        rec.verdict == H.FAIL
        and rec.witness is not None
        and rec.witness["lhs"] > rec.witness["rhs"]
        and H.replay_witness(p, rec)
        and lhs == 1 and rhs == 0.125
        and code == 2
    )
    report("negative gate", ok, f"witness {rec.witness}, exit {code}")


def test_scheme_sensitivity():
    results = {s: E.solve(quartet_problem(s), QUARTET_SEED) for s in ("alternating", "cyclic")}
    finals = [r.final for r in results.values()]
    ok = (
        all(r.status == E.CONVERGED for r in results.values())
        and all(r.scheme == s and r.summary()["scheme"] == s for s, r in results.items())
        and all(abs(a - b) <= 1e-8 for a, b in zip(*finals))
        and all(max(f) - min(f) <= 1e-8 for f in finals)
    )
    report("scheme sensitivity", ok, ", ".join(f"{s}: {r.iterations} it" for s, r in results.items()))
