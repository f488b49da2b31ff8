"""Brute-force ground truth on finite carriers."""

from __future__ import annotations

import itertools

from posetfix import hypotheses
from posetfix.errors import EvaluationError, UsageError
from posetfix.hypotheses import ENUMERATION_GUARD, HypothesisReport, Sampling
from posetfix.problem import Problem


def _require_finite(p: Problem):
    if not p.space.finite:
        raise UsageError(f"the oracle needs a finite carrier, got {p.space.flavor!r}")


def enumerate_fixed_points(p: Problem) -> list[tuple]:
    """All tuples with zero residual under the problem's scheme.

    With a non-identity g these are coincidence points. Output is in
    lexicographic order of carrier indices.
    """
    _require_finite(p)
    elements = p.space.elements
    m = len(elements)
    if m**p.arity > ENUMERATION_GUARD:
        raise UsageError(
            f"{m}^{p.arity} tuples exceed the enumeration guard {ENUMERATION_GUARD}; use a smaller carrier"
        )
    g_img = [p.apply_g(e) for e in elements]
    found = []
    for idx in itertools.product(range(m), repeat=p.arity):
        t = tuple(elements[i] for i in idx)
        try:
            ok = all(
                p.apply_F(p.scheme.arguments(t, i)) == g_img[idx[i]] for i in range(p.arity)
            )
        except EvaluationError:
            ok = False
        if ok:
            found.append(t)
    return found


def verify_hypotheses_exhaustive(p: Problem, seed=None) -> HypothesisReport:
    """Run every hypothesis check over the entire finite carrier."""
    _require_finite(p)
    m = len(p.space.elements)
    if m ** (2 * p.arity) > ENUMERATION_GUARD:
        raise UsageError(
            f"exhaustive pair checks over {m}^{2 * p.arity} cases exceed {ENUMERATION_GUARD}; use a smaller carrier"
        )
    total = m**p.arity
    samples = Sampling(max_tuples=total, max_bases=total, max_pairs=total * total, exhaustive=True)
    return hypotheses.check_all(p, samples, seed)
