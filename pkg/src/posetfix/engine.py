"""The constructive iteration and its convergence certificates.

Starting from a seed ``t_0``, each step solves ``g(t_{n+1}[i]) = F(perm_i(t_n))``
for every output coordinate ``i``, using a section inverse of ``g``.
Along the way the solver records

* ``delta_n``: the sum-metric distance between consecutive g-image tuples,
* whether ``delta_{n+1}`` respects the bound implied by the contraction
  inequality (``4*phi(delta_n/4)`` in the quartet case), and
* whether each coordinate's g-image chain moves in its pattern direction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from posetfix import hypotheses
from posetfix.errors import EvaluationError, RangeInclusionError, UsageError
from posetfix.hypotheses import HypothesisReport, Sampling
from posetfix.problem import Problem
from posetfix.spaces import TupleSpace, product_distance

CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
STALLED = "stalled"
HYPOTHESES_UNMET = "hypotheses_unmet"

STALL_WINDOW = 50
STALL_FACTOR = 1 - 1e-12


@dataclass
class IterationTrace:
    tuples: list = field(default_factory=list)
    g_images: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    delta_bounds: list = field(default_factory=list)
    step_flags: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.tuples) - 1

    def record(self, n: int) -> dict:
        """The trace line for step ``n`` (``n = 0`` is the seed)."""
        out = {"step": n, "tuple": list(self.tuples[n]), "g_images": list(self.g_images[n])}
        if n > 0:
            out["delta"] = self.deltas[n - 1]
            out["flags"] = list(self.step_flags[n - 1])
            out["wall_time"] = self.wall_times[n - 1]
        return out


@dataclass
class SolveResult:
    status: str
    final: tuple | None
    residual: float | None
    iterations: int
    trace: IterationTrace
    certificates: dict
    scheme: str
    hypotheses_overridden: bool = False
    report: HypothesisReport | None = None

    def summary(self) -> dict:
        return {
            "status": self.status,
            "scheme": self.scheme,
            "final": list(self.final) if self.final is not None else None,
            "residual": self.residual,
            "iterations": self.iterations,
            "hypotheses_overridden": self.hypotheses_overridden,
            "certificates": self.certificates,
        }


def _preimage(p: Problem, i: int, v):
    if not p.has_g:
        return v
    space = p.space
    if p.g_inverse is not None:
        try:
            u = space.canonical(p.g_inverse(v))
        except Exception as exc:
            raise RangeInclusionError(i + 1, v, f"section inverse failed: {exc}") from None
        back = p.apply_g(u)
        if space.distance(back, v) > p.eps_check:
            raise RangeInclusionError(i + 1, v, f"g(inverse) = {back!r}")
        return u
    if space.finite:
        for u in space.elements:
            if p.apply_g(u) == v:
                return u
        raise RangeInclusionError(i + 1, v, "no preimage in the carrier")
    raise UsageError("g needs a section inverse on an infinite carrier")


def step(p: Problem, current: Sequence) -> tuple:
    """One iteration: the next tuple whose g-images are the permuted F-values."""
    current = tuple(current)
    if len(current) != p.arity:
        raise UsageError(f"tuple has length {len(current)}, arity is {p.arity}")
    nxt = []
    for i in range(p.arity):
        args = p.scheme.arguments(current, i)
        try:
            v = p.apply_F(args)
        except EvaluationError as exc:
            # a value outside the carrier is outside g's image too
            if exc.__cause__ is None:
                raise RangeInclusionError(i + 1, p.F(*args), str(exc)) from None
            raise
        nxt.append(_preimage(p, i, v))
    return tuple(nxt)


def delta(ts: TupleSpace, prev_g_images: Sequence, next_g_images: Sequence):
    """Sum-metric distance between consecutive g-image tuples."""
    return product_distance(ts, prev_g_images, next_g_images)


def residual(p: Problem, candidate: Sequence):
    """Sum over coordinates of ``d(F(perm_i(candidate)), g(candidate[i]))``."""
    candidate = tuple(candidate)
    if len(candidate) != p.arity:
        raise UsageError(f"tuple has length {len(candidate)}, arity is {p.arity}")
    d = p.space.distance
    return sum(
        d(p.apply_F(p.scheme.arguments(candidate, i)), p.apply_g(candidate[i]))
        for i in range(p.arity)
    )


def _moves_ok(p: Problem, sign: int, a, b) -> bool:
    space, eps = p.space, p.eps_check
    lo, hi = (a, b) if sign > 0 else (b, a)
    if space.leq(lo, hi):
        return True
    return eps > 0 and space.distance(lo, hi) <= eps


def chain_flags(trace: IterationTrace, ts: TupleSpace, eps: float = 0) -> tuple[list, list]:
    """Per coordinate: did every consecutive g-image pair move in the pattern direction?

    Returns ``(flags, incomparable_counts)``. Differences within ``eps`` are
    treated as no movement.
    """
    imgs = trace.g_images
    if len(imgs) < 2:
        raise UsageError("chain flags need a trace with at least two tuples")
    space = ts.base
    flags, incomparable = [], []
    for i, sign in enumerate(ts.pattern):
        ok, inc = True, 0
        for a, b in zip(imgs, imgs[1:]):
            lo, hi = (a[i], b[i]) if sign > 0 else (b[i], a[i])
            if space.leq(lo, hi) or (eps > 0 and space.distance(lo, hi) <= eps):
                continue
            ok = False
            if not space.leq(hi, lo):
                inc += 1
        flags.append(ok)
        incomparable.append(inc)
    return flags, incomparable


def delta_bound(p: Problem, prev: Sequence, cur: Sequence):
    """Upper bound on the next delta implied by the contraction inequality.

    Each output coordinate ``i`` is bounded by the contraction right-hand side
    at the permuted coordinate distances; for the quartet form this sums to
    ``4*phi(delta/4)``.
    """
    dv = p.contraction_distance_vector(prev, cur)
    return sum(p.rhs(tuple(dv[j] for j in perm)) for perm in p.scheme.perms)


def solve(
    p: Problem,
    seed: Sequence | None = None,
    residual_tol: float = 1e-8,
    delta_tol: float = 1e-10,
    max_iter: int = 1000,
    force: bool = False,
    samples: Sampling = Sampling(),
    allow_inconclusive: bool = False,
    report: HypothesisReport | None = None,
    on_step: Callable[[dict], None] | None = None,
) -> SolveResult:
    """Run the iteration from ``seed`` until delta and residual are both small.

    The hypothesis checks (or a precomputed ``report``) gate the run: any
    failure, or any vacuous/unverifiable verdict unless ``allow_inconclusive``,
    returns a ``hypotheses_unmet`` result without iterating. With ``force``
    the run proceeds and the result is marked ``hypotheses_overridden``.
    ``on_step`` receives each trace line as it is produced.
    """
    seed = p.seed if seed is None else tuple(seed)
    if seed is None:
        raise UsageError("solve needs a seed tuple")
    seed = tuple(p.space.canonical(e) for e in seed)
    if len(seed) != p.arity:
        raise UsageError(f"seed has length {len(seed)}, arity is {p.arity}")
    if max_iter < 0:
        raise UsageError("max_iter must be >= 0")
    if report is None:
        report = hypotheses.check_all(p, samples, seed)
    blocked = bool(report.failed or (report.inconclusive and not allow_inconclusive))
    trace = IterationTrace()
    trace.tuples.append(seed)
    trace.g_images.append(p.g_images(seed))
    if on_step:
        on_step(trace.record(0))
    if blocked and not force:
        return SolveResult(HYPOTHESES_UNMET, None, None, 0, trace, {}, p.scheme.name, False, report)

    ts = p.tuple_space
    eps = p.eps_check
    status = MAX_ITERATIONS
    final, res = seed, None
    stall = 0
    for n in range(1, max_iter + 1):
        t0 = time.perf_counter()
        prev = trace.tuples[-1]
        cur = step(p, prev)
        imgs = p.g_images(cur)
        dn = delta(ts, trace.g_images[-1], imgs)
        flags = [_moves_ok(p, s, a, b) for s, a, b in zip(ts.pattern, trace.g_images[-1], imgs)]
        trace.tuples.append(cur)
        trace.g_images.append(imgs)
        trace.deltas.append(dn)
        trace.delta_bounds.append(delta_bound(p, prev, cur))
        trace.step_flags.append(flags)
        trace.wall_times.append(time.perf_counter() - t0)
        if on_step:
            on_step(trace.record(n))
        final = cur
        if dn <= delta_tol:
            res = residual(p, cur)
            if res <= residual_tol:
                status = CONVERGED
                break
        if len(trace.deltas) >= 2 and dn > trace.deltas[-2] * STALL_FACTOR:
            stall += 1
            if stall >= STALL_WINDOW:
                status = STALLED
                break
        else:
            stall = 0
    if status != CONVERGED:
        res = residual(p, final)
    certs = _certificates(p, trace, eps)
    return SolveResult(
        status, final, res, trace.steps, trace, certs, p.scheme.name,
        hypotheses_overridden=blocked, report=report,
    )


def _certificates(p: Problem, trace: IterationTrace, eps) -> dict:
    # delta_bounds[n] bounds the step after deltas[n]
    decay = all(
        nxt <= bound + eps for nxt, bound in zip(trace.deltas[1:], trace.delta_bounds)
    )
    nonincreasing = all(b <= a + eps for a, b in zip(trace.deltas, trace.deltas[1:]))
    if trace.steps >= 1:
        flags, inc = chain_flags(trace, p.tuple_space, eps)
    else:
        flags, inc = [True] * p.arity, [0] * p.arity
    return {
        "delta_decay_held": decay,
        "delta_nonincreasing": nonincreasing,
        "chains_monotone": all(flags),
        "chain_flags": flags,
        "incomparable_steps": inc,
    }
