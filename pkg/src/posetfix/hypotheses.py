"""Sampled and exhaustive verification of the theorem hypotheses.

Every check returns a :class:`HypothesisReport` holding one
:class:`CheckRecord` per hypothesis. Verdicts are ``pass``, ``fail``,
``skipped``, ``vacuous`` (nothing comparable was tested) and
``unverifiable``. A failing record always carries a witness that
:func:`replay_witness` can re-evaluate.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from typing import Sequence

from posetfix import comparators
from posetfix.errors import EvaluationError, UsageError
from posetfix.problem import Problem
from posetfix.spaces import tuple_leq

ENUMERATION_GUARD = 10**7
GRID_ENV = "POSETFIX_GRID"

PASS, FAIL, SKIPPED, VACUOUS, UNVERIFIABLE = "pass", "fail", "skipped", "vacuous", "unverifiable"


def default_resolution() -> int | None:
    raw = os.environ.get(GRID_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{GRID_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{GRID_ENV} must be >= 1")
    return n


@dataclass(frozen=True)
class Sampling:
    """How point sets are drawn.

    The grid comes from the space (``resolution`` overrides it). Tuple and
    pair sets are enumerated completely when they fit the budgets and drawn
    pseudo-randomly with ``seed`` otherwise. ``exhaustive=True`` demands full
    enumeration and fails loudly past the enumeration guard.
    """

    resolution: int | None = None
    max_tuples: int = 4096
    max_pairs: int = 20000
    max_bases: int = 256
    seed: int = 0
    exhaustive: bool = False
    continuity_factor: float = 1e3
    phi_grid: tuple | None = None


@dataclass
class CheckRecord:
    name: str
    verdict: str
    witness: dict | None = None
    coverage: int = 0
    skipped: int = 0
    violations: int = 0
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"check": self.name, "verdict": self.verdict, "coverage": self.coverage}
        if self.skipped:
            out["skipped"] = self.skipped
        if self.violations:
            out["violations"] = self.violations
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class HypothesisReport:
    records: list = field(default_factory=list)
    sampling: dict = field(default_factory=dict)
    exhaustive: bool = False

    def __getitem__(self, name: str) -> CheckRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def verdict(self, name: str) -> str:
        return self[name].verdict

    def extend(self, other: "HypothesisReport") -> "HypothesisReport":
        self.records.extend(other.records)
        self.exhaustive = self.exhaustive and other.exhaustive if self.records else other.exhaustive
        self.sampling = self.sampling or other.sampling
        return self

    @property
    def failed(self) -> list:
        return [r for r in self.records if r.verdict == FAIL]

    @property
    def inconclusive(self) -> list:
        return [r for r in self.records if r.verdict in (VACUOUS, UNVERIFIABLE)]

    @property
    def passed(self) -> bool:
        return not self.failed and not self.inconclusive

    def exit_code(self) -> int:
        if self.failed:
            return 2
        if self.inconclusive:
            return 3
        return 0

    def as_dicts(self) -> list[dict]:
        return [r.as_dict() for r in self.records]


# -- sample construction ------------------------------------------------------


@dataclass
class _Domain:
    points: list
    tuples: list
    exhaustive: bool
    descriptor: dict


def _points(p: Problem, s: Sampling) -> list:
    res = s.resolution or default_resolution()
    return p.space.sample(res)


def _domain(p: Problem, s: Sampling, limit: int) -> _Domain:
    points = _points(p, s)
    m, n = len(points), p.arity
    total = m**n
    desc = dict(p.space.grid_descriptor(s.resolution or default_resolution()))
    if s.exhaustive and total > ENUMERATION_GUARD:
        raise UsageError(
            f"exhaustive enumeration of {m}^{n} = {total} tuples exceeds {ENUMERATION_GUARD}; use a smaller carrier"
        )
    if s.exhaustive or total <= limit:
        tuples = list(itertools.product(points, repeat=n))
        desc.update(kind="all_tuples", tuples=total)
        return _Domain(points, tuples, p.space.finite, desc)
    rng = random.Random(s.seed)
    idx = sorted({tuple(rng.randrange(m) for _ in range(n)) for _ in range(limit)})
    desc.update(kind="random_tuples", tuples=len(idx), seed=s.seed)
    return _Domain(points, [tuple(points[i] for i in t) for t in idx], False, desc)


def _pairs(p: Problem, s: Sampling):
    """Unordered pairs of distinct tuples, canonical order, with a descriptor."""
    points = _points(p, s)
    m, n = len(points), p.arity
    total = m**n
    if s.exhaustive and total * total > ENUMERATION_GUARD:
        raise UsageError(
            f"exhaustive pair enumeration over {total} tuples exceeds {ENUMERATION_GUARD}; use a smaller carrier"
        )
    if s.exhaustive or total * (total - 1) // 2 <= s.max_pairs:
        tuples = list(itertools.product(points, repeat=n))
        pairs = itertools.combinations(tuples, 2)
        desc = {"kind": "all_pairs", "pairs": total * (total - 1) // 2}
        return pairs, p.space.finite, desc
    # a tuple is drawn as one base-m code; code order is lexicographic index order
    rng = random.Random(s.seed)
    drawn = set()
    for _ in range(s.max_pairs):
        a, b = rng.randrange(total), rng.randrange(total)
        if a != b:
            drawn.add((min(a, b), max(a, b)))

    def decode(code):
        digits = []
        for _ in range(n):
            code, r = divmod(code, m)
            digits.append(points[r])
        return tuple(reversed(digits))

    pairs = [(decode(a), decode(b)) for a, b in sorted(drawn)]
    return pairs, False, {"kind": "random_pairs", "pairs": len(pairs), "seed": s.seed}


def _le(space, a, b, eps) -> bool:
    """``a <= b`` up to round-off: equal within ``eps`` also counts."""
    if space.leq(a, b):
        return True
    return eps > 0 and space.distance(a, b) <= eps


def _report(record: CheckRecord, sampling: dict, exhaustive: bool) -> HypothesisReport:
    record.details.setdefault("exhaustive", exhaustive)
    return HypothesisReport([record], sampling, exhaustive)


def _sign(s: int) -> str:
    return "+" if s > 0 else "-"


# -- checks -------------------------------------------------------------------


def check_comparator(p: Problem, samples: Sampling = Sampling()) -> HypothesisReport:
    """Phi-membership (sampled) plus coefficient constraints of linear kinds."""
    grid = list(samples.phi_grid) if samples.phi_grid else None
    m = comparators.check_phi_membership(p.comparator, grid)
    rec = CheckRecord("comparator", PASS, coverage=len(m.points))
    rec.details = {
        "description": p.comparator.description,
        "kind": p.comparator.kind,
        "numerical": m.numerical,
        "right_step": m.right_step,
        "phi_at_zero": m.phi_at_zero,
    }
    if m.phi_at_zero is not None and m.phi_at_zero > 0:
        rec.details["note"] = "phi(0) > 0"
    bad = m.failures()
    if m.invariant_problems:
        rec.verdict = FAIL
        rec.witness = {"constraint": m.invariant_problems[0]}
        rec.violations = len(m.invariant_problems) + len(bad)
    elif bad:
        w = bad[0]
        rec.verdict = FAIL
        rec.violations = len(bad)
        rec.witness = {
            "t": w.t,
            "phi_t": w.phi_t,
            "below_diagonal": w.below_diagonal,
            "right_limit_below": w.right_limit_below,
            "nonnegative": w.nonnegative,
        }
        if w.error:
            rec.witness["error"] = w.error
    return _report(rec, {"phi_grid_points": len(m.points)}, False)


def check_totality(p: Problem, samples: Sampling = Sampling()) -> HypothesisReport:
    """F (and g) evaluate to carrier elements on the sample."""
    dom = _domain(p, samples, samples.max_tuples)
    rec = CheckRecord("totality", PASS)
    for e in dom.points if p.has_g else ():
        rec.coverage += 1
        try:
            p.apply_g(e)
        except EvaluationError as exc:
            rec.violations += 1
            if rec.witness is None:
                rec.witness = {"mapping": "g", "argument": e, "error": str(exc)}
    for t in dom.tuples:
        rec.coverage += 1
        try:
            p.apply_F(t)
        except EvaluationError as exc:
            rec.violations += 1
            if rec.witness is None:
                rec.witness = {"mapping": "F", "argument": list(t), "error": str(exc)}
    if rec.violations:
        rec.verdict = FAIL
    return _report(rec, dom.descriptor, dom.exhaustive)


def check_mixed_monotone(p: Problem, samples: Sampling = Sampling()) -> HypothesisReport:
    """Sign-pattern monotonicity of F in each coordinate, compared through g."""
    dom = _domain(p, samples, samples.max_bases)
    space, eps = p.space, p.eps_check
    pts = dom.points
    m = len(pts)
    rec = CheckRecord("mixed_monotone", PASS)
    try:
        gp = [p.apply_g(e) for e in pts]
    except EvaluationError as exc:
        rec.verdict = UNVERIFIABLE
        rec.details["reason"] = f"g not total on the grid: {exc}"
        return _report(rec, dom.descriptor, dom.exhaustive)
    below = [[i != k and space.leq(gp[i], gp[k]) for k in range(m)] for i in range(m)]
    incomparable = sum(
        1 for i in range(m) for k in range(i + 1, m) if not below[i][k] and not below[k][i]
    )
    ordered = [(i, k) for i in range(m) for k in range(m) if below[i][k]]
    per_position = {}
    for j, sign in enumerate(p.pattern):
        tested = 0
        for base in dom.tuples:
            vals = []
            for e in pts:
                args = base[:j] + (e,) + base[j + 1:]
                try:
                    vals.append(p.apply_F(args))
                except EvaluationError:
                    vals.append(None)
            for i, k in ordered:
                if vals[i] is None or vals[k] is None:
                    continue
                tested += 1
                lo, hi = (vals[i], vals[k]) if sign > 0 else (vals[k], vals[i])
                if _le(space, lo, hi, eps):
                    continue
                rec.violations += 1
                if rec.witness is None:
                    rec.witness = {
                        "position": j + 1,
                        "direction": _sign(sign),
                        "base": list(base),
                        "low": pts[i],
                        "high": pts[k],
                        "F_low": vals[i],
                        "F_high": vals[k],
                    }
            rec.skipped += incomparable
        per_position[j + 1] = tested
        rec.coverage += tested
    rec.details["tested_per_position"] = per_position
    rec.details["compared_through_g"] = p.has_g
    if rec.violations:
        rec.verdict = FAIL
    elif rec.coverage == 0:
        rec.verdict = VACUOUS
    return _report(rec, dom.descriptor, dom.exhaustive)


def _contraction_case(p: Problem, a, b):
    """(comparable, lhs, rhs, distances) for one tuple pair."""
    ts = p.tuple_space
    ga, gb = p.g_images(a), p.g_images(b)
    if not (tuple_leq(ts, ga, gb) or tuple_leq(ts, gb, ga)):
        return False, None, None, None
    lhs = p.space.distance(p.apply_F(a), p.apply_F(b))
    dv = p.contraction_distance_vector(a, b)
    return True, lhs, p.rhs(dv), dv


def check_contraction(p: Problem, samples: Sampling = Sampling()) -> HypothesisReport:
    """The contraction inequality over comparable pairs of sampled tuples."""
    pairs, exhaustive, desc = _pairs(p, samples)
    rec = CheckRecord("contraction", PASS)
    rec.details = {
        "distances": p.contraction_distances,
        "form": _form_name(p),
    }
    worst = None
    for a, b in pairs:
        try:
            comparable, lhs, rhs, dv = _contraction_case(p, a, b)
        except EvaluationError:
            rec.skipped += 1
            continue
        if not comparable:
            rec.skipped += 1
            continue
        rec.coverage += 1
        if lhs > rhs + p.eps_check:
            rec.violations += 1
            excess = lhs - rhs
            if worst is None or excess > worst:
                worst = excess
            if rec.witness is None:
                rec.witness = {"a": list(a), "b": list(b), "lhs": lhs, "rhs": rhs, "distances": list(dv)}
    rec.details["comparable_pairs"] = rec.coverage
    if rec.violations:
        rec.verdict = FAIL
        rec.details["max_excess"] = worst
    elif rec.coverage == 0:
        rec.verdict = VACUOUS
    return _report(rec, desc, exhaustive)


def _form_name(p: Problem) -> str:
    if p.arity == 2:
        if p.has_g and p.g_coupled_form == "printed":
            return "k/2*((d1+d2)/2)"
        return "k/2*(d1+d2)"
    if p.arity == 3:
        return "a*d1+b*d2+c*d3"
    return "phi((d1+d2+d3+d4)/4)"


def _seed_rows(p: Problem, seed):
    rows = []
    for i, sign in enumerate(p.pattern):
        v = p.apply_F(p.scheme.arguments(seed, i))
        gs = p.apply_g(seed[i])
        holds = _le(p.space, gs, v, p.eps_check) if sign > 0 else _le(p.space, v, gs, p.eps_check)
        rows.append(
            {
                "coordinate": i + 1,
                "g_seed": gs,
                "relation": "<=" if sign > 0 else ">=",
                "F_value": v,
                "holds": holds,
            }
        )
    return rows


def check_seed(p: Problem, seed: Sequence | None = None) -> HypothesisReport:
    """The initial tuple straddles its F-values in the pattern directions."""
    seed = p.seed if seed is None else tuple(seed)
    rec = CheckRecord("seed", PASS)
    if seed is None:
        rec.verdict = SKIPPED
        rec.details["reason"] = "no seed given"
        return _report(rec, {}, False)
    if len(seed) != p.arity:
        raise UsageError(f"seed has length {len(seed)}, arity is {p.arity}")
    try:
        rows = _seed_rows(p, seed)
    except EvaluationError as exc:
        rec.verdict = FAIL
        rec.witness = {"seed": list(seed), "error": str(exc)}
        return _report(rec, {}, False)
    rec.coverage = len(rows)
    rec.details = {"scheme": p.scheme.name, "inequalities": rows}
    bad = [r for r in rows if not r["holds"]]
    if bad:
        rec.verdict = FAIL
        rec.violations = len(bad)
        rec.witness = dict(bad[0], seed=list(seed))
    return _report(rec, {}, False)


def check_commutativity(p: Problem, samples: Sampling = Sampling()) -> HypothesisReport:
    """``g(F(t)) == F(g(t))`` on sampled tuples."""
    rec = CheckRecord("commutativity", PASS)
    if not p.has_g:
        rec.verdict = SKIPPED
        rec.details["reason"] = "g is the identity"
        return _report(rec, {}, False)
    dom = _domain(p, samples, samples.max_tuples)
    for t in dom.tuples:
        rec.coverage += 1
        try:
            gF = p.apply_g(p.apply_F(t))
            Fg = p.apply_F(p.g_images(t))
        except EvaluationError as exc:
            rec.violations += 1
            if rec.witness is None:
                rec.witness = {"tuple": list(t), "error": str(exc)}
            continue
        dist = p.space.distance(gF, Fg)
        if dist > p.eps_check:
            rec.violations += 1
            if rec.witness is None:
                rec.witness = {"tuple": list(t), "g_of_F": gF, "F_of_g": Fg, "distance": dist}
    if rec.violations:
        rec.verdict = FAIL
    return _report(rec, dom.descriptor, dom.exhaustive)


def _preimage(p: Problem, v):
    """Some u with g(u) == v, or None. Uses the section inverse or enumeration."""
    space = p.space
    if p.g_inverse is not None:
        try:
            u = space.canonical(p.g_inverse(v))
        except Exception:
            return None
        if space.distance(p.apply_g(u), v) <= p.eps_check:
            return u
        return None
    if space.finite:
        for u in space.elements:
            if p.apply_g(u) == v:
                return u
        return None
    raise _Unverifiable


class _Unverifiable(Exception):
    pass


def check_range_inclusion(p: Problem, samples: Sampling = Sampling()) -> HypothesisReport:
    """Every sampled F-value lies in the image of g."""
    rec = CheckRecord("range_inclusion", PASS)
    if not p.has_g:
        rec.details["reason"] = "g is the identity"
        return _report(rec, {}, p.space.finite)
    dom = _domain(p, samples, samples.max_tuples)
    rec.details["method"] = "section_inverse" if p.g_inverse is not None else "enumeration"
    for t in dom.tuples:
        try:
            v = p.apply_F(t)
        except EvaluationError:
            rec.skipped += 1
            continue
        rec.coverage += 1
        try:
            u = _preimage(p, v)
        except _Unverifiable:
            rec.verdict = UNVERIFIABLE
            rec.details = {"reason": "no section inverse for g on an infinite carrier"}
            rec.coverage = 0
            return _report(rec, dom.descriptor, dom.exhaustive)
        if u is None:
            rec.violations += 1
            if rec.witness is None:
                rec.witness = {"tuple": list(t), "value": v}
    if rec.violations:
        rec.verdict = FAIL
    return _report(rec, dom.descriptor, dom.exhaustive)


def _neighbor_pairs(points):
    return list(zip(points, points[1:]))


def check_continuity(p: Problem, samples: Sampling = Sampling(), mapping: str = "F") -> HypothesisReport:
    """Numerical continuity surrogate: image distance over input distance
    between grid neighbours must stay below ``samples.continuity_factor``."""
    name = f"continuity_{mapping}"
    rec = CheckRecord(name, PASS, details={"numerical": True, "factor": samples.continuity_factor})
    if mapping == "g":
        rec.details["provenance"] = "required by the limit argument; not among the stated hypotheses"
    if p.space.finite:
        rec.details["reason"] = "every map on a finite metric space is continuous"
        return _report(rec, p.space.grid_descriptor(), True)
    factor = samples.continuity_factor
    dom = _domain(p, samples, samples.max_bases)
    d = p.space.distance
    if mapping == "g":
        cases = [((a,), (b,)) for a, b in _neighbor_pairs(dom.points)]
        fn = lambda t: p.apply_g(t[0])  # noqa: E731
    else:
        cases = []
        for base in dom.tuples:
            for j in range(p.arity):
                for a, b in _neighbor_pairs(dom.points):
                    if base[j] == a:
                        cases.append((base, base[:j] + (b,) + base[j + 1:]))
        fn = p.apply_F
    for s, t in cases:
        gap = sum(d(u, v) for u, v in zip(s, t))
        if gap == 0:
            continue
        try:
            ratio = d(fn(s), fn(t)) / gap
        except EvaluationError:
            rec.skipped += 1
            continue
        rec.coverage += 1
        if ratio > factor:
            rec.violations += 1
            if rec.witness is None:
                rec.witness = {"a": list(s), "b": list(t), "ratio": ratio}
    if rec.violations:
        rec.verdict = FAIL
    elif rec.coverage == 0:
        rec.verdict = VACUOUS
    return _report(rec, dom.descriptor, False)


def check_order_limits(p: Problem) -> HypothesisReport:
    """Order-limit property: monotone convergent sequences are bounded by their limits."""
    rec = CheckRecord("order_limits", PASS)
    if p.space.order_limits_builtin:
        rec.details["reason"] = f"holds by construction for the {p.space.flavor} carrier"
    else:
        rec.verdict = UNVERIFIABLE
        rec.details["reason"] = "custom carrier; order-limit property cannot be checked"
    return _report(rec, {}, False)


_SPACE_CHECKS = {
    "totality", "mixed_monotone", "contraction", "commutativity",
    "range_inclusion", "continuity_F", "continuity_g",
}


def check_all(p: Problem, samples: Sampling = Sampling(), seed: Sequence | None = None) -> HypothesisReport:
    """Every hypothesis of the theorem matching ``p.arity``."""
    report = HypothesisReport()
    parts = [
        check_comparator(p, samples),
        check_totality(p, samples),
        check_mixed_monotone(p, samples),
        check_contraction(p, samples),
        check_seed(p, seed),
        check_commutativity(p, samples),
        check_range_inclusion(p, samples),
    ]
    if p.assumption_mode == "continuity":
        parts.append(check_continuity(p, samples, "F"))
    else:
        parts.append(check_order_limits(p))
    if p.has_g:
        parts.append(check_continuity(p, samples, "g"))
    report.records = [r for part in parts for r in part.records]
    report.exhaustive = p.space.finite and all(
        part.exhaustive
        for part in parts
        if part.records[0].name in _SPACE_CHECKS and part.records[0].verdict != SKIPPED
    )
    report.sampling = {
        "grid": p.space.grid_descriptor(samples.resolution or default_resolution()),
        "max_tuples": samples.max_tuples,
        "max_pairs": samples.max_pairs,
        "max_bases": samples.max_bases,
        "seed": samples.seed,
        "exhaustive": report.exhaustive,
    }
    return report


# -- witness replay -----------------------------------------------------------


def replay_witness(p: Problem, record: CheckRecord) -> bool:
    """Re-evaluate a failing record's witness; True iff the violation reproduces."""
    w = record.witness
    if record.verdict != FAIL or w is None:
        return False
    eps = p.eps_check
    space = p.space
    name = record.name
    if name == "contraction":
        a, b = tuple(w["a"]), tuple(w["b"])
        comparable, lhs, rhs, _ = _contraction_case(p, a, b)
        return comparable and lhs > rhs + eps
    if name == "mixed_monotone":
        j = w["position"] - 1
        base = tuple(w["base"])
        if not space.leq(p.apply_g(w["low"]), p.apply_g(w["high"])):
            return False
        f_lo = p.apply_F(base[:j] + (w["low"],) + base[j + 1:])
        f_hi = p.apply_F(base[:j] + (w["high"],) + base[j + 1:])
        if p.pattern[j] < 0:
            f_lo, f_hi = f_hi, f_lo
        return not _le(space, f_lo, f_hi, eps)
    if name == "seed":
        try:
            rows = _seed_rows(p, tuple(w["seed"]))
        except EvaluationError:
            return "error" in w
        return not rows[w["coordinate"] - 1]["holds"]
    if name == "commutativity":
        t = tuple(w["tuple"])
        try:
            return space.distance(p.apply_g(p.apply_F(t)), p.apply_F(p.g_images(t))) > eps
        except EvaluationError:
            return True
    if name == "range_inclusion":
        return _preimage(p, p.apply_F(tuple(w["tuple"]))) is None
    if name == "comparator":
        if "constraint" in w:
            return bool(p.comparator.invariant_problems())
        m = comparators.check_phi_membership(p.comparator, [w["t"]])
        return not m.passed
    if name == "totality":
        try:
            if w["mapping"] == "g":
                p.apply_g(w["argument"])
            else:
                p.apply_F(tuple(w["argument"]))
        except EvaluationError:
            return True
        return False
    if name.startswith("continuity_"):
        s, t = tuple(w["a"]), tuple(w["b"])
        fn = (lambda u: p.apply_g(u[0])) if name.endswith("_g") else p.apply_F
        gap = sum(space.distance(u, v) for u, v in zip(s, t))
        return space.distance(fn(s), fn(t)) / gap > record.details["factor"]
    raise UsageError(f"no replay for check {name!r}")
