"""Partially ordered metric spaces and their n-fold products.

Three built-in carrier flavors are provided (finite tables, real intervals and
axis-aligned boxes); anything else can be wrapped in :class:`CustomSpace`.
Elements are plain hashable Python values: table entries for finite spaces,
floats for intervals and tuples of floats for boxes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from posetfix.errors import EvaluationError, UsageError

Element = Any

PATTERNS = {
    2: (1, -1),
    3: (1, -1, 1),
    4: (1, -1, 1, -1),
}


class Space:
    """Base class: a carrier with a distance and a partial-order predicate."""

    flavor = "abstract"
    finite = False
    exact = False
    #: Completeness cannot be checked; built-in flavors are complete by construction.
    assumed_complete = True
    #: Whether the order-limit property (monotone sequences are bounded by their
    #: limits) holds by construction.
    order_limits_builtin = True
    resolution = 21

    @property
    def eps_metric(self) -> float:
        return 0 if self.exact else 1e-12

    def distance(self, a: Element, b: Element):
        raise NotImplementedError

    def leq(self, a: Element, b: Element) -> bool:
        raise NotImplementedError

    def contains(self, a: Element) -> bool:
        raise NotImplementedError

    def canonical(self, v: Any) -> Element:
        """Coerce a computed value to the carrier's representation.

        Raises EvaluationError when ``v`` is not an element.
        """
        if not self.contains(v):
            raise EvaluationError(f"value {v!r} is outside the carrier")
        return v

    def sample(self, resolution: int | None = None) -> list:
        raise NotImplementedError

    def grid_descriptor(self, resolution: int | None = None) -> dict:
        return {"flavor": self.flavor, "points": len(self.sample(resolution))}


def _as_fraction(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12) if not v.is_integer() else Fraction(int(v))
    return Fraction(v)


@dataclass(frozen=True, eq=True)
class FiniteSpace(Space):
    """A finite carrier given by explicit distance and order tables.

    ``distance_table[i][j]`` and ``order_table[i][j]`` (meaning
    ``elements[i] <= elements[j]``) are indexed by carrier position.
    Distances are kept as exact fractions.
    """

    elements: tuple
    distance_table: tuple
    order_table: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    flavor = "finite"
    finite = True
    exact = True

    def __post_init__(self):
        elements = tuple(_freeze(e) for e in self.elements)
        n = len(elements)
        if n == 0:
            raise UsageError("finite space needs at least one element")
        if len(set(elements)) != n:
            raise UsageError("finite space elements must be distinct")
        dist = self.distance_table
        order = self.order_table
        if len(dist) != n or any(len(row) != n for row in dist):
            raise UsageError(f"distance table must be {n}x{n}")
        if len(order) != n or any(len(row) != n for row in order):
            raise UsageError(f"order table must be {n}x{n}")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(
            self, "distance_table", tuple(tuple(_as_fraction(v) for v in row) for row in dist)
        )
        object.__setattr__(self, "order_table", tuple(tuple(bool(v) for v in row) for row in order))
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(elements)})

    @classmethod
    def discrete_chain(cls, elements: Sequence) -> "FiniteSpace":
        """Discrete metric with the order given by list position."""
        n = len(elements)
        dist = [[0 if i == j else 1 for j in range(n)] for i in range(n)]
        order = [[i <= j for j in range(n)] for i in range(n)]
        return cls(tuple(elements), dist, order)

    @property
    def resolution(self):
        return len(self.elements)

    def index(self, a: Element) -> int:
        try:
            return self._index[a]
        except (KeyError, TypeError):
            raise EvaluationError(f"value {a!r} is outside the carrier") from None

    def distance(self, a, b):
        return self.distance_table[self.index(a)][self.index(b)]

    def leq(self, a, b) -> bool:
        return self.order_table[self.index(a)][self.index(b)]

    def contains(self, a) -> bool:
        try:
            return a in self._index
        except TypeError:
            return False

    def canonical(self, v):
        # Fraction(1) == 1 and hashes alike, so computed values map back to labels.
        return self.elements[self.index(_freeze(v))]

    def sample(self, resolution=None) -> list:
        return list(self.elements)

    def grid_descriptor(self, resolution=None) -> dict:
        return {"flavor": "finite", "points": len(self.elements), "exhaustive": True}


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


def _linspace(lo: float, hi: float, n: int) -> list[float]:
    if n < 1:
        raise UsageError("grid resolution must be at least 1")
    if n == 1:
        return [lo + (hi - lo) / 2]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


@dataclass(frozen=True)
class IntervalSpace(Space):
    """A closed real interval with ``|a - b|`` and the usual order.

    Infinite bounds describe a half-line or the whole real line; sampling
    then requires a finite ``sample_lo``/``sample_hi`` window.
    """

    lo: float = 0.0
    hi: float = 1.0
    resolution: int = 21
    sample_lo: float | None = None
    sample_hi: float | None = None

    flavor = "interval"

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise UsageError(f"interval bounds out of order: [{self.lo}, {self.hi}]")
        lo, hi = self.window
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise UsageError("unbounded interval needs a finite sampling window")
        if lo < self.lo or hi > self.hi or lo > hi:
            raise UsageError("sampling window must lie inside the interval")

    @property
    def window(self) -> tuple[float, float]:
        lo = self.lo if self.sample_lo is None else self.sample_lo
        hi = self.hi if self.sample_hi is None else self.sample_hi
        return lo, hi

    def distance(self, a, b):
        return abs(a - b)

    def leq(self, a, b) -> bool:
        return a <= b

    def contains(self, a) -> bool:
        try:
            return self.lo <= a <= self.hi
        except TypeError:
            return False

    def canonical(self, v):
        if isinstance(v, Fraction):
            v = float(v)
        if not self.contains(v):
            raise EvaluationError(f"value {v!r} is outside [{self.lo}, {self.hi}]")
        return v

    def sample(self, resolution=None) -> list:
        lo, hi = self.window
        return _linspace(lo, hi, resolution or self.resolution)

    def grid_descriptor(self, resolution=None) -> dict:
        lo, hi = self.window
        return {"flavor": "interval", "lo": lo, "hi": hi, "points": resolution or self.resolution}


@dataclass(frozen=True)
class BoxSpace(Space):
    """A closed box in R^k with the componentwise order.

    ``norm`` picks the metric: ``"max"`` (Chebyshev), ``"l1"`` or ``"l2"``.
    Elements are tuples of floats; the sampling grid has ``resolution``
    points per axis.
    """

    lows: tuple = (0.0,)
    highs: tuple = (1.0,)
    resolution: int = 5
    norm: str = "max"

    flavor = "box"

    def __post_init__(self):
        object.__setattr__(self, "lows", tuple(float(v) for v in self.lows))
        object.__setattr__(self, "highs", tuple(float(v) for v in self.highs))
        if len(self.lows) != len(self.highs) or not self.lows:
            raise UsageError("box needs matching, nonempty lows and highs")
        if any(not lo <= hi for lo, hi in zip(self.lows, self.highs)):
            raise UsageError("box bounds out of order")
        if not all(map(math.isfinite, self.lows + self.highs)):
            raise UsageError("box bounds must be finite")
        if self.norm not in ("max", "l1", "l2"):
            raise UsageError(f"unknown box norm {self.norm!r}")

    @property
    def dim(self) -> int:
        return len(self.lows)

    def distance(self, a, b):
        diffs = [abs(p - q) for p, q in zip(a, b)]
        if self.norm == "max":
            return max(diffs)
        if self.norm == "l1":
            return sum(diffs)
        return math.sqrt(sum(d * d for d in diffs))

    def leq(self, a, b) -> bool:
        return all(p <= q for p, q in zip(a, b))

    def contains(self, a) -> bool:
        try:
            return len(a) == self.dim and all(
                lo <= v <= hi for v, lo, hi in zip(a, self.lows, self.highs)
            )
        except TypeError:
            return False

    def canonical(self, v):
        v = tuple(float(c) for c in v)
        if not self.contains(v):
            raise EvaluationError(f"value {v!r} is outside the box")
        return v

    def sample(self, resolution=None) -> list:
        n = resolution or self.resolution
        axes = [_linspace(lo, hi, n) for lo, hi in zip(self.lows, self.highs)]
        return [tuple(p) for p in itertools.product(*axes)]

    def grid_descriptor(self, resolution=None) -> dict:
        return {
            "flavor": "box",
            "lows": list(self.lows),
            "highs": list(self.highs),
            "points_per_axis": resolution or self.resolution,
            "norm": self.norm,
        }


@dataclass(frozen=True)
class CustomSpace(Space):
    """A user-defined space given by callables and an explicit sample set.

    Completeness and the order-limit property are recorded as assumptions,
    never verified.
    """

    distance_fn: Callable = None
    leq_fn: Callable = None
    points: tuple = ()
    contains_fn: Callable | None = None
    exact: bool = False

    flavor = "custom"
    order_limits_builtin = False

    def distance(self, a, b):
        return self.distance_fn(a, b)

    def leq(self, a, b) -> bool:
        return bool(self.leq_fn(a, b))

    def contains(self, a) -> bool:
        if self.contains_fn is None:
            return True
        return bool(self.contains_fn(a))

    @property
    def resolution(self):
        return len(self.points)

    def sample(self, resolution=None) -> list:
        return list(self.points)


@dataclass(frozen=True)
class TupleSpace:
    """The product X^n with the sum metric and a sign-patterned order."""

    base: Space
    arity: int
    pattern: tuple | None = None

    def __post_init__(self):
        if self.arity not in PATTERNS:
            raise UsageError(f"arity must be 2, 3 or 4, got {self.arity}")
        pattern = PATTERNS[self.arity] if self.pattern is None else tuple(self.pattern)
        if len(pattern) != self.arity or any(s not in (1, -1) for s in pattern):
            raise UsageError(f"pattern {pattern!r} does not fit arity {self.arity}")
        object.__setattr__(self, "pattern", pattern)

    def _check(self, a, b):
        if len(a) != self.arity or len(b) != self.arity:
            raise UsageError(
                f"expected tuples of length {self.arity}, got {len(a)} and {len(b)}"
            )


def product_distance(ts: TupleSpace, a: Sequence, b: Sequence):
    """Sum of coordinate distances between two n-tuples."""
    ts._check(a, b)
    return sum(ts.base.distance(p, q) for p, q in zip(a, b))


def tuple_leq(ts: TupleSpace, a: Sequence, b: Sequence) -> bool:
    """Product order: ``+`` positions compare forward, ``-`` positions reversed."""
    ts._check(a, b)
    leq = ts.base.leq
    return all(leq(p, q) if s > 0 else leq(q, p) for s, p, q in zip(ts.pattern, a, b))


@dataclass
class Violation:
    axiom: str
    points: tuple
    detail: str

    def as_dict(self) -> dict:
        return {"axiom": self.axiom, "points": list(self.points), "detail": self.detail}


@dataclass
class AuditReport:
    sample_size: int
    eps_metric: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def axioms_violated(self) -> set:
        return {v.axiom for v in self.violations}


def audit_space(s: Space, sample: Sequence, eps_metric: float | None = None) -> AuditReport:
    """Check metric and partial-order axioms over all pairs and triples of ``sample``."""
    sample = list(sample)
    if not sample:
        raise UsageError("audit needs a nonempty sample")
    eps = s.eps_metric if eps_metric is None else eps_metric
    report = AuditReport(len(sample), eps)
    bad = report.violations.append

    def d(a, b):
        try:
            return s.distance(a, b)
        except Exception as exc:  # user callables may fail anywhere
            bad(Violation("evaluation", (a, b), f"distance raised {exc!r}"))
            return None

    def le(a, b):
        try:
            return s.leq(a, b)
        except Exception as exc:
            bad(Violation("evaluation", (a, b), f"leq raised {exc!r}"))
            return None

    n = len(sample)
    D = [[d(a, b) for b in sample] for a in sample]
    L = [[le(a, b) for b in sample] for a in sample]
    for i, a in enumerate(sample):
        if D[i][i] is not None and abs(D[i][i]) > eps:
            bad(Violation("identity", (a,), f"d(a,a) = {D[i][i]}"))
        if L[i][i] is False:
            bad(Violation("reflexivity", (a,), "not leq(a, a)"))
        for j in range(n):
            b = sample[j]
            dij, dji = D[i][j], D[j][i]
            if dij is None or dji is None:
                continue
            if dij < -eps:
                bad(Violation("nonnegativity", (a, b), f"d = {dij}"))
            if j > i:
                if abs(dij - dji) > eps:
                    bad(Violation("symmetry", (a, b), f"d(a,b) = {dij} != d(b,a) = {dji}"))
                if abs(dij) <= eps and a != b:
                    bad(Violation("separation", (a, b), "distinct points at distance 0"))
                if L[i][j] and L[j][i] and a != b:
                    bad(Violation("antisymmetry", (a, b), "a <= b and b <= a but a != b"))
    for i, j, k in itertools.product(range(n), repeat=3):
        dij, djk, dik = D[i][j], D[j][k], D[i][k]
        if None not in (dij, djk, dik) and dik > dij + djk + eps:
            bad(
                Violation(
                    "triangle",
                    (sample[i], sample[j], sample[k]),
                    f"d(a,c) = {dik} > {dij} + {djk}",
                )
            )
        if L[i][j] and L[j][k] and L[i][k] is False:
            bad(Violation("transitivity", (sample[i], sample[j], sample[k]), "a<=b<=c but not a<=c"))
    return report
