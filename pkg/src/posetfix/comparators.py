"""Contraction comparators: the function class Phi and linear coefficients.

A comparator bounds ``d(F(a), F(b))`` in terms of coordinate distances.
Three kinds exist:

* ``linear``: a single constant ``k``; ``phi(t) = k*t``.
* ``linear_weights``: per-coordinate weights ``(a, b, c)`` for arity 3.
* ``custom``: any callable ``phi`` on ``[0, inf)``.

Which kinds are usable at which arity is decided by :func:`contraction_rhs`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from posetfix.errors import UsageError

RIGHT_STEP = 1e-3
RIGHT_SAMPLES = 8


@dataclass(frozen=True)
class Comparator:
    kind: str
    k: float | None = None
    weights: tuple | None = None
    fn: Callable | None = field(default=None, compare=True)
    description: str = ""

    def __post_init__(self):
        if self.kind == "linear":
            if self.k is None or not math.isfinite(self.k) or self.k < 0:
                raise UsageError(f"linear comparator needs a finite k >= 0, got {self.k!r}")
        elif self.kind == "linear_weights":
            if self.weights is None or len(self.weights) != 3:
                raise UsageError("linear_weights comparator needs exactly three weights")
            if any(not math.isfinite(w) or w < 0 for w in self.weights):
                raise UsageError(f"weights must be finite and nonnegative, got {self.weights!r}")
        elif self.kind == "custom":
            if not callable(self.fn):
                raise UsageError("custom comparator needs a callable")
        else:
            raise UsageError(f"unknown comparator kind {self.kind!r}")

    def invariant_problems(self) -> list[str]:
        """Coefficient constraints that fail; empty for custom comparators."""
        if self.kind == "linear" and not self.k < 1:
            return [f"k = {self.k} is not < 1"]
        if self.kind == "linear_weights" and not sum(self.weights) < 1:
            return [f"a + b + c = {sum(self.weights)} is not < 1"]
        return []


def linear(k: float, description: str = "") -> Comparator:
    return Comparator("linear", k=k, description=description or f"phi(t) = {k}*t")


def linear_weights(a: float, b: float, c: float, description: str = "") -> Comparator:
    return Comparator(
        "linear_weights",
        weights=(a, b, c),
        description=description or f"a*dx + b*dy + c*dz with (a,b,c) = ({a}, {b}, {c})",
    )


def custom(fn: Callable[[float], float], description: str = "") -> Comparator:
    return Comparator("custom", fn=fn, description=description or getattr(fn, "source", repr(fn)))


def half() -> Comparator:
    return linear(0.5, "half")


def _t_over_1_plus_t(t):
    return t / (1 + t)


BUILTINS = {
    "half": half,
    "t_over_1_plus_t": lambda: custom(_t_over_1_plus_t, "t_over_1_plus_t"),
}


def builtin(name: str) -> Comparator:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UsageError(
            f"unknown built-in comparator {name!r}; choose from {sorted(BUILTINS)}"
        ) from None


def evaluate(c: Comparator, t):
    """phi(t). For linear_weights the scalar form ``(a+b+c)*t`` is used."""
    if t < 0:
        raise UsageError(f"comparator argument must be >= 0, got {t}")
    if c.kind == "linear":
        return c.k * t
    if c.kind == "linear_weights":
        return sum(c.weights) * t
    return c.fn(t)


@dataclass
class PointVerdict:
    t: float
    phi_t: float | None
    below_diagonal: bool
    right_limit_below: bool
    nonnegative: bool
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.below_diagonal and self.right_limit_below and self.nonnegative


@dataclass
class MembershipReport:
    points: list
    right_step: float
    invariant_problems: list = field(default_factory=list)
    phi_at_zero: float | None = None
    #: The right-limit condition is a sampled surrogate, not a proof.
    numerical: bool = True

    @property
    def passed(self) -> bool:
        return not self.invariant_problems and all(p.passed for p in self.points)

    def failures(self) -> list:
        return [p for p in self.points if not p.passed]


def default_grid() -> list[float]:
    # log-spaced 1e-6 .. 1e3
    return [10 ** (e / 4) for e in range(-24, 13)]


def check_phi_membership(c: Comparator, grid: Sequence[float] | None = None,
                         right_step: float = RIGHT_STEP) -> MembershipReport:
    """Sample ``phi(t) < t`` and the right-limit condition on ``grid``.

    The right-limit condition is approximated by requiring the maximum of phi
    over 8 points of ``(t, t + h]`` to stay below ``t``, where
    ``h = right_step * min(1, t)`` so the window shrinks with ``t`` near zero.
    """
    grid = default_grid() if grid is None else list(grid)
    if any(t <= 0 for t in grid):
        raise UsageError("membership grid values must be > 0")
    if right_step <= 0:
        raise UsageError("right_step must be > 0")
    points = []
    for t in grid:
        h = right_step * min(1.0, t)
        try:
            phi_t = evaluate(c, t)
            right = max(evaluate(c, t + h * i / RIGHT_SAMPLES) for i in range(1, RIGHT_SAMPLES + 1))
        except Exception as exc:
            points.append(PointVerdict(t, None, False, False, False, error=repr(exc)))
            continue
        points.append(PointVerdict(t, phi_t, phi_t < t, right < t, phi_t >= 0))
    try:
        phi0 = evaluate(c, 0)
    except Exception:
        phi0 = None
    return MembershipReport(points, right_step, c.invariant_problems(), phi0)


def coupled_rhs(c: Comparator, dx, dy, g_printed: bool = False):
    """``k/2 * (dx + dy)``; with ``g_printed`` the g-coupled form ``k/2 * (dx + dy)/2``."""
    if c.kind != "linear":
        raise UsageError(f"comparator kind {c.kind!r} is not usable at arity 2 (needs linear)")
    s = dx + dy
    if g_printed:
        s = s / 2
    return c.k / 2 * s


def tripled_rhs(c: Comparator, dx, dy, dz):
    """``a*dx + b*dy + c*dz``; ``linear(k)`` spreads ``k`` evenly over the three weights."""
    if c.kind == "linear_weights":
        a, b, w = c.weights
    elif c.kind == "linear":
        a = b = w = c.k / 3
    else:
        raise UsageError(f"comparator kind {c.kind!r} is not usable at arity 3 (needs linear_weights or linear)")
    return a * dx + b * dy + w * dz


def quartet_rhs(c: Comparator, dx, dy, dz, dw):
    """``phi((dx + dy + dz + dw) / 4)``."""
    if c.kind == "linear_weights":
        raise UsageError("comparator kind 'linear_weights' is not usable at arity 4")
    return evaluate(c, (dx + dy + dz + dw) / 4)


def contraction_rhs(c: Comparator, distances: Sequence, g_printed: bool = False):
    """Dispatch on the number of coordinate distances."""
    n = len(distances)
    if n == 2:
        return coupled_rhs(c, *distances, g_printed=g_printed)
    if n == 3:
        return tripled_rhs(c, *distances)
    if n == 4:
        return quartet_rhs(c, *distances)
    raise UsageError(f"no contraction form for arity {n}")


def check_compatible(c: Comparator, arity: int) -> None:
    """Raise UsageError naming kind and arity when they cannot be combined."""
    allowed = {2: ("linear",), 3: ("linear", "linear_weights"), 4: ("linear", "custom")}
    if arity not in allowed:
        raise UsageError(f"arity must be 2, 3 or 4, got {arity}")
    if c.kind not in allowed[arity]:
        raise UsageError(
            f"comparator kind {c.kind!r} is not compatible with arity {arity}"
            f" (allowed: {', '.join(allowed[arity])})"
        )
