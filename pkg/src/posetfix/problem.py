"""Problem definitions and role schemes.

A role scheme lists, for every output coordinate, which argument permutation
of the current tuple F is evaluated at. The quartet definitions of fixed and
coincidence points use two different permutations, so both are available.
"""

from __future__ import annotations

from functools import cached_property
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from posetfix import comparators
from posetfix.comparators import Comparator
from posetfix.errors import EvaluationError, UsageError
from posetfix.spaces import Space, TupleSpace


@dataclass(frozen=True)
class RoleScheme:
    name: str
    arity: int
    perms: tuple

    def __post_init__(self):
        if len(self.perms) != self.arity:
            raise UsageError(f"scheme {self.name!r} needs {self.arity} permutations")
        for p in self.perms:
            if len(p) != self.arity or any(not 0 <= i < self.arity for i in p):
                raise UsageError(f"scheme {self.name!r}: bad permutation {p!r}")

    def arguments(self, current: Sequence, i: int) -> tuple:
        return tuple(current[j] for j in self.perms[i])


# Index 0..3 stands for x, y, z, w.
SCHEMES = {
    "coupled": RoleScheme("coupled", 2, ((0, 1), (1, 0))),
    "tripled": RoleScheme("tripled", 3, ((0, 1, 2), (1, 0, 1), (2, 1, 0))),
    "alternating": RoleScheme(
        "alternating", 4, ((0, 1, 2, 3), (0, 3, 2, 1), (2, 1, 0, 3), (2, 3, 0, 1))
    ),
    "cyclic": RoleScheme("cyclic", 4, ((0, 1, 2, 3), (1, 2, 3, 0), (2, 3, 0, 1), (3, 0, 1, 2))),
}
DEFAULT_SCHEME = {2: "coupled", 3: "tripled", 4: "alternating"}


def get_scheme(name: str | None, arity: int) -> RoleScheme:
    if name is None:
        name = DEFAULT_SCHEME.get(arity)
    try:
        scheme = SCHEMES[name]
    except KeyError:
        raise UsageError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None
    if scheme.arity != arity:
        raise UsageError(f"scheme {name!r} has arity {scheme.arity}, problem has arity {arity}")
    return scheme


class Componentwise:
    """Lift a scalar mapping to box elements by applying it per axis."""

    def __init__(self, fn: Callable):
        self.fn = fn

    def __call__(self, *args):
        return tuple(self.fn(*parts) for parts in zip(*args))

    def __eq__(self, other):
        return isinstance(other, Componentwise) and self.fn == other.fn

    def __hash__(self):
        return hash(("componentwise", self.fn))


class Table:
    """A finite lookup-table mapping keyed by argument tuples."""

    def __init__(self, entries: dict):
        self.entries = dict(entries)

    def __call__(self, *args):
        try:
            return self.entries[args]
        except KeyError:
            raise EvaluationError(f"lookup table has no entry for {args!r}") from None

    def __eq__(self, other):
        return isinstance(other, Table) and self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))


@dataclass(frozen=True)
class Problem:
    """Everything the hypothesis checks and the iteration need.

    ``g`` is ``None`` for the identity. ``g_inverse`` is a section of ``g``
    (a right inverse on its image); on finite carriers preimages can also be
    found by enumeration. ``contraction_distances`` selects whether the
    contraction inequality measures raw coordinate distances or distances of
    g-images; by default it is ``"g_images"`` only for the g-coupled form at
    arity 2.
    """

    space: Space
    arity: int
    F: Callable
    comparator: Comparator
    g: Callable | None = None
    g_inverse: Callable | None = None
    scheme: RoleScheme | None = None
    assumption_mode: str = "continuity"
    contraction_distances: str | None = None
    g_coupled_form: str = "printed"
    eps_check: float | None = None
    seed: tuple | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.arity not in (2, 3, 4):
            raise UsageError(f"arity must be 2, 3 or 4, got {self.arity}")
        comparators.check_compatible(self.comparator, self.arity)
        scheme = self.scheme
        if scheme is None or isinstance(scheme, str):
            scheme = get_scheme(scheme, self.arity)
        elif scheme.arity != self.arity:
            raise UsageError(f"scheme {scheme.name!r} has arity {scheme.arity}, problem has arity {self.arity}")
        object.__setattr__(self, "scheme", scheme)
        if self.assumption_mode not in ("continuity", "order_limits"):
            raise UsageError(f"assumption_mode must be 'continuity' or 'order_limits', got {self.assumption_mode!r}")
        mode = self.contraction_distances
        if mode is None:
            mode = "g_images" if (self.arity == 2 and self.g is not None) else "raw"
            object.__setattr__(self, "contraction_distances", mode)
        if mode not in ("raw", "g_images"):
            raise UsageError(f"contraction_distances must be 'raw' or 'g_images', got {mode!r}")
        if self.g_coupled_form not in ("printed", "plain"):
            raise UsageError(f"g_coupled_form must be 'printed' or 'plain', got {self.g_coupled_form!r}")
        if self.eps_check is None:
            object.__setattr__(self, "eps_check", 0 if self.space.exact else 1e-9)
        if self.seed is not None:
            seed = tuple(self.seed)
            if len(seed) != self.arity:
                raise UsageError(f"seed has length {len(seed)}, arity is {self.arity}")
            object.__setattr__(self, "seed", seed)

    @cached_property
    def tuple_space(self) -> TupleSpace:
        return TupleSpace(self.space, self.arity)

    @property
    def pattern(self) -> tuple:
        return self.tuple_space.pattern

    @property
    def has_g(self) -> bool:
        return self.g is not None

    def apply_g(self, e):
        if self.g is None:
            return e
        return self.space.canonical(self.g(e))

    def g_images(self, t: Sequence) -> tuple:
        if self.g is None:
            return tuple(t)
        return tuple(self.apply_g(e) for e in t)

    def apply_F(self, args: Sequence):
        """F at ``args``, coerced to a carrier element."""
        try:
            v = self.F(*args)
        except EvaluationError:
            raise
        except Exception as exc:
            raise EvaluationError(f"F{tuple(args)!r} raised {exc!r}") from exc
        return self.space.canonical(v)

    def rhs(self, distances: Sequence):
        g_printed = self.arity == 2 and self.g is not None and self.g_coupled_form == "printed"
        return comparators.contraction_rhs(self.comparator, distances, g_printed=g_printed)

    def contraction_distance_vector(self, a: Sequence, b: Sequence) -> tuple:
        d = self.space.distance
        if self.contraction_distances == "g_images":
            return tuple(d(self.apply_g(p), self.apply_g(q)) for p, q in zip(a, b))
        return tuple(d(p, q) for p, q in zip(a, b))

    def with_(self, **changes) -> "Problem":
        return replace(self, **changes)

