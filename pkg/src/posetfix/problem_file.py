"""Problem files: strict JSON documents describing one problem.

Example::

    {
      "arity": 4,
      "space": {"flavor": "interval", "lo": 0, "hi": 1, "grid": 21},
      "F": "(x - y + z - w)/8 + 1/2",
      "comparator": "half",
      "seed": [0.25, 0.75, 0.25, 0.75]
    }

Unknown keys are rejected. :func:`normalize` fills in every default and
re-parses to an equal problem.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from posetfix import comparators
from posetfix.errors import ParseError, UsageError
from posetfix.expr import Expression
from posetfix.hypotheses import Sampling
from posetfix.problem import Componentwise, Problem, Table
from posetfix.spaces import BoxSpace, FiniteSpace, IntervalSpace, _freeze
from posetfix import jsonfmt

VARIABLES = {2: ("x", "y"), 3: ("x", "y", "z"), 4: ("x", "y", "z", "w")}

TOP_KEYS = {
    "arity", "space", "F", "g", "comparator", "scheme", "seed", "tolerances",
    "max_iter", "assumption_mode", "contraction_distances", "g_coupled_form", "sampling",
}
DEFAULT_TOLERANCES = {"residual": 1e-8, "delta": 1e-10}
DEFAULT_MAX_ITER = 1000


@dataclass
class ProblemFile:
    problem: Problem
    document: dict
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    max_iter: int = DEFAULT_MAX_ITER
    sampling: Sampling = Sampling()


def _keys(obj, path, allowed, required=()):
    if not isinstance(obj, dict):
        raise ParseError(f"expected an object, got {type(obj).__name__}", path)
    for k in obj:
        if k not in allowed:
            raise ParseError(f"unknown key {k!r} (allowed: {', '.join(sorted(allowed))})", f"{path}.{k}")
    for k in required:
        if k not in obj:
            raise ParseError(f"missing required key {k!r}", path)


def _number(v, path, allow_none=False):
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", path)
    return v


def _rational(v, path):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational number: {v!r}", path) from None
    return Fraction(_number(v, path)) if isinstance(v, int) else _number(v, path)


def _int(v, path, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer, got {v!r}", path)
    if lo is not None and v < lo:
        raise ParseError(f"must be >= {lo}", path)
    return v


def _expression(src, variables, exact, path):
    try:
        return Expression(src, variables, exact=exact)
    except ParseError as exc:
        raise ParseError(str(exc), path) from None


def _parse_space(obj, path="$.space"):
    if not isinstance(obj, dict) or "flavor" not in obj:
        raise ParseError("space needs a 'flavor'", path)
    flavor = obj["flavor"]
    try:
        if flavor == "interval":
            _keys(obj, path, {"flavor", "lo", "hi", "grid", "sample_lo", "sample_hi"})
            lo = _number(obj.get("lo", 0.0), f"{path}.lo", allow_none=True)
            hi = _number(obj.get("hi", 1.0), f"{path}.hi", allow_none=True)
            return IntervalSpace(
                -math.inf if lo is None else float(lo),
                math.inf if hi is None else float(hi),
                resolution=_int(obj.get("grid", 21), f"{path}.grid", 1),
                sample_lo=_number(obj.get("sample_lo"), f"{path}.sample_lo", allow_none=True),
                sample_hi=_number(obj.get("sample_hi"), f"{path}.sample_hi", allow_none=True),
            )
        if flavor == "box":
            _keys(obj, path, {"flavor", "lows", "highs", "grid", "norm"}, ("lows", "highs"))
            lows = [_number(v, f"{path}.lows[{i}]") for i, v in enumerate(obj["lows"])]
            highs = [_number(v, f"{path}.highs[{i}]") for i, v in enumerate(obj["highs"])]
            return BoxSpace(
                tuple(lows), tuple(highs),
                resolution=_int(obj.get("grid", 5), f"{path}.grid", 1),
                norm=obj.get("norm", "max"),
            )
        if flavor == "finite":
            _keys(obj, path, {"flavor", "elements", "distance", "order"}, ("elements",))
            elements = obj["elements"]
            if not isinstance(elements, list):
                raise ParseError("elements must be a list", f"{path}.elements")
            n = len(elements)
            dist = obj.get("distance", "discrete")
            if dist == "discrete":
                dist = [[0 if i == j else 1 for j in range(n)] for i in range(n)]
            elif isinstance(dist, list):
                dist = [
                    [_rational(v, f"{path}.distance[{i}][{j}]") for j, v in enumerate(row)]
                    for i, row in enumerate(dist)
                ]
            else:
                raise ParseError("distance must be 'discrete' or an n x n table", f"{path}.distance")
            order = obj.get("order", "chain")
            if order == "chain":
                order = [[i <= j for j in range(n)] for i in range(n)]
            elif order == "discrete":
                order = [[i == j for j in range(n)] for i in range(n)]
            elif not isinstance(order, list):
                raise ParseError("order must be 'chain', 'discrete' or an n x n table", f"{path}.order")
            for i, row in enumerate(order):
                for j, v in enumerate(row):
                    if not isinstance(v, bool):
                        raise ParseError(f"order entries must be booleans, got {v!r}", f"{path}.order[{i}][{j}]")
            return FiniteSpace(tuple(elements), dist, order)
    except ParseError:
        raise
    except UsageError as exc:
        raise ParseError(str(exc), path) from None
    raise ParseError(f"unknown space flavor {flavor!r} (choose interval, box, finite)", f"{path}.flavor")


def _mapping(obj, space, variables, path, allow_inverse=False):
    """Returns (callable, inverse callable or None)."""
    exact = space.finite

    def wrap(fn):
        return Componentwise(fn) if space.flavor == "box" else fn

    if isinstance(obj, str):
        return wrap(_expression(obj, variables, exact, path)), None
    if not isinstance(obj, dict):
        raise ParseError("mapping must be an expression string or an object", path)
    keys = {"expr", "builtin", "value", "index", "table"} | ({"inverse"} if allow_inverse else set())
    _keys(obj, path, keys)
    inverse = None
    if "inverse" in obj:
        inverse = wrap(_expression(obj["inverse"], ("x",), exact, f"{path}.inverse"))
    kinds = [k for k in ("expr", "builtin", "table") if k in obj]
    if len(kinds) != 1:
        raise ParseError("mapping needs exactly one of 'expr', 'builtin', 'table'", path)
    kind = kinds[0]
    if kind == "expr":
        return wrap(_expression(obj["expr"], variables, exact, f"{path}.expr")), inverse
    if kind == "builtin":
        name = obj["builtin"]
        if name == "constant":
            if "value" not in obj:
                raise ParseError("constant mapping needs 'value'", path)
            value = _freeze(obj["value"])
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                return wrap(_expression(repr(value), variables, exact, f"{path}.value")), inverse
            return _Constant(value), inverse
        if name == "projection":
            idx = _int(obj.get("index"), f"{path}.index", 1)
            if idx > len(variables):
                raise ParseError(f"projection index {idx} exceeds arity {len(variables)}", f"{path}.index")
            return wrap(_expression(variables[idx - 1], variables, exact, path)), inverse
        if name == "identity" and variables == ("x",):
            return None, None
        raise ParseError(f"unknown built-in mapping {name!r}", f"{path}.builtin")
    # table
    if not space.finite:
        raise ParseError("lookup tables need a finite space", f"{path}.table")
    entries = {}
    rows = obj["table"]
    if not isinstance(rows, list):
        raise ParseError("table must be a list of [arguments, value] rows", f"{path}.table")
    arity = len(variables)
    for i, row in enumerate(rows):
        rp = f"{path}.table[{i}]"
        if not isinstance(row, list) or len(row) != 2:
            raise ParseError("table row must be [arguments, value]", rp)
        args = row[0] if arity > 1 else [row[0]]
        if not isinstance(args, list) or len(args) != arity:
            raise ParseError(f"table row needs {arity} arguments", rp)
        key = tuple(_freeze(a) for a in args)
        for a in key + (_freeze(row[1]),):
            if not space.contains(a):
                raise ParseError(f"{a!r} is not a carrier element", rp)
        entries[key if arity > 1 else key[0:1]] = _freeze(row[1])
    expected = set(itertools.product(space.elements, repeat=arity))
    missing = expected - set(entries)
    if missing:
        raise ParseError(f"table is not total; missing {sorted(missing, key=repr)[0]!r}", f"{path}.table")
    return Table(entries), inverse


class _Constant:
    """Constant mapping onto an arbitrary (possibly non-numeric) element."""

    def __init__(self, value):
        self.value = value

    def __call__(self, *args):
        return self.value

    def __eq__(self, other):
        return isinstance(other, _Constant) and self.value == other.value

    def __hash__(self):
        return hash(("constant", self.value))


def _parse_comparator(obj, path="$.comparator"):
    try:
        if isinstance(obj, str):
            return comparators.builtin(obj)
        _keys(obj, path, {"kind", "k", "a", "b", "c", "expr", "builtin"})
        if "builtin" in obj:
            return comparators.builtin(obj["builtin"])
        kind = obj.get("kind")
        if kind == "linear":
            return comparators.linear(_number(obj.get("k"), f"{path}.k"))
        if kind == "linear_weights":
            return comparators.linear_weights(
                *(_number(obj.get(k), f"{path}.{k}") for k in ("a", "b", "c"))
            )
        if kind == "custom":
            fn = _expression(obj.get("expr"), ("t",), False, f"{path}.expr")
            return comparators.custom(fn, obj["expr"])
    except ParseError:
        raise
    except UsageError as exc:
        raise ParseError(str(exc), path) from None
    raise ParseError(f"unknown comparator kind {obj.get('kind')!r}", f"{path}.kind")


def parse_document(doc: dict) -> ProblemFile:
    _keys(doc, "$", TOP_KEYS, ("arity", "space", "F", "comparator"))
    arity = _int(doc["arity"], "$.arity")
    if arity not in VARIABLES:
        raise ParseError("arity must be 2, 3 or 4", "$.arity")
    space = _parse_space(doc["space"])
    F, _ = _mapping(doc["F"], space, VARIABLES[arity], "$.F")
    g, g_inv = (None, None)
    if doc.get("g") is not None:
        g, g_inv = _mapping(doc["g"], space, ("x",), "$.g", allow_inverse=True)
    comparator = _parse_comparator(doc["comparator"])

    tol = dict(DEFAULT_TOLERANCES)
    eps_check = None
    if "tolerances" in doc:
        _keys(doc["tolerances"], "$.tolerances", {"residual", "delta", "check"})
        for k, v in doc["tolerances"].items():
            _number(v, f"$.tolerances.{k}")
        eps_check = doc["tolerances"].get("check")
        tol.update({k: v for k, v in doc["tolerances"].items() if k != "check"})
    max_iter = _int(doc.get("max_iter", DEFAULT_MAX_ITER), "$.max_iter", 0)
    sampling = Sampling()
    if "sampling" in doc:
        allowed = {"max_tuples", "max_pairs", "max_bases", "seed", "continuity_factor"}
        _keys(doc["sampling"], "$.sampling", allowed)
        kw = {}
        for k, v in doc["sampling"].items():
            if k == "continuity_factor":
                kw[k] = _number(v, f"$.sampling.{k}")
            else:
                kw[k] = _int(v, f"$.sampling.{k}", 0)
        sampling = Sampling(**kw)
    seed = doc.get("seed")
    if seed is not None:
        if not isinstance(seed, list) or len(seed) != arity:
            raise ParseError(f"seed must be a list of {arity} elements", "$.seed")
        seed = tuple(_freeze(e) for e in seed)
        for i, e in enumerate(seed):
            if not space.contains(e):
                raise ParseError(f"{e!r} is not a carrier element", f"$.seed[{i}]")
    try:
        problem = Problem(
            space=space,
            arity=arity,
            F=F,
            comparator=comparator,
            g=g,
            g_inverse=g_inv,
            scheme=doc.get("scheme"),
            assumption_mode=doc.get("assumption_mode", "continuity"),
            contraction_distances=doc.get("contraction_distances"),
            g_coupled_form=doc.get("g_coupled_form", "printed"),
            eps_check=eps_check,
            seed=seed,
        )
    except UsageError as exc:
        raise ParseError(str(exc), "$") from None
    return ProblemFile(problem, doc, tol, max_iter, sampling)


def loads(text: str) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return parse_document(doc)


def load(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def normalized_document(pf: ProblemFile) -> dict:
    """The source document with every default made explicit."""
    doc = json.loads(json.dumps(pf.document))
    p = pf.problem
    sp = doc["space"]
    if sp["flavor"] == "interval":
        sp.setdefault("lo", 0.0)
        sp.setdefault("hi", 1.0)
        sp.setdefault("grid", 21)
    elif sp["flavor"] == "box":
        sp.setdefault("grid", 5)
        sp.setdefault("norm", "max")
    else:
        sp.setdefault("distance", "discrete")
        sp.setdefault("order", "chain")
    doc.setdefault("g", None)
    doc["scheme"] = p.scheme.name
    doc["assumption_mode"] = p.assumption_mode
    doc["contraction_distances"] = p.contraction_distances
    doc["g_coupled_form"] = p.g_coupled_form
    tol = dict(pf.tolerances)
    tol["check"] = p.eps_check
    doc["tolerances"] = tol
    doc["max_iter"] = pf.max_iter
    s = pf.sampling
    doc["sampling"] = {
        "max_tuples": s.max_tuples,
        "max_pairs": s.max_pairs,
        "max_bases": s.max_bases,
        "seed": s.seed,
        "continuity_factor": s.continuity_factor,
    }
    doc.setdefault("seed", None)
    order = ["arity", "space", "F", "g", "comparator", "scheme", "seed", "tolerances",
             "max_iter", "assumption_mode", "contraction_distances", "g_coupled_form", "sampling"]
    return {k: doc[k] for k in order}


def normalize(pf: ProblemFile) -> str:
    return jsonfmt.dumps(normalized_document(pf))
