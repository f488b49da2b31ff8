"""A tiny arithmetic-expression language for mappings and comparators.

Allowed: numeric literals, the declared variables, ``+ - * /``, unary minus
and parentheses. Expressions are validated against a whitelist of syntax
nodes and compiled to ordinary Python functions, so evaluation is fast.

    >>> f = Expression("(x - y) / 4 + 1/4", ("x", "y"))
    >>> f(0.25, 0.25)
    0.25
"""

from __future__ import annotations

import ast
from fractions import Fraction

from posetfix.errors import ParseError

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div)
_UNARY = (ast.UAdd, ast.USub)


class _Exactify(ast.NodeTransformer):
    """Replace numeric literals by named Fraction constants."""

    def __init__(self):
        self.constants = {}

    def visit_Constant(self, node):
        name = f"_c{len(self.constants)}"
        self.constants[name] = Fraction(str(node.value))
        return ast.copy_location(ast.Name(id=name, ctx=ast.Load()), node)


def _validate(tree: ast.AST, variables, source: str):
    for node in ast.walk(tree):
        col = getattr(node, "col_offset", None)
        where = f"column {col + 1}" if col is not None else None
        if isinstance(node, (ast.Expression, ast.Load)) or isinstance(node, _BINOPS + _UNARY):
            continue
        if isinstance(node, ast.BinOp):
            if not isinstance(node.op, _BINOPS):
                raise ParseError(f"operator not allowed in {source!r}", where)
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, _UNARY):
                raise ParseError(f"operator not allowed in {source!r}", where)
        elif isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ParseError(f"only numeric constants allowed in {source!r}", where)
        elif isinstance(node, ast.Name):
            if node.id not in variables:
                raise ParseError(
                    f"unknown variable {node.id!r} in {source!r} (allowed: {', '.join(variables)})",
                    where,
                )
        else:
            raise ParseError(f"unsupported syntax {type(node).__name__} in {source!r}", where)


class Expression:
    """A compiled arithmetic expression with value semantics.

    With ``exact=True`` literals become :class:`fractions.Fraction`, so
    expressions over integer or rational carriers evaluate without round-off.
    """

    def __init__(self, source: str, variables=("x", "y", "z", "w"), exact: bool = False):
        if not isinstance(source, str):
            raise ParseError(f"expression must be a string, got {type(source).__name__}")
        self.source = source
        self.variables = tuple(variables)
        self.exact = exact
        try:
            tree = ast.parse(source.strip(), mode="eval")
        except SyntaxError as exc:
            where = f"column {exc.offset}" if exc.offset else None
            raise ParseError(f"invalid expression {source!r}: {exc.msg}", where) from None
        _validate(tree, self.variables, source)
        env = {"__builtins__": {}}
        body = tree.body
        if exact:
            tx = _Exactify()
            body = tx.visit(body)
            env.update(tx.constants)
        args = ast.arguments(
            posonlyargs=[],
            args=[ast.arg(arg=v) for v in self.variables],
            kwonlyargs=[],
            kw_defaults=[],
            defaults=[],
        )
        lam = ast.Expression(body=ast.Lambda(args=args, body=body))
        ast.fix_missing_locations(lam)
        self._fn = eval(compile(lam, "<expression>", "eval"), env)

    def __call__(self, *args):
        if self.exact:
            # int / int would otherwise produce a float
            args = tuple(Fraction(a) if type(a) is int else a for a in args)
        return self._fn(*args)

    def __eq__(self, other):
        if not isinstance(other, Expression):
            return NotImplemented
        return (self.source, self.variables, self.exact) == (other.source, other.variables, other.exact)

    def __hash__(self):
        return hash((self.source, self.variables, self.exact))

    def __repr__(self):
        return f"Expression({self.source!r}, {self.variables!r})"
