"""Fixed and coincidence points of mixed monotone mappings on partially
ordered metric spaces: hypothesis checks, the constructive iteration with
its certificates, and a brute-force oracle for finite carriers."""

from posetfix.comparators import Comparator, check_phi_membership, custom, evaluate, linear, linear_weights
from posetfix.engine import SolveResult, chain_flags, delta, residual, solve, step
from posetfix.errors import EvaluationError, ParseError, RangeInclusionError, UsageError
from posetfix.hypotheses import HypothesisReport, Sampling, check_all
from posetfix.oracle import enumerate_fixed_points, verify_hypotheses_exhaustive
from posetfix.problem import SCHEMES, Problem, RoleScheme, get_scheme
from posetfix.spaces import (
    BoxSpace,
    CustomSpace,
    FiniteSpace,
    IntervalSpace,
    TupleSpace,
    audit_space,
    product_distance,
    tuple_leq,
)

__version__ = "0.1.0"
