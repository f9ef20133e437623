"""Certified, limit-free calculus checks over exact rational arithmetic.

The package verifies or refutes difference-quotient control claims,
Lipschitz-strength slope conditions, and definite-integral enclosures
for single-variable elementary-function expressions.  Every verdict
rests on exact rational comparisons or outward-rounded interval
enclosures; no floating point touches a certified path.
"""

from .control import (
    BracketWitness,
    ControlClaim,
    ControlFact,
    DisjointDomains,
    PremiseNotCertified,
    ShapeProperty,
    ShapeReport,
    Status,
    Verdict,
    Violation,
    approximate_with_error,
    check_bracket,
    cubic_claim,
    cubic_control_certificate,
    difference_quotient,
    falsify_control,
    glue_claims,
    infer_shape,
)
from .expr import (
    EvalDomainError,
    Expr,
    FunctionSpec,
    ParseError,
    eval_enclosure,
    eval_exact,
    format_expr,
    parse,
    symbolic_derivative,
    to_json,
)
from .integral import (
    IntegralEnclosure,
    PiecewisePlan,
    check_additivity,
    integrate_enclosure,
    integrate_piecewise,
    newton_leibniz_check,
    uniqueness_gap,
)
from .lipschitz import (
    HypothesisViolated,
    LinqunCounterexample,
    LinqunReport,
    LipschitzCert,
    NotLipschitz,
    SearchInconclusive,
    check_linqun,
    control_is_2M_lipschitz,
    derivative_uniqueness,
    find_bracket_by_subdivision,
    lipschitz_bound,
)
from .numeric import (
    DivisionByZero,
    DivisionByZeroInterval,
    DomainError,
    Interval,
    Precision,
    Rational,
    interval_arith,
    pi_enclosure,
    rat_arith,
    sincos_enclosure,
    sqrt_enclosure,
)

__version__ = "0.1.0"
