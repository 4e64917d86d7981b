"""Exact computation with parameterized linear differential equations.

The symbolic layer works over Q(t1,...,tm)(x) with commuting derivations:
rational function arithmetic and partial fractions, an Ore operator ring
for one parametric derivation, descriptors for differential algebraic
subgroups of the additive and multiplicative line, rank-1 parameterized
Picard-Vessiot group computation, integrability checking with a rational
completion search, and a partial trichotomy for traceless 2x2 systems.
A numeric monodromy scanner cross-checks isomonodromy verdicts in floating
point.
"""

from .classify2x2 import TrichotomyVerdict, classify_2x2, interpret_verdict
from .fieldcore import (
    FieldContext,
    FieldError,
    PartialFractionForm,
    PoleTerm,
    Rat,
    UnknownVariableError,
    UnsupportedDenominatorError,
    arith,
    derive,
    hermite_reduce_x,
    partial_fractions_x,
)
from .groups import (
    AlgebraicGroupTag,
    GaSubgroup,
    GmSubgroup,
    ga_contains,
    gm_contains,
    gm_del_subgroup_table,
    log_derivative,
    render_group,
    zariski_closure,
)
from .monodromy import (
    CrossCheckReport,
    EvalError,
    LoopSpec,
    MonodromyReport,
    PathTooCloseError,
    SystemEvaluator,
    cross_check,
    integrate_transfer,
    monodromy_scan,
)
from .ore import (
    OreError,
    OreOperator,
    annihilator_of_span,
    gcrd,
    gcrd_lclm,
    lclm,
    ore_mul,
    right_divide,
    right_divides,
)
from .parser import ParseError, SystemFormatError, SystemSpec, parse_expr, parse_system
from .rank1 import (
    Rank1Answer,
    additive_group,
    classical_pv_group,
    multiplicative_group,
)
from .systems import (
    AnsatzBounds,
    IntegrabilityReport,
    ParamLinearSystem,
    check_integrability,
    isomonodromy_verdict,
    solve_complete_integrability,
)

__version__ = "0.1.0"
