"""Deterministic approximate counting for monotone CNF and hypergraph matchings.

Two dual engines built on truncated marginal-ratio recursions with proven
geometric error decay: satisfying assignments of read-5 monotone CNF
(equivalently set covers with sets of at most 5 elements) and matchings of
hypergraphs with edge size <= 3 and maximum degree <= 4 (3D matchings
included).  An exhaustive-enumeration oracle and a numerical verifier for
the decay-rate bounds back the estimators.
"""

from .amo import (
    AmoInstance,
    Hypergraph,
    certified_depth_amo,
    count_matchings,
    count_matchings_exact,
    from_hypergraph,
    marginal_exact_amo,
    marginal_truncated_amo,
    normalize,
)
from .cnf import BranchPlan, MonotoneCnf, branch_plan, pin_one, pin_zero, wellform
from .counter import (
    CountMode,
    Estimate,
    adaptive,
    certified,
    certified_depth,
    count_cnf,
    count_cnf_exact,
    heuristic,
)
from .decay import (
    BoundReport,
    KappaSpec,
    empirical_decay_curve,
    eval_kappa,
    grid_max,
    verify_all_bounds,
)
from .errors import (
    BoundViolatedError,
    CoverCountError,
    DegreeExceededError,
    DivisionUndefinedError,
    EdgeSizeExceededError,
    EmptyClauseSignal,
    FormatError,
    GenerationFailedError,
    NegativeLiteralError,
    NodeBudgetExceededError,
    TooLargeForOracleError,
    UnsatisfiableError,
)
from .marginal import (
    MarginalRatio,
    TruncationPolicy,
    depth_decrement,
    marginal_exact_recursive,
    marginal_truncated,
    marginal_truncated_curve,
)
from .oracle import (
    exact_count,
    exact_count_semantic,
    exact_marginal,
    exact_marginals,
    count_hypergraph_matchings_brute,
    gen_random_deg4_hypergraph,
    gen_random_read5_cnf,
)

__version__ = "0.1.0"
