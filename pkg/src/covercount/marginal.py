"""Marginal-ratio recursions for monotone CNF.

For a satisfiable monotone CNF C and a free variable x, the marginal ratio
is R = P(x=0) / P(x=1) under the uniform distribution on satisfying
assignments; it always lies in [0, 1].  Branching on the clauses containing
x yields

    R = prod_j ( 1 - prod_i  r_i / (1 + r_i) )

where the inner product ranges over the other variables of the j-th clause
and each r_i is the ratio of a smaller conditioned instance (see
cnf.BranchPlan for the exact conditioning).  Expanding recursively gives a
finite computation tree; truncating it at depth L with guess value 1 gives
a deterministic estimate whose error decays geometrically in L.

Depth is counted in group-width units: descending through a width-w group
costs ceil(log4(w+1)) units, so wide clauses are cut off earlier and the
tree stays within O(16^L) nodes plus O(n) boundary cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cnf import MonotoneCnf, branch_plan
from .constants import CNF_DECAY_BASE, DEFAULT_NODE_BUDGET, DEPTH_LOG_BASE
from .errors import NodeBudgetExceededError

#: Estimate returned for a truncated leaf.  Fixed, not configurable: any
#: value in [0,1] admits the same decay bound, and test vectors depend on it.
TRUNCATION_GUESS = 1.0


@dataclass(frozen=True)
class TruncationPolicy:
    """Parameters governing truncated evaluation.

    alpha is the decay base used by certified-depth formulas; it does not
    enter the recursion itself.  m_base is the logarithm base of the
    group-width depth charge and must stay 4 (the decay analysis and the
    alpha constants are tied to it).
    """

    alpha: float = CNF_DECAY_BASE
    m_base: int = DEPTH_LOG_BASE
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.m_base != DEPTH_LOG_BASE:
            raise ValueError("m_base is fixed at 4; the decay constants depend on it")
        if self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


@dataclass(frozen=True)
class MarginalRatio:
    """A marginal-ratio estimate plus evaluation metadata."""

    value: float
    depth_used: int
    nodes_visited: int
    clamped: bool  # True if some branch was cut off at depth 0


def depth_decrement(w: int) -> int:
    """Depth units charged for descending through a width-w group.

    Equals ceil(log4(w+1)), computed in integer arithmetic.
    """
    if w < 1:
        raise ValueError("group width must be >= 1")
    k, reach = 0, 1
    while reach < w + 1:
        reach *= DEPTH_LOG_BASE
        k += 1
    return k


@dataclass
class _EvalState:
    budget: int
    nodes: int = 0
    clamped: bool = False

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise NodeBudgetExceededError(self.budget)


def _truncated(cnf: MonotoneCnf, x: int, depth: int, state: _EvalState) -> float:
    state.tick()
    idx = cnf.occ[x]
    d = len(idx)
    if any(len(cnf.clauses[i]) == 1 for i in idx):
        return 0.0  # a singleton clause forces x=1
    if d == 0:
        return 1.0
    if depth == 0:
        state.clamped = True
        return TRUNCATION_GUESS
    plan = branch_plan(cnf, x)
    result = 1.0
    for j in range(d):
        w = len(plan.others[j])
        child_depth = depth - depth_decrement(w)
        if child_depth <= 0:
            # Children would all be depth-0 guesses of 1, i.e. probability
            # 1/2 each; take the product directly without building them.
            state.clamped = True
            inner = 2.0 ** (-w)
        else:
            inner = 1.0
            for var, child in plan.children(j):
                r = _truncated(child, var, child_depth, state)
                if r == 0.0:
                    inner = 0.0
                    break  # later siblings may be unsatisfiable; product is 0 anyway
                inner *= r / (1.0 + r)
        result *= 1.0 - inner
    return result


def marginal_truncated(
    cnf: MonotoneCnf,
    x: int,
    depth: int,
    policy: TruncationPolicy | None = None,
) -> MarginalRatio:
    """Depth-L truncated estimate of the marginal ratio of x in cnf.

    Requires x free and cnf free of empty clauses.  The result is always in
    [0, 1].  Siblings inside a group are evaluated in ascending-id order and
    the chain stops at the first exact 0, so unsatisfiable sub-instances are
    never queried.  Groups whose children would all be depth-0 leaves are
    folded to 2^-w directly.
    """
    if not cnf.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    policy = policy or TruncationPolicy()
    state = _EvalState(budget=policy.node_budget)
    value = _truncated(cnf, x, depth, state)
    return MarginalRatio(value, depth, state.nodes, state.clamped)


def _exact(
    cnf: MonotoneCnf,
    x: int,
    state: _EvalState,
    memo: dict,
) -> Fraction:
    key = (cnf.clauses, x)
    hit = memo.get(key)
    if hit is not None:
        return hit
    state.tick()
    idx = cnf.occ[x]
    d = len(idx)
    if any(len(cnf.clauses[i]) == 1 for i in idx):
        return Fraction(0)
    if d == 0:
        return Fraction(1)
    plan = branch_plan(cnf, x)
    result = Fraction(1)
    for j in range(d):
        inner = Fraction(1)
        for var, child in plan.children(j):
            r = _exact(child, var, state, memo)
            if r == 0:
                inner = Fraction(0)
                break
            inner *= r / (1 + r)
        result *= 1 - inner
    memo[key] = result
    return result


def marginal_exact_recursive(
    cnf: MonotoneCnf,
    x: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    memo: dict | None = None,
) -> Fraction:
    """The untruncated recursion in exact rational arithmetic.

    Terminates because every branch strictly reduces the total number of
    literal occurrences.  Identical sub-instances are cached; the cache is
    sound because the value is a pure function of the clause list and the
    query variable, so a dict may be shared across queries of one root
    instance to avoid re-deriving common sub-trees.
    """
    if not cnf.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    state = _EvalState(budget=node_budget)
    return _exact(cnf, x, state, {} if memo is None else memo)


def _curve(
    cnf: MonotoneCnf,
    x: int,
    max_depth: int,
    state: _EvalState,
    memo: dict,
) -> tuple[float, ...]:
    key = (cnf.clauses, x)
    hit = memo.get(key)
    if hit is not None:
        return hit
    state.tick()
    idx = cnf.occ[x]
    d = len(idx)
    if any(len(cnf.clauses[i]) == 1 for i in idx):
        res = (0.0,) * (max_depth + 1)
        memo[key] = res
        return res
    if d == 0:
        res = (1.0,) * (max_depth + 1)
        memo[key] = res
        return res
    values = [1.0] * (max_depth + 1)  # index 0 is the depth-0 guess
    plan = branch_plan(cnf, x)
    for j in range(d):
        w = len(plan.others[j])
        dec = depth_decrement(w)
        # Child probability vectors, in sibling order, stopping at the
        # first zero child exactly like the single-depth evaluation.
        child_ps: list[tuple[float, ...]] = []
        saw_zero = False
        if max_depth > dec:
            for var, child in plan.children(j):
                cv = _curve(child, var, max_depth, state, memo)
                if cv[0] == 0.0:  # zero at every depth (forced variable)
                    saw_zero = True
                    break
                child_ps.append(tuple(r / (1.0 + r) for r in cv))
        shallow = 2.0 ** (-w)
        for depth in range(1, max_depth + 1):
            if depth <= dec:
                inner = shallow
            elif saw_zero:
                inner = 0.0
            else:
                inner = 1.0
                for ps in child_ps:
                    inner *= ps[depth - dec]
            values[depth] *= 1.0 - inner
    res = tuple(values)
    memo[key] = res
    return res


def marginal_truncated_curve(
    cnf: MonotoneCnf,
    x: int,
    max_depth: int,
    policy: TruncationPolicy | None = None,
) -> list[float]:
    """marginal_truncated(..., L).value for every L in 0..max_depth at once.

    One walk over the full natural tree computes all depths, reusing
    identical sub-instances; each entry is bit-identical to the
    corresponding single-depth evaluation (same operations in the same
    order), which the test suite checks explicitly.
    """
    if not cnf.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    policy = policy or TruncationPolicy()
    state = _EvalState(budget=policy.node_budget)
    return list(_curve(cnf, x, max_depth, state, {}))
