"""Self-reducible counting for read-5 monotone CNF.

The count telescopes over any variable order: pinning variables to 1 one at
a time (all-ones satisfies a monotone CNF),

    Z(C) = prod_i ( 1 + R(C_i, x_i) ),   C_1 = C,  C_{i+1} = C_i with x_i := 1.

Plugging truncated marginal ratios into the product gives the estimator.
Three depth-selection modes are supported:

* certified(eps): the depth that provably yields relative error <= eps.
  The bound is honest but astronomical in practice (the provable runtime
  exponent is ~144), so this mode usually stops on the node budget.
* heuristic(L): a fixed depth, no guarantee.
* adaptive(eps): doubles the depth until two consecutive doublings change
  the estimate by a relative factor below eps/4.  This is the practical
  default; its accuracy is empirical, not certified.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .cnf import FREE, MonotoneCnf, pin_one
from .constants import CNF_CERTIFIED_COEFF, CNF_DECAY_BASE
from .errors import NodeBudgetExceededError, UnsatisfiableError
from .marginal import TruncationPolicy, marginal_exact_recursive, marginal_truncated

ADAPTIVE_MAX_DEPTH = 1 << 20
EXACT_RENDER_LIMIT = 40  # render an integer only while exp(log_count) is exact enough


@dataclass(frozen=True)
class CountMode:
    kind: str  # "certified" | "heuristic" | "adaptive"
    epsilon: float | None = None
    depth: int | None = None

    def describe(self) -> str:
        if self.kind == "certified":
            return f"certified relative error <= {self.epsilon}"
        if self.kind == "heuristic":
            return f"heuristic fixed depth L={self.depth}, no guarantee"
        return f"adaptive, stop tolerance {self.epsilon}/4 per doubling, empirical"


def certified(epsilon: float) -> CountMode:
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    return CountMode("certified", epsilon=epsilon)


def heuristic(depth: int) -> CountMode:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return CountMode("heuristic", depth=depth)


def adaptive(epsilon: float) -> CountMode:
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    return CountMode("adaptive", epsilon=epsilon)


@dataclass(frozen=True)
class Estimate:
    """A log-domain count estimate with its per-variable factor trace."""

    log_count: float
    factors: tuple[tuple[int, float], ...]  # (variable, 1 + ratio), chain order
    depth: int | None
    mode: str
    epsilon: float | None
    nodes_visited: int

    @property
    def count(self) -> float:
        return math.exp(self.log_count)

    def count_int(self) -> int | None:
        """Rounded integer rendering, only when it is trustworthy."""
        if len(self.factors) > EXACT_RENDER_LIMIT:
            return None
        if self.log_count == float("-inf"):
            return 0
        return round(math.exp(self.log_count))


def certified_depth(n: int, epsilon: float) -> int:
    """Depth guaranteeing relative error <= epsilon on n variables.

    L = ceil( log_alpha( eps / (10 sqrt6 n) ) ) with alpha = 0.981,
    clamped to be non-negative.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    ratio = epsilon / (CNF_CERTIFIED_COEFF * n)
    return max(0, math.ceil(math.log(ratio) / math.log(CNF_DECAY_BASE)))


def _check_counted(cnf: MonotoneCnf) -> None:
    if any(len(c) == 0 for c in cnf.clauses):
        raise UnsatisfiableError("instance contains an empty clause")


def _chain_instances(cnf: MonotoneCnf) -> list[tuple[int, MonotoneCnf]]:
    """The conditioned instances of the telescoping chain, ascending ids."""
    out = []
    cur = cnf
    for x in range(cnf.n_vars):
        if cur.pins[x] != FREE:
            continue
        out.append((x, cur))
        cur = pin_one(cur, x)
    return out


def _estimate_at_depth(
    cnf: MonotoneCnf,
    depth: int,
    policy: TruncationPolicy,
    mode: CountMode,
    threads: int,
) -> Estimate:
    chain = _chain_instances(cnf)

    def job(item):
        x, inst = item
        return x, marginal_truncated(inst, x, depth, policy)

    if threads > 1 and len(chain) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, chain))
    else:
        results = [job(item) for item in chain]

    log_count = 0.0
    factors = []
    nodes = 0
    for x, mr in results:  # ascending variable order
        factor = 1.0 + mr.value
        factors.append((x, factor))
        log_count += math.log(factor)
        nodes += mr.nodes_visited
    return Estimate(
        log_count=log_count,
        factors=tuple(factors),
        depth=depth,
        mode=mode.kind,
        epsilon=mode.epsilon,
        nodes_visited=nodes,
    )


def run_mode(estimate_at, certified_depth_value: int, mode: CountMode) -> Estimate:
    """Drive an estimator callback through the chosen depth-selection mode.

    estimate_at(depth) must return an Estimate for one full telescoping
    chain.  In adaptive mode the depth doubles until two consecutive
    doublings each change the estimate by a relative factor below
    epsilon/4; a node-budget overrun caps the search at the deepest chain
    that completed.
    """
    if mode.kind == "certified":
        return estimate_at(certified_depth_value)
    if mode.kind == "heuristic":
        return estimate_at(mode.depth)
    if mode.kind != "adaptive":
        raise ValueError(f"unknown mode {mode.kind!r}")

    tol = mode.epsilon / 4.0
    depth = 1
    prev: Estimate | None = None
    stable = 0
    total_nodes = 0
    while True:
        try:
            est = estimate_at(depth)
        except NodeBudgetExceededError:
            if prev is None:
                raise
            return prev  # budget-capped: report the deepest completed chain
        total_nodes += est.nodes_visited
        est = Estimate(
            est.log_count, est.factors, est.depth, est.mode, est.epsilon, total_nodes
        )
        if prev is not None:
            rel = abs(math.expm1(est.log_count - prev.log_count))
            stable = stable + 1 if rel < tol else 0
            if stable >= 2:
                return est
        prev = est
        depth *= 2
        if depth > ADAPTIVE_MAX_DEPTH:
            return est


def count_cnf(
    cnf: MonotoneCnf,
    mode: CountMode,
    policy: TruncationPolicy | None = None,
    threads: int = 1,
) -> Estimate:
    """Estimate the number of satisfying assignments of a well-formed cnf.

    The returned log-count covers all declared variables: variables pinned
    during well-forming are forced and contribute factor 1, free variables
    in no clause contribute factor 2 through the degree-0 base case.

    Raises UnsatisfiableError on an instance with an empty clause and
    NodeBudgetExceededError when a marginal evaluation overruns the policy
    budget (certified depths routinely do; see the module docstring).
    """
    _check_counted(cnf)
    policy = policy or TruncationPolicy()
    n = max(1, len(cnf.free_vars()))
    return run_mode(
        lambda depth: _estimate_at_depth(cnf, depth, policy, mode, threads),
        certified_depth(n, mode.epsilon) if mode.kind == "certified" else 0,
        mode,
    )


def count_cnf_exact(cnf: MonotoneCnf) -> tuple[int, tuple[tuple[int, Fraction], ...]]:
    """Telescoping count with exact rational marginals.

    Returns the exact satisfying-assignment count over all declared
    variables together with the exact chain factors.  Validation machinery:
    feasible only while the untruncated recursion stays small.
    """
    _check_counted(cnf)
    product = Fraction(1)
    factors = []
    for x, inst in _chain_instances(cnf):
        r = marginal_exact_recursive(inst, x)
        factor = 1 + r
        factors.append((x, factor))
        product *= factor
    assert product.denominator == 1, "telescoping product must be integral"
    return int(product), tuple(factors)
