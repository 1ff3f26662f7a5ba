"""At-most-one constraint instances and the hypergraph-matching counter.

An instance is a conjunction of constraints K_s(v1..vs), each satisfied when
at most one listed variable is 0.  Matchings of a hypergraph translate
directly: one variable per hyperedge (0 = edge in the matching), one
K_deg(v) constraint per vertex over its incident edges, so the number of
satisfying assignments equals the number of matchings of every size.

The approximation engine supports normalized instances with constraint
arity <= 4 and every variable in <= 3 constraints, which covers matchings
of hypergraphs with edges of <= 3 vertices and maximum degree <= 4
(3-dimensional matchings in particular).

The marginal recursion mirrors the monotone-CNF one with two differences:
conditioning keeps instances normalized (the branch pins are re-normalized
after every step), and the group recursion is

    R = prod_j  1 / ( 1 + sum_i r_i )

with a uniform depth charge of 1 per level.  The truncated estimate's error
decays like 4*sqrt(6)*0.99^L.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .cnf import FREE, PINNED_ONE, PINNED_ZERO
from .constants import AMO_CERTIFIED_COEFF, AMO_DECAY_BASE, DEFAULT_NODE_BUDGET
from .counter import CountMode, Estimate, run_mode
from .errors import (
    DegreeExceededError,
    EdgeSizeExceededError,
    NodeBudgetExceededError,
    UnsatisfiableError,
)
from .marginal import MarginalRatio, TruncationPolicy, _EvalState

ARITY_LIMIT = 4       # K_s constraints with s <= 4
DEGREE_LIMIT = 3      # each variable in <= 3 constraints after normalizing
EDGE_SIZE_LIMIT = 3   # hyperedges with <= 3 vertices


@dataclass(frozen=True)
class AmoInstance:
    """An at-most-one-zero constraint instance.

    constraints hold variable ids; duplicates within a raw constraint are
    legal (normalization forces such variables to 1).  pins reuse the CNF
    pin states.  A normalized instance references only free variables, has
    no duplicates, and every constraint has arity in [2, 4].
    """

    n_vars: int
    constraints: tuple[tuple[int, ...], ...]
    pins: tuple[int, ...]

    @staticmethod
    def from_raw(
        n_vars: int,
        constraints: Sequence[Sequence[int]],
        pins: dict[int, int] | None = None,
    ) -> "AmoInstance":
        """Build an instance, validating ranges and the arity cap.

        pins maps variable id -> 0 or 1 (input pinning constraints).
        """
        norm = []
        for c in constraints:
            if len(c) > ARITY_LIMIT:
                raise ValueError(
                    f"constraint arity {len(c)} exceeds the supported {ARITY_LIMIT}"
                )
            for v in c:
                if not 0 <= v < n_vars:
                    raise ValueError(f"variable x{v} out of range [0, {n_vars})")
            norm.append(tuple(sorted(c)))  # duplicates preserved
        pin_row = [FREE] * n_vars
        for v, val in (pins or {}).items():
            if not 0 <= v < n_vars:
                raise ValueError(f"pinned variable x{v} out of range")
            if val not in (0, 1):
                raise ValueError("pin values must be 0 or 1")
            pin_row[v] = PINNED_ONE if val == 1 else PINNED_ZERO
        return AmoInstance(n_vars, tuple(norm), tuple(pin_row))

    @cached_property
    def occ(self) -> tuple[tuple[int, ...], ...]:
        table: list[list[int]] = [[] for _ in range(self.n_vars)]
        for i, c in enumerate(self.constraints):
            for v in set(c):
                table[v].append(i)
        return tuple(tuple(t) for t in table)

    def degree(self, x: int) -> int:
        return len(self.occ[x])

    def is_free(self, x: int) -> bool:
        return self.pins[x] == FREE

    def free_vars(self) -> list[int]:
        return [v for v in range(self.n_vars) if self.pins[v] == FREE]


@dataclass(frozen=True)
class Hypergraph:
    """Vertices 0..n_vertices-1 and a list of hyperedges (vertex sets)."""

    n_vertices: int
    edges: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_raw(n_vertices: int, edges: Sequence[Sequence[int]]) -> "Hypergraph":
        norm = []
        for e in edges:
            dedup = tuple(sorted(set(e)))
            if not dedup:
                raise ValueError("empty hyperedge")
            for v in dedup:
                if not 0 <= v < n_vertices:
                    raise ValueError(f"vertex {v} out of range [0, {n_vertices})")
            norm.append(dedup)
        return Hypergraph(n_vertices, tuple(norm))

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg


def normalize(raw: AmoInstance) -> AmoInstance:
    """Propagate pins to a fixpoint and drop vacuous constraints.

    Rules, iterated until stable:
      * two 0-pinned occurrences in one constraint (counting duplicates):
        unsatisfiable;
      * exactly one 0-pinned occurrence: every other variable of the
        constraint is forced to 1 and the constraint is dropped;
      * a duplicated live variable is forced to 1 (two zeros otherwise);
      * 1-pinned occurrences are simply removed from their constraint;
      * constraints left with fewer than two variables are vacuous.

    The satisfying-assignment count is preserved, with every pinned
    variable contributing a factor 1.  Raises UnsatisfiableError, or
    DegreeExceededError if a surviving variable exceeds 3 constraints.
    """
    pins = list(raw.pins)
    cons = list(raw.constraints)
    changed = True
    while changed:
        changed = False
        out = []
        for c in cons:
            zeros = [v for v in c if pins[v] == PINNED_ZERO]
            if len(zeros) >= 2:
                raise UnsatisfiableError(
                    "a constraint has two occurrences pinned to 0"
                )
            if len(zeros) == 1:
                z = zeros[0]
                for v in c:
                    if v != z and pins[v] != PINNED_ONE:
                        pins[v] = PINNED_ONE
                changed = True
                continue  # constraint satisfied by construction
            live = [v for v in c if pins[v] == FREE]
            dups = sorted({v for v in live if live.count(v) > 1})
            if dups:
                for v in dups:
                    pins[v] = PINNED_ONE
                changed = True
                live = [v for v in live if v not in dups]
            if len(live) != len(c):
                changed = True
            if len(live) >= 2:
                out.append(tuple(sorted(live)))
            elif len(live) == len(c):
                changed = True  # drop a vacuous input constraint
        cons = out
    result = AmoInstance(raw.n_vars, tuple(cons), tuple(pins))
    for x in range(result.n_vars):
        if result.degree(x) > DEGREE_LIMIT:
            raise DegreeExceededError(x, result.degree(x), DEGREE_LIMIT)
    return result


def from_hypergraph(h: Hypergraph) -> AmoInstance:
    """Translate matchings of h into an at-most-one instance.

    Variable i stands for edge i (0 = in the matching); vertex v of degree
    d becomes K_d over its incident edges.  Degree-1 vertices yield vacuous
    K_1 constraints, kept here and dropped by normalize.
    """
    incident: list[list[int]] = [[] for _ in range(h.n_vertices)]
    for i, e in enumerate(h.edges):
        if len(e) > EDGE_SIZE_LIMIT:
            raise EdgeSizeExceededError(i, len(e), EDGE_SIZE_LIMIT)
        for v in e:
            incident[v].append(i)
    for v, inc in enumerate(incident):
        if len(inc) > ARITY_LIMIT:
            raise DegreeExceededError(v, len(inc), ARITY_LIMIT)
    constraints = tuple(tuple(inc) for inc in incident if inc)
    return AmoInstance(len(h.edges), constraints, (FREE,) * len(h.edges))


# ----------------------------------------------------------------------------
# Branch decomposition and marginal recursion
# ----------------------------------------------------------------------------


def amo_branch_child(
    inst: AmoInstance, x: int, j: int, i: int
) -> tuple[int, AmoInstance]:
    """The (j, i)-th conditioned sub-instance for the pivot x, normalized.

    Group j conditions x's occurrence in its j-th constraint (ascending
    index): earlier constraints lose their x occurrence (it is 1), later
    ones are dropped entirely with all their other variables forced to 1
    (that occurrence is 0).  Constraint j itself is dropped and all its
    other variables except the i-th are forced to 1.

    Returns (query variable, child).  The child is always satisfiable; the
    query variable may come back pinned to 1, in which case its ratio is 0.
    """
    occ = inst.occ[x]
    cj = occ[j]
    siblings = [v for v in inst.constraints[cj] if v != x]
    pins = list(inst.pins)
    cons = []
    earlier = set(occ[:j])
    later = set(occ[j + 1:])
    for k, c in enumerate(inst.constraints):
        if k == cj:
            continue
        if k in earlier:
            cons.append(tuple(v for v in c if v != x))
        elif k in later:
            for v in c:
                if v != x:
                    pins[v] = PINNED_ONE
        else:
            cons.append(c)
    for k2, v in enumerate(siblings):
        if k2 != i:
            pins[v] = PINNED_ONE
    pins[x] = PINNED_ZERO  # marker only: x occurs in no remaining constraint
    raw = AmoInstance(inst.n_vars, tuple(cons), tuple(pins))
    return siblings[i], normalize(raw)


def _truncated_amo(inst: AmoInstance, x: int, depth: int, state: _EvalState) -> float:
    state.tick()
    if inst.pins[x] == PINNED_ONE:
        return 0.0
    occ = inst.occ[x]
    d = len(occ)
    if d == 0:
        return 1.0
    if depth == 0:
        state.clamped = True
        return 1.0
    result = 1.0
    for j in range(d):
        w = len(inst.constraints[occ[j]]) - 1
        total = 0.0
        for i in range(w):
            var, child = amo_branch_child(inst, x, j, i)
            total += _truncated_amo(child, var, depth - 1, state)
        result *= 1.0 / (1.0 + total)
    return result


def marginal_truncated_amo(
    inst: AmoInstance,
    x: int,
    depth: int,
    policy: TruncationPolicy | None = None,
) -> MarginalRatio:
    """Depth-L truncated marginal-ratio estimate for a normalized instance.

    Children descend with depth-1 uniformly.  Never raises
    UnsatisfiableError: branch pins only force values consistent with some
    satisfying assignment.
    """
    if not inst.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    policy = policy or TruncationPolicy(alpha=AMO_DECAY_BASE)
    state = _EvalState(budget=policy.node_budget)
    value = _truncated_amo(inst, x, depth, state)
    return MarginalRatio(value, depth, state.nodes, state.clamped)


def _exact_amo(inst: AmoInstance, x: int, state: _EvalState, memo: dict) -> Fraction:
    if inst.pins[x] == PINNED_ONE:
        return Fraction(0)
    key = (inst.constraints, x)
    hit = memo.get(key)
    if hit is not None:
        return hit
    state.tick()
    occ = inst.occ[x]
    d = len(occ)
    if d == 0:
        return Fraction(1)
    result = Fraction(1)
    for j in range(d):
        w = len(inst.constraints[occ[j]]) - 1
        total = Fraction(0)
        for i in range(w):
            var, child = amo_branch_child(inst, x, j, i)
            total += _exact_amo(child, var, state, memo)
        result *= Fraction(1, 1) / (1 + total)
    memo[key] = result
    return result


def marginal_exact_amo(
    inst: AmoInstance,
    x: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    memo: dict | None = None,
) -> Fraction:
    """Untruncated recursion in exact rationals (validation oracle twin).

    memo may be shared across queries of one root instance; values are pure
    functions of the live constraint list and the query variable.
    """
    if not inst.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    state = _EvalState(budget=node_budget)
    return _exact_amo(inst, x, state, {} if memo is None else memo)


# ----------------------------------------------------------------------------
# Counting
# ----------------------------------------------------------------------------


def certified_depth_amo(n: int, epsilon: float) -> int:
    """Depth certifying relative error <= epsilon on n variables.

    L = ceil( log_alpha( eps / (8 sqrt6 n) ) ) with alpha = 0.99, clamped
    to be non-negative.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    ratio = epsilon / (AMO_CERTIFIED_COEFF * n)
    return max(0, math.ceil(math.log(ratio) / math.log(AMO_DECAY_BASE)))


def _pin_one_normalized(inst: AmoInstance, x: int) -> AmoInstance:
    pins = list(inst.pins)
    pins[x] = PINNED_ONE
    return normalize(AmoInstance(inst.n_vars, inst.constraints, tuple(pins)))


def _amo_chain(inst: AmoInstance) -> list[tuple[int, AmoInstance]]:
    out = []
    cur = normalize(inst)
    for x in range(inst.n_vars):
        if cur.pins[x] != FREE:
            continue
        out.append((x, cur))
        cur = _pin_one_normalized(cur, x)
    return out


def _estimate_at_depth(
    inst: AmoInstance,
    depth: int,
    policy: TruncationPolicy,
    mode: CountMode,
    threads: int,
) -> Estimate:
    chain = _amo_chain(inst)

    def job(item):
        x, sub = item
        return x, marginal_truncated_amo(sub, x, depth, policy)

    if threads > 1 and len(chain) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, chain))
    else:
        results = [job(item) for item in chain]

    log_count = 0.0
    factors = []
    nodes = 0
    for x, mr in results:
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


def count_matchings(
    inst: AmoInstance,
    mode: CountMode,
    policy: TruncationPolicy | None = None,
    threads: int = 1,
) -> Estimate:
    """Estimate the satisfying-assignment count of an at-most-one instance.

    For an instance built by from_hypergraph this is the number of
    matchings of every size, the empty one included.  Telescopes by pinning
    variables to 1 in ascending order (all-ones is always satisfying),
    re-normalizing after each pin; pinned variables contribute factor 1.
    """
    policy = policy or TruncationPolicy(alpha=AMO_DECAY_BASE)
    norm = normalize(inst)
    n = max(1, len(norm.free_vars()))
    return run_mode(
        lambda depth: _estimate_at_depth(norm, depth, policy, mode, threads),
        certified_depth_amo(n, mode.epsilon) if mode.kind == "certified" else 0,
        mode,
    )


def count_matchings_exact(
    inst: AmoInstance,
) -> tuple[int, tuple[tuple[int, Fraction], ...]]:
    """Telescoping count with exact rational marginals (validation twin)."""
    product = Fraction(1)
    factors = []
    for x, sub in _amo_chain(inst):
        r = marginal_exact_amo(sub, x)
        factor = 1 + r
        factors.append((x, factor))
        product *= factor
    assert product.denominator == 1, "telescoping product must be integral"
    return int(product), tuple(factors)
