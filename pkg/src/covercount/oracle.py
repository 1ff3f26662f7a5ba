"""Ground-truth engine: exhaustive counts, exact marginals, corpus generators.

Counts are plain Python integers (arbitrary precision) and marginals exact
fractions; no floating point enters the oracle.  Enumeration runs over the
constrained free variables only, via vectorized bitmask evaluation, and is
multiplied by 2 per free variable that occurs in no constraint.  A second,
deliberately naive clause-by-clause evaluator provides an independent
implementation to cross-check the bitmask path.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from .amo import AmoInstance, Hypergraph
from .cnf import FREE, PINNED_ZERO, MonotoneCnf
from .errors import (
    DivisionUndefinedError,
    GenerationFailedError,
    TooLargeForOracleError,
    UnsatisfiableError,
)

ORACLE_CAP = 30  # max constrained variables enumerated exhaustively
_CHUNK_BITS = 20


def _cnf_requirements(cnf: MonotoneCnf):
    """(enum vars, [(mask, min_ones)], n free unconstrained) for a CNF.

    A clause over k variables is satisfied when at least one is 1.
    """
    enum_vars = cnf.constrained_vars()
    pos = {v: i for i, v in enumerate(enum_vars)}
    reqs = []
    for c in cnf.clauses:
        if not c:
            return enum_vars, None, 0  # empty clause: unsatisfiable
        mask = 0
        for v in c:
            mask |= 1 << pos[v]
        reqs.append((mask, 1))
    free_untouched = sum(
        1 for v in range(cnf.n_vars) if cnf.pins[v] == FREE and v not in pos
    )
    return enum_vars, reqs, free_untouched


def _amo_requirements(inst: AmoInstance):
    """Bit requirements for an at-most-one instance, honoring raw pins.

    Each constraint tolerates at most one zero among its occurrences,
    counting multiplicity: a 0-pinned occurrence uses up the tolerance, a
    duplicated free variable must be 1 outright.
    """
    seen: set[int] = set()
    for c in inst.constraints:
        seen.update(v for v in c if inst.pins[v] == FREE)
    enum_vars = sorted(seen)
    pos = {v: i for i, v in enumerate(enum_vars)}
    reqs = []
    for c in inst.constraints:
        fixed_zeros = sum(1 for v in c if inst.pins[v] == PINNED_ZERO)
        if fixed_zeros >= 2:
            return enum_vars, None, 0  # unsatisfiable outright
        live = [v for v in c if inst.pins[v] == FREE]
        dups = {v for v in live if live.count(v) > 1}
        for v in sorted(dups):
            reqs.append((1 << pos[v], 1))  # duplicated: must be 1
        once = [v for v in live if v not in dups]
        if once:
            mask = 0
            for v in once:
                mask |= 1 << pos[v]
            min_ones = len(once) - (1 - fixed_zeros)
            if min_ones > 0:
                reqs.append((mask, min_ones))
    free_untouched = sum(
        1 for v in range(inst.n_vars) if inst.pins[v] == FREE and v not in pos
    )
    return enum_vars, reqs, free_untouched


def _requirements(instance):
    if isinstance(instance, MonotoneCnf):
        return _cnf_requirements(instance)
    if isinstance(instance, AmoInstance):
        return _amo_requirements(instance)
    raise TypeError(f"unsupported instance type {type(instance).__name__}")


def _enumerate_counts(enum_vars, reqs, cap):
    """Total satisfying count and per-variable zero counts, by enumeration."""
    k = len(enum_vars)
    if k > cap:
        raise TooLargeForOracleError(k, cap)
    total = 0
    zeros = [0] * k
    chunk = 1 << min(k, _CHUNK_BITS)
    for lo in range(0, 1 << k, chunk):
        a = np.arange(lo, lo + chunk, dtype=np.uint64)
        sat = np.ones(len(a), dtype=bool)
        for mask, min_ones in reqs:
            sat &= np.bitwise_count(a & np.uint64(mask)) >= min_ones
        total += int(np.count_nonzero(sat))
        hits = a[sat]
        for i in range(k):
            zeros[i] += int(np.count_nonzero((hits >> np.uint64(i)) & np.uint64(1) == 0))
    return total, zeros


def exact_count(instance, cap: int = ORACLE_CAP) -> int:
    """Exact satisfying-assignment count over all declared variables.

    Pinned variables contribute a factor 1, free variables outside every
    constraint a factor 2.  Raises TooLargeForOracleError past the cap.
    """
    enum_vars, reqs, free_untouched = _requirements(instance)
    if reqs is None:
        return 0
    total, _ = _enumerate_counts(enum_vars, reqs, cap)
    return total << free_untouched


def exact_marginals(instance, cap: int = ORACLE_CAP) -> dict[int, Fraction]:
    """Exact ratio P(x=0)/P(x=1) for every free variable, in one pass.

    Raises UnsatisfiableError when there is no satisfying assignment.
    """
    enum_vars, reqs, _ = _requirements(instance)
    if reqs is None:
        raise UnsatisfiableError("instance has no satisfying assignment")
    total, zeros = _enumerate_counts(enum_vars, reqs, cap)
    if total == 0:
        raise UnsatisfiableError("instance has no satisfying assignment")
    out: dict[int, Fraction] = {}
    for i, v in enumerate(enum_vars):
        ones = total - zeros[i]
        if ones == 0:
            raise DivisionUndefinedError(f"no satisfying assignment sets x{v}=1")
        out[v] = Fraction(zeros[i], ones)
    for v in range(instance.n_vars):
        if instance.pins[v] == FREE and v not in out:
            out[v] = Fraction(1)  # unconstrained: perfectly symmetric
    return out


def exact_marginal(instance, x: int, cap: int = ORACLE_CAP) -> Fraction:
    """Exact ratio P(x=0)/P(x=1) for one free variable."""
    if instance.pins[x] != FREE:
        raise ValueError(f"x{x} is pinned")
    return exact_marginals(instance, cap)[x]


# ----------------------------------------------------------------------------
# Independent second implementation: plain semantic evaluation
# ----------------------------------------------------------------------------


def exact_count_semantic(instance) -> int:
    """Clause-by-clause reference count, sharing no code with the bitmask path."""
    if isinstance(instance, MonotoneCnf):
        touched = sorted({v for c in instance.clauses for v in c})

        def ok(assign):
            return all(any(assign[v] for v in c) for c in instance.clauses)

    elif isinstance(instance, AmoInstance):
        touched = sorted(
            {v for c in instance.constraints for v in c if instance.pins[v] == FREE}
        )
        fixed = {
            v: (0 if instance.pins[v] == PINNED_ZERO else 1)
            for v in range(instance.n_vars)
            if instance.pins[v] != FREE
        }

        def ok(assign):
            for c in instance.constraints:
                zeros = 0
                for v in c:
                    val = assign[v] if v in assign else fixed[v]
                    zeros += val == 0
                if zeros > 1:
                    return False
            return True

    else:
        raise TypeError(f"unsupported instance type {type(instance).__name__}")

    total = 0
    for bits in itertools.product((0, 1), repeat=len(touched)):
        if ok(dict(zip(touched, bits))):
            total += 1
    untouched = sum(
        1 for v in range(instance.n_vars) if instance.pins[v] == FREE and v not in set(touched)
    )
    return total << untouched


def count_hypergraph_matchings_brute(h: Hypergraph) -> int:
    """Count matchings by direct edge-subset recursion.

    Independent of the at-most-one machinery: walks edges in order, either
    skipping one or taking it when it is vertex-disjoint from those taken.
    """

    def rec(i: int, used: frozenset[int]) -> int:
        if i == len(h.edges):
            return 1
        total = rec(i + 1, used)
        e = set(h.edges[i])
        if not e & used:
            total += rec(i + 1, used | e)
        return total

    return rec(0, frozenset())


# ----------------------------------------------------------------------------
# Reproducible corpus generators
# ----------------------------------------------------------------------------


def gen_random_read5_cnf(
    seed: int,
    n_vars: int,
    n_clauses: int,
    arity_range: tuple[int, int] = (2, 5),
) -> MonotoneCnf:
    """Deterministic random monotone CNF with every degree <= 5.

    Degrees are capped by construction (clauses draw only from variables
    with remaining budget; arity is repaired downward when few are left),
    so n_clauses is a target, not a promise.  Raises GenerationFailedError
    when not even one clause fits the caps.
    """
    lo, hi = arity_range
    if not 1 <= lo <= hi:
        raise ValueError("invalid arity range")
    rng = random.Random(seed)
    deg = [0] * n_vars
    clauses = []
    for _ in range(n_clauses):
        eligible = [v for v in range(n_vars) if deg[v] < 5]
        if len(eligible) < max(2, lo):
            break
        arity = min(rng.randint(lo, hi), len(eligible))
        chosen = sorted(rng.sample(eligible, arity))
        for v in chosen:
            deg[v] += 1
        clauses.append(tuple(chosen))
    if n_clauses > 0 and not clauses:
        raise GenerationFailedError(
            f"cannot fit any clause with arity >= {max(2, lo)} on {n_vars} variables"
        )
    return MonotoneCnf.from_raw(n_vars, clauses)


def gen_random_deg4_hypergraph(
    seed: int,
    n_vertices: int,
    n_edges: int,
    edge_size: int | tuple[int, int] = 3,
) -> Hypergraph:
    """Deterministic random hypergraph with vertex degrees <= 4.

    edge_size is a fixed size or an inclusive (lo, hi) range with hi <= 3.
    """
    lo, hi = (edge_size, edge_size) if isinstance(edge_size, int) else edge_size
    if not 1 <= lo <= hi <= 3:
        raise ValueError("edge sizes must lie in [1, 3]")
    rng = random.Random(seed)
    deg = [0] * n_vertices
    edges = []
    for _ in range(n_edges):
        eligible = [v for v in range(n_vertices) if deg[v] < 4]
        if len(eligible) < lo:
            break
        size = min(rng.randint(lo, hi), len(eligible))
        chosen = sorted(rng.sample(eligible, size))
        for v in chosen:
            deg[v] += 1
        edges.append(tuple(chosen))
    if n_edges > 0 and not edges:
        raise GenerationFailedError(
            f"cannot fit any edge of size >= {lo} on {n_vertices} vertices"
        )
    return Hypergraph.from_raw(n_vertices, edges)
