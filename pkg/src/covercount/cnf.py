"""Immutable monotone CNF instances with pinning and branch decomposition.

A monotone CNF (all literals positive) is interchangeable with a set-cover
instance: variables are sets, clauses are elements, and a clause is covered
when at least one of its variables is 1.  Instances are plain immutable
values; every operation returns a new instance, so they can be shared and
evaluated concurrently without synchronization.

Pins are applied eagerly: a variable pinned to 1 has all of its clauses
removed (they are satisfied), a variable pinned to 0 is deleted from every
clause.  Consequently a pinned variable never occurs in a live clause.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .errors import DegreeExceededError, EmptyClauseSignal, UnsatisfiableError

# Pin states.
FREE = 0
PINNED_ONE = 1
PINNED_ZERO = 2

READ_LIMIT = 5  # each variable may occur in at most this many clauses


@dataclass(frozen=True)
class MonotoneCnf:
    """A monotone CNF over variables 0..n_vars-1.

    clauses: tuple of clauses, each a strictly ascending tuple of variable
        ids.  Clause list order is significant: branch decomposition
        enumerates clauses by their current index, so keeping the order
        stable is what makes truncated estimates reproducible.
    pins: per-variable state (FREE / PINNED_ONE / PINNED_ZERO).
    """

    n_vars: int
    clauses: tuple[tuple[int, ...], ...]
    pins: tuple[int, ...]

    @staticmethod
    def from_raw(n_vars: int, clauses: Sequence[Sequence[int]]) -> "MonotoneCnf":
        """Build an unpinned instance, sorting and validating each clause."""
        norm = []
        for c in clauses:
            for v in c:
                if not 0 <= v < n_vars:
                    raise ValueError(f"variable x{v} out of range [0, {n_vars})")
            norm.append(tuple(sorted(set(c))))
        return MonotoneCnf(n_vars, tuple(norm), (FREE,) * n_vars)

    @cached_property
    def occ(self) -> tuple[tuple[int, ...], ...]:
        """occ[x] = ascending indices of the clauses containing x."""
        table: list[list[int]] = [[] for _ in range(self.n_vars)]
        for i, c in enumerate(self.clauses):
            for v in c:
                table[v].append(i)
        return tuple(tuple(t) for t in table)

    def degree(self, x: int) -> int:
        return len(self.occ[x])

    def is_free(self, x: int) -> bool:
        return self.pins[x] == FREE

    def free_vars(self) -> list[int]:
        return [v for v in range(self.n_vars) if self.pins[v] == FREE]

    def constrained_vars(self) -> list[int]:
        """Free variables that occur in at least one clause."""
        seen = set()
        for c in self.clauses:
            seen.update(c)
        return sorted(seen)

    def total_occurrences(self) -> int:
        return sum(len(c) for c in self.clauses)

    def _with(self, clauses, pins) -> "MonotoneCnf":
        return MonotoneCnf(self.n_vars, clauses, pins)

    def _pin(self, x: int, state: int) -> tuple[int, ...]:
        pins = list(self.pins)
        pins[x] = state
        return tuple(pins)


def pin_one(cnf: MonotoneCnf, x: int) -> MonotoneCnf:
    """Fix x=1: every clause containing x is satisfied and removed."""
    if not cnf.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    hit = set(cnf.occ[x])
    clauses = tuple(c for i, c in enumerate(cnf.clauses) if i not in hit)
    return cnf._with(clauses, cnf._pin(x, PINNED_ONE))


def pin_zero(cnf: MonotoneCnf, x: int) -> MonotoneCnf:
    """Fix x=0: delete x from every clause.

    Raises EmptyClauseSignal if some clause was the singleton (x), in which
    case the restricted instance is unsatisfiable.
    """
    if not cnf.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    clauses = []
    for c in cnf.clauses:
        if x in c:
            rest = tuple(v for v in c if v != x)
            if not rest:
                raise EmptyClauseSignal(x)
            clauses.append(rest)
        else:
            clauses.append(c)
    return cnf._with(tuple(clauses), cnf._pin(x, PINNED_ZERO))


def wellform(raw: MonotoneCnf) -> MonotoneCnf:
    """Normalize an ingested instance to well-formed shape.

    Well-formed means: no duplicate variable inside a clause, no singleton
    clause, and no clause containing another.  Singletons force their
    variable to 1, which is applied as a pin (iterated to a fixpoint), so
    the satisfying-assignment count over all declared variables is
    preserved: pinned variables contribute a factor 1 and never-constrained
    free variables a factor 2.

    Raises UnsatisfiableError on an empty input clause and
    DegreeExceededError if a surviving variable occurs in more than 5
    clauses.
    """
    pins = list(raw.pins)
    clauses = [tuple(sorted(set(c))) for c in raw.clauses]

    while True:
        if any(len(c) == 0 for c in clauses):
            raise UnsatisfiableError("input contains an empty clause")
        forced = sorted({c[0] for c in clauses if len(c) == 1})
        if not forced:
            break
        for x in forced:
            if pins[x] == PINNED_ZERO:
                raise UnsatisfiableError(f"x{x} forced to both values")
            pins[x] = PINNED_ONE
        hit = set(forced)
        clauses = [c for c in clauses if not hit.intersection(c)]

    # Drop any clause that contains another one (supersets are implied).
    # Duplicates count as mutual containment; the earliest copy survives.
    sets = [frozenset(c) for c in clauses]
    keep = []
    for i, s in enumerate(sets):
        redundant = False
        for j, t in enumerate(sets):
            if i == j:
                continue
            if t < s or (t == s and j < i):
                redundant = True
                break
        keep.append(not redundant)
    clauses = [c for c, k in zip(clauses, keep) if k]

    result = MonotoneCnf(raw.n_vars, tuple(clauses), tuple(pins))
    for x in result.constrained_vars():
        if result.degree(x) > READ_LIMIT:
            raise DegreeExceededError(x, result.degree(x), READ_LIMIT)
    return result


@dataclass(frozen=True)
class BranchPlan:
    """Deterministic branch decomposition around a pivot variable.

    The clauses containing the pivot are taken in ascending clause-index
    order; within clause j the other variables are taken in ascending id
    order.  Group j conditions the pivot's earlier occurrences to 1 and its
    later occurrences to 0, then asks, with clause j deleted, for the
    marginal of each remaining variable of clause j in turn, pinning the
    previously asked ones to 0.
    """

    cnf: MonotoneCnf
    pivot: int
    clause_indices: tuple[int, ...]
    others: tuple[tuple[int, ...], ...]  # others[j] = clause j minus pivot

    @property
    def degree(self) -> int:
        return len(self.clause_indices)

    def widths(self) -> tuple[int, ...]:
        return tuple(len(o) for o in self.others)

    def group_instance(self, j: int) -> MonotoneCnf:
        """The j-th conditioned instance, with clause j itself still present.

        Earlier pivot clauses are removed (their pivot occurrence is 1) and
        the pivot is deleted from later ones (those occurrences are 0).  The
        pivot remains free: its only remaining occurrence is in clause j.
        """
        cnf = self.cnf
        removed = set(self.clause_indices[:j])
        strip = set(self.clause_indices[j + 1:])
        clauses = []
        for i, c in enumerate(cnf.clauses):
            if i in removed:
                continue
            if i in strip:
                rest = tuple(v for v in c if v != self.pivot)
                if not rest:
                    raise EmptyClauseSignal(self.pivot)
                clauses.append(rest)
            else:
                clauses.append(c)
        return cnf._with(tuple(clauses), cnf.pins)

    def group_base(self, j: int) -> MonotoneCnf:
        """group_instance(j) with clause j deleted and the pivot retired."""
        inst = self.group_instance(j)
        clauses = list(inst.clauses)
        # clause j's position after removing the earlier pivot clauses
        pos = self.clause_indices[j] - j
        del clauses[pos]
        return inst._with(tuple(clauses), inst._pin(self.pivot, PINNED_ZERO))

    def children(self, j: int) -> Iterator[tuple[int, MonotoneCnf]]:
        """Yield (query variable, sub-instance) pairs for group j, lazily.

        The i-th sub-instance additionally pins the previously yielded
        variables to 0.  Consumers must stop iterating as soon as a query
        returns ratio 0; continuing past that point would require pinning a
        forced variable to 0 and raises EmptyClauseSignal.
        """
        cur = self.group_base(j)
        siblings = self.others[j]
        for i, var in enumerate(siblings):
            yield var, cur
            if i + 1 < len(siblings):
                cur = pin_zero(cur, var)

    def child_instance(self, j: int, i: int) -> MonotoneCnf:
        """Materialize the i-th sub-instance of group j (0-based i)."""
        cur = self.group_base(j)
        for var in self.others[j][:i]:
            cur = pin_zero(cur, var)
        return cur


def branch_plan(cnf: MonotoneCnf, x: int) -> BranchPlan:
    """Build the branch decomposition of cnf around free variable x."""
    if not cnf.is_free(x):
        raise ValueError(f"x{x} is already pinned")
    idx = cnf.occ[x]
    if not idx:
        raise ValueError(f"x{x} occurs in no clause; nothing to branch on")
    others = tuple(
        tuple(v for v in cnf.clauses[i] if v != x) for i in idx
    )
    return BranchPlan(cnf, x, idx, others)
