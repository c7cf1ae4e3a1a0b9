"""Executable Hausdorff predicates constructed from oracle machines.

Two constructions are provided, both computing a 1-based monotone predicate
whose parity decision reproduces the oracle machine's verdict:

* the yes-vector construction for deterministic machines issuing s rounds of
  exactly r parallel queries: indices are read as base-(r+1) digit vectors
  and compared lexicographically against the per-round yes-answer counts of
  oracle-consistent unaware computations;

* the census construction for (possibly nondeterministic) adaptive machines:
  indices count oracle-accepted strings in a finite query universe, and a
  witness set of exactly that many accepted strings pins down the real run.

Nondeterministic certificate guessing in the source arguments is replaced by
exhaustive verification against the bound oracle; truth values are unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .errors import BudgetExceeded, ConstructionError
from .hausdorff import HausdorffPredicate, LengthFunction
from .machines import Fuel, MachineSpec, RunStatus
from .oracles import (Adaptive, OracleBinding, ParallelRounds, QuerySchedule,
                      accepts, answer_pairs, enumerate_unaware, run_oracle,
                      yes_vector)

#: Largest query universe the census construction will enumerate.
MAX_UNIVERSE = 1 << 12


@dataclass(frozen=True)
class ConstructionContext:
    machine: MachineSpec
    oracle: OracleBinding
    fuel: Fuel
    schedule: QuerySchedule
    query_length_bound: int = 3


def vector_of_index(z: int, r: int, s: int):
    """Digits of z in base r+1 over s places, most significant first.

    Lexicographic order on the vectors equals numeric order on the indices.
    """
    from .numutil import base_digits
    return tuple(base_digits(z, r + 1, s))


def index_of_vector(vector, r: int):
    from .numutil import digits_to_index
    return digits_to_index(vector, r + 1)


def _consistent_computations(ctx: ConstructionContext, w: str):
    """Unaware computations annotated with yes-vector and oracle data."""
    machine = ctx.machine
    rows = []
    for comp in enumerate_unaware(machine, w, ctx.fuel):
        pairs = answer_pairs(machine, comp)
        yes_ok = all(ctx.oracle.answers(q) for q, a in pairs if a)
        rows.append({
            "computation": comp,
            "vector": yes_vector(machine, comp).counts,
            "accepting": accepts(machine, comp),
            "yes_queries_accepted": yes_ok,
            "pairs": pairs,
        })
    return rows


def build_yesvector_predicate(ctx: ConstructionContext) -> HausdorffPredicate:
    """Monotone predicate whose parity decision equals the machine's verdict.

    Requires a deterministic machine under a ParallelRounds{r, s} schedule
    issuing exactly r queries in each of exactly s rounds.  Index z (0-based
    internally, exposed 1-based) is read as the base-(r+1) digit vector m;
    the predicate holds when either some oracle-consistent unaware
    computation strictly dominates m, or one with vector exactly m gives the
    verdict matching z's parity (accepting on even z, rejecting on odd z).
    """
    if not isinstance(ctx.schedule, ParallelRounds):
        raise ConstructionError("yes-vector construction needs a parallel schedule")
    if ctx.schedule.first_round_extra:
        raise ConstructionError("construction machines use uniform rounds")
    if not ctx.machine.deterministic:
        raise ConstructionError("yes-vector construction needs a deterministic machine")
    r, s = ctx.schedule.r, ctx.schedule.s
    space = (r + 1) ** s
    cache = {}

    def rows_for(w):
        if w not in cache:
            rows = _consistent_computations(ctx, w)
            for row in rows:
                vec = row["vector"]
                if len(vec) != s or any(c > r for c in vec):
                    raise ConstructionError(
                        f"machine issued {vec} instead of {s} rounds of {r} queries")
            cache[w] = rows
        return cache[w]

    def succ(rows, m):
        return any(row["yes_queries_accepted"] and row["vector"] > m for row in rows)

    def current(rows, m, accepting):
        return any(row["yes_queries_accepted"] and row["vector"] == m
                   and row["accepting"] == accepting for row in rows)

    def predicate(w, z_one_based):
        z = z_one_based - 1  # the constructed sequence starts at index 0
        if z >= space:
            return False
        rows = rows_for(w)
        m = vector_of_index(z, r, s)
        if succ(rows, m):
            return True
        return current(rows, m, accepting=(z % 2 == 0))

    return HausdorffPredicate(
        declared_length=LengthFunction.const(space),
        closure=predicate,
        name=f"yesvector[{ctx.machine.name or 'machine'}]")


def query_universe(bound: int):
    """All binary strings of length at most bound, shortlex order."""
    if 2 ** (bound + 1) > MAX_UNIVERSE:
        raise BudgetExceeded(f"universe for bound {bound} exceeds {MAX_UNIVERSE}")
    universe = []
    for length in range(bound + 1):
        universe.extend("".join(bits) for bits in itertools.product("01", repeat=length))
    return universe


def generated_queries(ctx: ConstructionContext, w: str):
    """Union of query strings over all unaware computations on w."""
    queries = set()
    for comp in enumerate_unaware(ctx.machine, w, ctx.fuel):
        for q, _ in answer_pairs(ctx.machine, comp):
            queries.add(q)
    return queries


def build_census_predicate(ctx: ConstructionContext, universe=None,
                           length: Optional[LengthFunction] = None) -> HausdorffPredicate:
    """Census-and-pseudo-complement predicate for adaptive oracle machines.

    Index z (0-based internally) is compared against the number of universe
    strings the oracle accepts; a witness set of exactly z accepted strings
    must be consistent with an unaware computation of the right verdict
    (accepting on even z, rejecting on odd z).  The universe defaults to all
    binary strings of length at most ctx.query_length_bound; pass the set of
    generated queries for the space-bounded variant.
    """
    if not isinstance(ctx.schedule, Adaptive):
        raise ConstructionError("census construction needs an adaptive schedule")

    def universe_for(w):
        if universe is None:
            return query_universe(ctx.query_length_bound)
        if callable(universe):
            return sorted(universe(ctx, w))
        return sorted(universe)

    cache = {}

    def data_for(w):
        if w not in cache:
            strings = universe_for(w)
            accepted = frozenset(q for q in strings if ctx.oracle.answers(q))
            rows = _consistent_computations(ctx, w)
            for row in rows:
                for q, _ in row["pairs"]:
                    if q not in strings:
                        raise ConstructionError(
                            f"query {q!r} outside the census universe")
            cache[w] = (strings, accepted, rows)
        return cache[w]

    def witnessed(strings, accepted, row, z):
        """Some Y with |Y| = z, Y subset of accepted strings, containing every
        yes-answered query of the computation and none of its no-answered
        ones.  Closed form over the exhaustive subset search."""
        yes = {q for q, a in row["pairs"] if a}
        no = {q for q, a in row["pairs"] if not a}
        if yes & no or not yes <= accepted:
            return False
        free = len(accepted - yes - no)
        return len(yes) <= z <= len(yes) + free

    def predicate(w, z_one_based):
        z = z_one_based - 1
        strings, accepted, rows = data_for(w)
        if z > len(strings):
            return False
        if len(accepted) > z:  # the census predicate: more than z accepted
            return True
        want_accepting = (z % 2 == 0)
        return any(row["accepting"] == want_accepting
                   and witnessed(strings, accepted, row, z) for row in rows)

    if length is None:
        if callable(universe):
            raise ConstructionError("a callable universe needs an explicit length")
        size = len(universe_for(""))
        length = LengthFunction.const(size + 1)
    return HausdorffPredicate(
        declared_length=length,
        closure=predicate,
        name=f"census[{ctx.machine.name or 'machine'}]")


def simulate(ctx: ConstructionContext, w: str) -> bool:
    """Ground truth: the oracle machine's own verdict."""
    status, _ = run_oracle(ctx.machine, ctx.oracle, w, ctx.fuel, ctx.schedule)
    if status == RunStatus.EXHAUSTED:
        raise ConstructionError("context fuel is insufficient for the machine")
    return status == RunStatus.ACCEPT
