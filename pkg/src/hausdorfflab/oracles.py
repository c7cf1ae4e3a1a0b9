"""Oracle-machine execution and oracle-unaware computation analysis.

Query protocol
--------------
Adaptive: the machine appends symbols to the write-only query tape and enters
the query state; the runner submits the tape content as one query, clears the
tape, and resumes in the yes/no state per the answer.

Parallel rounds: the machine writes a whole batch ``q1#q2#...#qr`` before
entering the query state; the runner answers every query of the batch, writes
the answer bits on the answer tape (head reset to 0), clears the query tape,
and resumes in the yes state.  Empty segments are legal (empty queries).

Oracle-unaware computations replace real answers with arbitrary well-formed
ones; they are the raw material of the predicate constructions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .errors import (BudgetExceeded, OracleExhausted, RoundOutOfRange,
                     ScheduleViolation)
from .machines import (Computation, Configuration, Fuel, MachineSpec,
                       RunStatus, initial_configuration, run, step,
                       _work_cells)


@dataclass(frozen=True)
class Adaptive:
    max_queries: Optional[int] = None  # None = unbounded

    def __post_init__(self):
        if self.max_queries is not None and self.max_queries < 0:
            raise ValueError("max_queries must be >= 0")


@dataclass(frozen=True)
class ParallelRounds:
    r: int
    s: int
    first_round_extra: bool = False

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise ValueError("r and s must be >= 1")

    def round_budget(self, round_number: int) -> int:
        extra = 1 if (self.first_round_extra and round_number == 1) else 0
        return self.r + extra


QuerySchedule = Union[Adaptive, ParallelRounds]


@dataclass(frozen=True)
class OracleBinding:
    """A finite language table, or a decider machine with its fuel."""

    table: Optional[frozenset] = None
    decider: Optional[MachineSpec] = None
    fuel: Optional[Fuel] = None

    def __post_init__(self):
        if (self.table is None) == (self.decider is None):
            raise ValueError("bind exactly one of table / decider")
        if self.decider is not None and self.fuel is None:
            raise ValueError("a decider needs fuel")

    def answers(self, query: str) -> bool:
        if self.table is not None:
            return query in self.table
        status, _ = run(self.decider, query, self.fuel)
        if status == RunStatus.EXHAUSTED:
            # Silently answering 'no' here would corrupt the constructions.
            raise OracleExhausted(f"oracle decider exhausted on {query!r}")
        return status == RunStatus.ACCEPT


@dataclass(frozen=True)
class YesVector:
    counts: tuple

    def __len__(self):
        return len(self.counts)


def _batch(cfg: Configuration, parallel: bool):
    return cfg.query_tape.split("#") if parallel else [cfg.query_tape]


def _resume(machine: MachineSpec, cfg: Configuration, answers: str) -> Configuration:
    """Successor of a query-state ID once the answers are fixed."""
    if machine.answer_tape:
        return Configuration(machine.yes_state, cfg.tapes, "", (answers, 0))
    state = machine.yes_state if answers == "1" else machine.no_state
    return Configuration(state, cfg.tapes, "", cfg.answer_tape)


def run_oracle(machine: MachineSpec, oracle: OracleBinding, input_string: str,
               fuel: Fuel, schedule: QuerySchedule):
    """Run an oracle machine, answering queries at unit cost.

    Returns (status, computation) with an oracle-aware computation as witness
    on Accept; for deterministic machines the (unique) computation is also
    returned on Reject.
    """
    if not machine.oracle_capable:
        raise ValueError("machine is not oracle-capable")
    parallel = isinstance(schedule, ParallelRounds)
    if parallel != machine.answer_tape:
        raise ValueError("schedule kind inconsistent with the answer-tape flag")

    start = initial_configuration(machine, input_string)
    exhausted = False
    stack = [(start, 0, 0, (start,))]  # cfg, steps, rounds/queries used, path
    last_path = None
    while stack:
        cfg, steps, used, path = stack.pop()
        last_path = path
        if cfg.state == machine.accept:
            return RunStatus.ACCEPT, Computation(path, "oracle-aware")
        if machine.is_halting(cfg.state):
            continue
        if steps >= fuel.max_steps:
            exhausted = True
            continue
        if cfg.state == machine.query_state:
            used += 1
            batch = _batch(cfg, parallel)
            if parallel:
                if used > schedule.s:
                    raise ScheduleViolation(f"round {used} exceeds s={schedule.s}")
                if len(batch) > schedule.round_budget(used):
                    raise ScheduleViolation(
                        f"{len(batch)} queries in round {used}, budget "
                        f"{schedule.round_budget(used)}")
            else:
                if schedule.max_queries is not None and used > schedule.max_queries:
                    raise ScheduleViolation(
                        f"query {used} exceeds budget {schedule.max_queries}")
            answers = "".join("1" if oracle.answers(q) else "0" for q in batch)
            nxt = _resume(machine, cfg, answers)
            stack.append((nxt, steps + 1, used, path + (nxt,)))
            continue
        for nxt in reversed(step(machine, cfg)):
            if _work_cells(nxt) > fuel.max_work_cells:
                exhausted = True
                continue
            stack.append((nxt, steps + 1, used, path + (nxt,)))
    if exhausted:
        return RunStatus.EXHAUSTED, None
    witness = Computation(last_path, "oracle-aware") if machine.deterministic else None
    return RunStatus.REJECT, witness


def is_oracle_unaware(machine: MachineSpec, input_string: str,
                      computation: Computation) -> bool:
    """Legal per the transition function everywhere, with every post-query
    transition a well-formed yes/no successor (answers unconstrained)."""
    if not machine.oracle_capable:
        raise ValueError("machine is not oracle-capable")
    from .machines import validate_computation
    return validate_computation(
        machine, input_string,
        Computation(computation.ids, "oracle-unaware"))


def _query_events(machine: MachineSpec, computation: Computation):
    """(round, queries, answers) triples, one per submission, in order."""
    events = []
    parallel = machine.answer_tape
    for before, after in zip(computation.ids, computation.ids[1:]):
        if before.state != machine.query_state:
            continue
        queries = _batch(before, parallel)
        if parallel:
            answers = after.answer_tape[0]
        else:
            answers = "1" if after.state == machine.yes_state else "0"
        events.append((queries, [a == "1" for a in answers]))
    return events


def yes_vector(machine: MachineSpec, computation: Computation) -> YesVector:
    """Per-round counts of yes answers."""
    return YesVector(tuple(sum(answers) for _, answers in
                           _query_events(machine, computation)))


def queries_in(machine: MachineSpec, computation: Computation, round_number: int):
    """Query strings of the given 1-based round, as written at submission."""
    events = _query_events(machine, computation)
    if round_number < 1 or round_number > len(events):
        raise RoundOutOfRange(f"round {round_number} of {len(events)}")
    return set(events[round_number - 1][0])


def answers_in(machine: MachineSpec, computation: Computation, round_number: int):
    """(query, answer) pairs of the given round, in submission order."""
    events = _query_events(machine, computation)
    if round_number < 1 or round_number > len(events):
        raise RoundOutOfRange(f"round {round_number} of {len(events)}")
    queries, answers = events[round_number - 1]
    return tuple(zip(queries, answers))


def answer_pairs(machine: MachineSpec, computation: Computation):
    """All (query, answer) pairs across rounds, in submission order."""
    pairs = []
    for queries, answers in _query_events(machine, computation):
        pairs.extend(zip(queries, answers))
    return tuple(pairs)


def enumerate_unaware(machine: MachineSpec, input_string: str, fuel: Fuel):
    """Yield every complete oracle-unaware computation within fuel, once each.

    Deterministic order: machine branches in transition-table order, answers
    no-before-yes (parallel answer strings in ascending binary order).  A
    branch that exceeds fuel raises BudgetExceeded: dropping it silently
    would corrupt any construction built on the enumeration.
    """
    if not machine.oracle_capable:
        raise ValueError("machine is not oracle-capable")
    parallel = machine.answer_tape

    def explore(cfg, steps, path):
        if machine.is_halting(cfg.state):
            yield Computation(path, "oracle-unaware")
            return
        if steps >= fuel.max_steps:
            raise BudgetExceeded("unaware computation exceeds the step fuel")
        if cfg.state == machine.query_state:
            width = len(_batch(cfg, parallel)) if parallel else 1
            for bits in itertools.product("01", repeat=width):
                nxt = _resume(machine, cfg, "".join(bits))
                yield from explore(nxt, steps + 1, path + (nxt,))
            return
        succs = step(machine, cfg)
        if not succs:
            yield Computation(path, "oracle-unaware")  # stuck: halting leaf
            return
        for nxt in succs:
            if _work_cells(nxt) > fuel.max_work_cells:
                raise BudgetExceeded("unaware computation exceeds the cell fuel")
            yield from explore(nxt, steps + 1, path + (nxt,))

    start = initial_configuration(machine, input_string)
    yield from explore(start, 0, (start,))


def accepts(machine: MachineSpec, computation: Computation) -> bool:
    return computation.ids[-1].state == machine.accept


def rejects(machine: MachineSpec, computation: Computation) -> bool:
    last = computation.ids[-1].state
    return last != machine.accept
