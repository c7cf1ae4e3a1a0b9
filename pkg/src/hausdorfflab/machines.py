"""Multi-tape Turing machines: specs, configurations, stepping, fuel-bounded
runs, computation validation, and a bit-string codec for computations.

Conventions
-----------
* Tapes are semi-infinite.  Cell 0 of every standard tape holds the left
  marker ``>`` which is never overwritten and never crossed leftward.
* The blank symbol is ``_``.  Input is written on tape 0, cells 1..len(w).
* Oracle machines additionally have a write-only unidirectional query tape
  (a plain string, no marker) and, when ``answer_tape`` is set, a read-only
  answer tape whose content is replaced by the oracle on each round.
* A transition reads one symbol per standard tape (plus the answer-tape
  symbol when present), writes one symbol per standard tape, moves each head
  L/R/S, and may append one symbol to the query tape.

Stepping through the query state is the oracle runner's job (`oracles`);
:func:`step` refuses to do it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import (DecodeError, HaltedConfiguration, MalformedConfiguration,
                     QueryStateReached)

LEFT_MARKER = ">"
BLANK = "_"
INPUT_SYMBOLS = ("0", "1", "#", "$")

_MOVES = {"L": -1, "R": 1, "S": 0}


@dataclass(frozen=True)
class Transition:
    state: str
    read: tuple  # one symbol per standard tape, + answer symbol if present
    next_state: str
    write: tuple  # one symbol per standard tape
    moves: tuple  # one of L/R/S per standard tape, + answer move if present
    query_write: Optional[str] = None  # symbol appended to the query tape


@dataclass(frozen=True)
class MachineSpec:
    """A k-tape (optionally oracle-capable) Turing machine."""

    states: tuple
    start: str
    accept: str
    reject: str
    transitions: tuple  # tuple of Transition
    tape_count: int = 1
    input_alphabet: tuple = ("0", "1")
    tape_alphabet: tuple = (LEFT_MARKER, BLANK, "0", "1", "#", "$")
    deterministic: bool = False
    oracle_capable: bool = False
    query_state: str = "q?"
    yes_state: str = "q_yes"
    no_state: str = "q_no"
    answer_tape: bool = False
    name: str = ""

    def __post_init__(self):
        if self.tape_count < 1:
            raise ValueError("tape_count must be positive")
        if not set(self.input_alphabet) <= set(INPUT_SYMBOLS):
            raise ValueError(f"input alphabet must be within {INPUT_SYMBOLS}")
        missing = ({LEFT_MARKER, BLANK} | set(self.input_alphabet)) - set(self.tape_alphabet)
        if missing:
            raise ValueError(f"tape alphabet is missing {sorted(missing)}")
        known = set(self.states)
        for special in (self.start, self.accept, self.reject):
            if special not in known:
                raise ValueError(f"state {special!r} not declared")
        read_width = self.tape_count + (1 if self.answer_tape else 0)
        move_width = read_width
        for t in self.transitions:
            if t.state in (self.accept, self.reject):
                raise ValueError("accept/reject states must have no outgoing transitions")
            if len(t.read) != read_width or len(t.moves) != move_width:
                raise ValueError(f"transition of {t.state!r} has wrong width")
            if len(t.write) != self.tape_count:
                raise ValueError(f"transition of {t.state!r} writes wrong tape count")
            for pos in range(self.tape_count):
                # The left marker stays put: re-written in place, never moved past.
                if t.read[pos] == LEFT_MARKER:
                    if t.write[pos] != LEFT_MARKER or t.moves[pos] == "L":
                        raise ValueError("transition would damage the left marker")
                elif t.write[pos] == LEFT_MARKER:
                    raise ValueError("left marker cannot be written elsewhere")
        if self.deterministic:
            seen = set()
            for t in self.transitions:
                key = (t.state, t.read)
                if key in seen:
                    raise ValueError("deterministic machine with a branching state")
                seen.add(key)

    def transition_map(self):
        table = {}
        for t in self.transitions:
            table.setdefault((t.state, t.read), []).append(t)
        return table

    def is_halting(self, state: str) -> bool:
        return state in (self.accept, self.reject)


@dataclass(frozen=True)
class Configuration:
    """Instantaneous description: state, tapes, query tape, answer tape."""

    state: str
    tapes: tuple  # tuple of (content: str, head: int)
    query_tape: str = ""
    answer_tape: Optional[tuple] = None  # (content, head) or None

    def tape_symbol(self, index: int) -> str:
        content, head = self.tapes[index]
        return content[head] if head < len(content) else BLANK

    def answer_symbol(self) -> str:
        content, head = self.answer_tape
        return content[head] if head < len(content) else BLANK


class RunStatus(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class Computation:
    """A sequence of configurations; kind records the validation contract."""

    ids: tuple
    kind: str = "plain"  # plain | oracle-unaware | oracle-aware

    def __len__(self):
        return len(self.ids)


@dataclass(frozen=True)
class Fuel:
    max_steps: int
    max_work_cells: int

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_work_cells <= 0:
            raise ValueError("fuel must be strictly positive")


def initial_configuration(machine: MachineSpec, input_string: str) -> Configuration:
    for ch in input_string:
        if ch not in machine.input_alphabet:
            raise MalformedConfiguration(f"input symbol {ch!r} outside the input alphabet")
    tapes = [(LEFT_MARKER + input_string, 0)]
    for _ in range(machine.tape_count - 1):
        tapes.append((LEFT_MARKER, 0))
    answer = ("", 0) if machine.answer_tape else None
    return Configuration(machine.start, tuple(tapes), "", answer)


def _check_configuration(machine: MachineSpec, cfg: Configuration):
    if cfg.state not in machine.states:
        raise MalformedConfiguration(f"unknown state {cfg.state!r}")
    if len(cfg.tapes) != machine.tape_count:
        raise MalformedConfiguration("tape count mismatch")
    for content, head in cfg.tapes:
        if not content.startswith(LEFT_MARKER):
            raise MalformedConfiguration("tape is missing its left marker")
        if head < 0 or head > len(content):
            raise MalformedConfiguration("head outside the written extent")
        if any(sym not in machine.tape_alphabet for sym in content):
            raise MalformedConfiguration("tape symbol outside the tape alphabet")
    if machine.answer_tape and cfg.answer_tape is None:
        raise MalformedConfiguration("machine expects an answer tape")
    if not machine.answer_tape and cfg.answer_tape is not None:
        raise MalformedConfiguration("machine has no answer tape")


def _write_and_move(content: str, head: int, symbol: str, move: str):
    if head < len(content):
        content = content[:head] + symbol + content[head + 1:]
    else:
        content = content + BLANK * (head - len(content)) + symbol
    head += _MOVES[move]
    if head >= len(content):
        content = content + BLANK * (head - len(content) + 1)
    return content, head


def step(machine: MachineSpec, cfg: Configuration):
    """All legal one-step successors of cfg (excluding oracle submission)."""
    _check_configuration(machine, cfg)
    if machine.is_halting(cfg.state):
        raise HaltedConfiguration(f"configuration is halted in {cfg.state!r}")
    if machine.oracle_capable and cfg.state == machine.query_state:
        raise QueryStateReached("query submission is handled by the oracle runner")
    read = tuple(cfg.tape_symbol(i) for i in range(machine.tape_count))
    if machine.answer_tape:
        read = read + (cfg.answer_symbol(),)
    successors = []
    for t in machine.transition_map().get((cfg.state, read), []):
        tapes = []
        for i in range(machine.tape_count):
            tapes.append(_write_and_move(*cfg.tapes[i], t.write[i], t.moves[i]))
        answer = cfg.answer_tape
        if machine.answer_tape:
            content, head = answer
            head = max(0, head + _MOVES[t.moves[machine.tape_count]])
            answer = (content, head)
        query = cfg.query_tape
        if t.query_write is not None:
            query = query + t.query_write
        successors.append(Configuration(t.next_state, tuple(tapes), query, answer))
    return successors


def _work_cells(cfg: Configuration) -> int:
    return max(len(content) for content, _ in cfg.tapes)


def run(machine: MachineSpec, input_string: str, fuel: Fuel):
    """Exhaustive fuel-bounded run of a non-oracle machine.

    Returns (status, witness) where witness is an accepting Computation when
    status is ACCEPT and None otherwise.  Nondeterminism is resolved by
    exhaustive depth-first search; Accept wins over Exhausted.
    """
    if machine.oracle_capable:
        raise ValueError("run() handles plain machines; use oracles.run_oracle")
    start = initial_configuration(machine, input_string)
    exhausted = False
    stack = [(start, 0, (start,))]
    while stack:
        cfg, steps, path = stack.pop()
        if cfg.state == machine.accept:
            return RunStatus.ACCEPT, Computation(path, "plain")
        if machine.is_halting(cfg.state):
            continue
        if steps >= fuel.max_steps:
            exhausted = True
            continue
        succs = step(machine, cfg)
        if not succs:
            continue  # stuck: halts without accepting
        for nxt in reversed(succs):
            if _work_cells(nxt) > fuel.max_work_cells:
                exhausted = True
                continue
            stack.append((nxt, steps + 1, path + (nxt,)))
    return (RunStatus.EXHAUSTED if exhausted else RunStatus.REJECT), None


def _legal_query_successor(machine: MachineSpec, before: Configuration,
                           after: Configuration) -> bool:
    """Well-formed yes/no successor of a query-state configuration.

    The oracle answer itself is unconstrained; only the shape is checked:
    query tape cleared, standard tapes untouched, and either an answer state
    (adaptive) or the resume state with a fresh answer string (parallel).
    """
    if after.tapes != before.tapes or after.query_tape != "":
        return False
    if machine.answer_tape:
        if after.state != machine.yes_state or after.answer_tape is None:
            return False
        content, head = after.answer_tape
        batch = before.query_tape.split("#")
        return head == 0 and len(content) == len(batch) and set(content) <= {"0", "1"}
    return after.state in (machine.yes_state, machine.no_state) \
        and after.answer_tape == before.answer_tape


def validate_computation(machine: MachineSpec, input_string: str,
                         computation: Computation) -> bool:
    """True iff the sequence starts at the start ID and every adjacent pair is
    a legal successor (oracle answers checked for shape only)."""
    ids = computation.ids
    if not ids:
        return False
    try:
        if ids[0] != initial_configuration(machine, input_string):
            return False
        for before, after in zip(ids, ids[1:]):
            if machine.is_halting(before.state):
                return False
            if machine.oracle_capable and before.state == machine.query_state:
                if computation.kind == "plain":
                    return False
                if not _legal_query_successor(machine, before, after):
                    return False
            elif after not in step(machine, before):
                return False
    except (MalformedConfiguration, HaltedConfiguration, QueryStateReached):
        return False
    return True


def is_complete(machine: MachineSpec, computation: Computation) -> bool:
    """A computation is complete when it ends in a halting or stuck ID."""
    last = computation.ids[-1]
    if machine.is_halting(last.state):
        return True
    if machine.oracle_capable and last.state == machine.query_state:
        return False
    return not step(machine, last)


# -- computation codec -------------------------------------------------------

def _cfg_to_obj(cfg: Configuration):
    return {
        "state": cfg.state,
        "tapes": [[content, head] for content, head in cfg.tapes],
        "query": cfg.query_tape,
        "answer": list(cfg.answer_tape) if cfg.answer_tape is not None else None,
    }


def _cfg_from_obj(obj) -> Configuration:
    answer = tuple(obj["answer"]) if obj["answer"] is not None else None
    return Configuration(obj["state"],
                         tuple((c, h) for c, h in obj["tapes"]),
                         obj["query"], answer)


def encode_computation(computation: Computation) -> str:
    """Computation -> bit string; linear overhead over the ID text."""
    payload = json.dumps({
        "kind": computation.kind,
        "ids": [_cfg_to_obj(cfg) for cfg in computation.ids],
    }, sort_keys=True, separators=(",", ":"))
    return "".join(f"{byte:08b}" for byte in payload.encode("utf-8"))


def decode_computation(bits: str) -> Computation:
    if not bits or set(bits) - {"0", "1"} or len(bits) % 8:
        raise DecodeError("not a byte-aligned bit string")
    data = bytes(int(bits[i:i + 8], 2) for i in range(0, len(bits), 8))
    try:
        obj = json.loads(data.decode("utf-8"))
        ids = tuple(_cfg_from_obj(o) for o in obj["ids"])
        kind = obj["kind"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DecodeError(f"bit string does not decode to a computation: {exc}")
    if kind not in ("plain", "oracle-unaware", "oracle-aware") or not ids:
        raise DecodeError("decoded object is not a computation")
    return Computation(ids, kind)


# -- machine description files ----------------------------------------------

def machine_to_json(machine: MachineSpec) -> str:
    """Render a machine spec in the documented JSON format."""
    obj = {
        "name": machine.name,
        "states": list(machine.states),
        "start": machine.start,
        "accept": machine.accept,
        "reject": machine.reject,
        "tapes": machine.tape_count,
        "input_alphabet": list(machine.input_alphabet),
        "tape_alphabet": list(machine.tape_alphabet),
        "deterministic": machine.deterministic,
        "oracle_capable": machine.oracle_capable,
        "transitions": [
            {
                "state": t.state, "read": list(t.read), "next": t.next_state,
                "write": list(t.write), "move": list(t.moves),
                **({"qwrite": t.query_write} if t.query_write is not None else {}),
            }
            for t in machine.transitions
        ],
    }
    if machine.oracle_capable:
        obj["oracle"] = {
            "query_state": machine.query_state,
            "yes_state": machine.yes_state,
            "no_state": machine.no_state,
            "answer_tape": machine.answer_tape,
        }
    return json.dumps(obj, indent=2, sort_keys=True)


def machine_from_json(text: str) -> MachineSpec:
    obj = json.loads(text)
    oracle = obj.get("oracle", {})
    transitions = tuple(
        Transition(t["state"], tuple(t["read"]), t["next"], tuple(t["write"]),
                   tuple(t["move"]), t.get("qwrite"))
        for t in obj["transitions"]
    )
    return MachineSpec(
        states=tuple(obj["states"]),
        start=obj["start"],
        accept=obj["accept"],
        reject=obj["reject"],
        transitions=transitions,
        tape_count=obj.get("tapes", 1),
        input_alphabet=tuple(obj.get("input_alphabet", ("0", "1"))),
        tape_alphabet=tuple(obj.get("tape_alphabet",
                                    (LEFT_MARKER, BLANK, "0", "1", "#", "$"))),
        deterministic=obj.get("deterministic", False),
        oracle_capable=obj.get("oracle_capable", False),
        query_state=oracle.get("query_state", "q?"),
        yes_state=oracle.get("yes_state", "q_yes"),
        no_state=oracle.get("no_state", "q_no"),
        answer_tape=oracle.get("answer_tape", False),
        name=obj.get("name", ""),
    )
