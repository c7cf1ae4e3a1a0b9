"""Hausdorff predicates and the parity decision rule.

A Hausdorff predicate D is a binary relation on (string, positive index)
pairs with D(w,z) >= D(w,z+1) for all w and z >= 1, paired with a declared
length function g.  A string w is decided by the parity of
|{z : 1 <= z <= g(|w|), D(w,z) = 1}|, equivalently by the parity of the
maximum index at which D is true (0 when there is none).

Backings: an explicit table, a closure, or a decider machine that reads
``w#z`` with z written in binary most significant bit first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import (BudgetExceeded, LengthNotDominating, NotMonotone)
from .machines import Fuel, MachineSpec, RunStatus, run
from .numutil import iexp, poly_eval

#: Indices beyond this are never enumerated by the desk-scale operations.
DEFAULT_INDEX_BUDGET = 1 << 16


@dataclass(frozen=True)
class LengthFunction:
    """g(n): Const{k} | Poly{coefficients} | IExpPoly{i, polynomial}."""

    form: str  # const | poly | iexppoly
    k: int = 0
    coefficients: tuple = ()
    level: int = 0

    def __post_init__(self):
        if self.form not in ("const", "poly", "iexppoly"):
            raise ValueError(f"unknown length form {self.form!r}")
        # Strictly positive and nondecreasing, checked on a sample range.
        values = [self(n) for n in range(0, 9)]
        if any(v < 1 for v in values):
            raise ValueError("length function must be strictly positive")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("length function must be nondecreasing")

    def __call__(self, n: int) -> int:
        if self.form == "const":
            return self.k
        if self.form == "poly":
            return poly_eval(self.coefficients, n)
        return iexp(self.level, poly_eval(self.coefficients, n))

    @staticmethod
    def const(k: int) -> "LengthFunction":
        return LengthFunction("const", k=k)

    @staticmethod
    def poly(*coefficients) -> "LengthFunction":
        return LengthFunction("poly", coefficients=tuple(coefficients))

    @staticmethod
    def iexppoly(level: int, *coefficients) -> "LengthFunction":
        return LengthFunction("iexppoly", coefficients=tuple(coefficients),
                              level=level)


def index_bits(z: int) -> str:
    """Binary rendering of an index, most significant bit first."""
    return format(z, "b")


@dataclass(frozen=True)
class HausdorffPredicate:
    """The pair (D, g): a backing for D plus the declared length g."""

    declared_length: LengthFunction
    table: Optional[frozenset] = None        # set of (w, z) pairs that are 1
    closure: Optional[Callable] = None       # (w, z) -> bool
    machine: Optional[MachineSpec] = None    # decider for "w#z"
    fuel: Optional[Fuel] = None
    name: str = ""

    def __post_init__(self):
        backings = [b is not None for b in (self.table, self.closure, self.machine)]
        if sum(backings) != 1:
            raise ValueError("exactly one backing: table, closure, or machine")
        if self.machine is not None and self.fuel is None:
            raise ValueError("a machine backing needs fuel")

    def value(self, w: str, z: int) -> bool:
        """Raw backing value at index z >= 1 (no length clamp)."""
        if z < 1:
            raise ValueError("Hausdorff indices are 1-based")
        if self.table is not None:
            return (w, z) in self.table
        if self.closure is not None:
            return bool(self.closure(w, z))
        status, _ = run(self.machine, f"{w}#{index_bits(z)}", self.fuel)
        if status == RunStatus.EXHAUSTED:
            raise BudgetExceeded("predicate machine ran out of fuel")
        return status == RunStatus.ACCEPT

    def query(self, w: str, z: int) -> bool:
        """Backing value clamped to the declared length: 0 beyond g(|w|)."""
        if z > self.declared_length(len(w)):
            return False
        return self.value(w, z)

    def length_for(self, w: str) -> int:
        g = self.declared_length(len(w))
        if g > DEFAULT_INDEX_BUDGET:
            raise BudgetExceeded(f"g(|w|) = {g} exceeds the index budget")
        return g


def check_monotone(predicate: HausdorffPredicate, w: str) -> bool:
    """True iff D(w,z) >= D(w,z+1) over 1 <= z < g(|w|)."""
    g = predicate.length_for(w)
    previous = True
    for z in range(1, g + 1):
        current = predicate.value(w, z)
        if current and not previous:
            return False
        previous = current
    return True


def max_index(predicate: HausdorffPredicate, w: str) -> int:
    """max(0, sup{z : 1 <= z <= g(|w|), D(w,z) = 1}), the maximum Hausdorff
    index of w.  Raises NotMonotone when the monotonicity check fails."""
    if not check_monotone(predicate, w):
        raise NotMonotone(f"predicate {predicate.name or ''!r} is not monotone on {w!r}")
    g = predicate.length_for(w)
    best = 0
    for z in range(1, g + 1):
        if predicate.value(w, z):
            best = z
        else:
            break
    return best


def decide(predicate: HausdorffPredicate, w: str) -> bool:
    """Parity rule: w is in the language iff the count of true indices is odd."""
    return max_index(predicate, w) % 2 == 1


def co_decide(predicate: HausdorffPredicate, w: str) -> bool:
    return not decide(predicate, w)


def count_true(predicate: HausdorffPredicate, w: str) -> int:
    """Direct count of true indices; equals max_index for monotone D."""
    g = predicate.length_for(w)
    return sum(1 for z in range(1, g + 1) if predicate.value(w, z))


def extend_length(predicate: HausdorffPredicate,
                  new_length: LengthFunction,
                  sample_range=range(0, 9)) -> HausdorffPredicate:
    """D'(w,z) = D(w,z) for z <= g(|w|), else 0, declared at new_length.

    The new length must dominate the old one pointwise on the sample range;
    the decision is preserved for every w.
    """
    old = predicate.declared_length
    for n in sample_range:
        if new_length(n) < old(n):
            raise LengthNotDominating(
                f"new length {new_length(n)} < old {old(n)} at n={n}")

    def padded(w, z):
        if z > old(len(w)):
            return False
        return predicate.value(w, z)

    return HausdorffPredicate(declared_length=new_length, closure=padded,
                              name=f"{predicate.name}+ext")


def effective_length_bound(predicate: HausdorffPredicate, bit_budget: int,
                           probe_words=()) -> int:
    """Index ceiling 2**bit_budget for a machine reading at most bit_budget
    bits of z: beyond it, indices sharing a first-bits window are aliases.

    For each probe word, indices of equal bit-width agreeing on their first
    bit_budget bits are probed for equal values; a distinguished pair raises.
    """
    if bit_budget < 0:
        raise ValueError("bit budget must be >= 0")
    ceiling = 1 << bit_budget
    for w in probe_words:
        for width in (bit_budget + 1, bit_budget + 2):
            tail = width - bit_budget  # low bits the machine cannot reach
            first = (1 << (bit_budget - 1)) if bit_budget else 0
            for prefix in range(first, 1 << bit_budget):
                lo = max(prefix << tail, 1)
                hi = (prefix << tail) + (1 << tail) - 1
                reference = predicate.value(w, lo)
                for z in range(lo + 1, hi + 1):
                    if predicate.value(w, z) != reference:
                        raise NotMonotone(
                            "probe found indices distinguished beyond the bit budget")
    return ceiling


def table_predicate(rows, length: LengthFunction, name="") -> HausdorffPredicate:
    """Build a table-backed predicate from (w, z) pairs that evaluate to 1."""
    return HausdorffPredicate(declared_length=length, table=frozenset(rows),
                              name=name)


def threshold_predicate(thresholds, length: LengthFunction, name="") -> HausdorffPredicate:
    """Step predicate: D(w,z) = 1 iff z <= thresholds[w] (missing w: 0)."""
    frozen = dict(thresholds)
    return HausdorffPredicate(
        declared_length=length,
        closure=lambda w, z: z <= frozen.get(w, 0),
        name=name)


def load_predicate_table(text: str, length: LengthFunction, name="") -> HausdorffPredicate:
    """Parse the ``w z bit`` line format ('-' denotes the empty string)."""
    rows = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'w z bit'")
        w = "" if parts[0] == "-" else parts[0]
        z, bit = int(parts[1]), parts[2]
        if bit not in ("0", "1"):
            raise ValueError(f"line {lineno}: bit must be 0 or 1")
        if bit == "1":
            rows.add((w, z))
    return table_predicate(rows, length, name=name)


def dump_predicate_table(predicate: HausdorffPredicate, words) -> str:
    lines = []
    for w in words:
        g = predicate.length_for(w)
        for z in range(1, g + 1):
            bit = "1" if predicate.value(w, z) else "0"
            lines.append(f"{w or '-'} {z} {bit}")
    return "\n".join(lines) + "\n"
