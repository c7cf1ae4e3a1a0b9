"""Three ways of deciding a Hausdorff language, with query accounting.

* full parallel: one round asking every index up to g(|w|);
* generalized binary search: s rounds of r samples (r+1 in the first round)
  narrowing a space of (r+1)^s indices down to the maximum true index;
* guess-and-check: exhaustive search for an odd boundary index, two queries
  per candidate (the deterministic desk version of the guessing strategy).

All three agree with the parity rule of :mod:`hausdorff` on monotone
predicates; the tri-agreement is an acceptance criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SpaceTooSmall
from .hausdorff import HausdorffPredicate


@dataclass
class QueryBudgetReport:
    rounds_used: int = 0
    queries_per_round: list = field(default_factory=list)
    total_queries: int = 0
    final_base: int = None  # gbs only: the located maximum index

    def record(self, count: int):
        self.rounds_used += 1
        self.queries_per_round.append(count)
        self.total_queries += count

    def consistent(self) -> bool:
        return (len(self.queries_per_round) == self.rounds_used
                and sum(self.queries_per_round) == self.total_queries)


def decide_parallel(predicate: HausdorffPredicate, w: str):
    """Ask all g(|w|) indices in one round; answer by parity of the count."""
    g = predicate.length_for(w)
    report = QueryBudgetReport()
    answers = [predicate.query(w, z) for z in range(1, g + 1)]
    report.record(g)
    return sum(answers) % 2 == 1, report


def decide_gbs(predicate: HausdorffPredicate, w: str, r: int, s: int):
    """Generalized binary search over the index space [1, (r+1)^s].

    First round: r+1 samples starting at index 1 with step (r+1)^(s-1);
    round u >= 2: r samples above the current base with step (r+1)^(s-u).
    Rejects immediately when the very first sample is false; otherwise the
    final base is the maximum true index and its parity is the answer.
    Indices beyond g(|w|) read as false.
    """
    if r < 1 or s < 1:
        raise ValueError("r and s must be >= 1")
    g = predicate.length_for(w)
    space = (r + 1) ** s
    if space < g:
        raise SpaceTooSmall(f"(r+1)^s = {space} < g(|w|) = {g}")
    report = QueryBudgetReport()

    base = 1
    step = (r + 1) ** (s - 1)
    samples = [base + v * step for v in range(r + 1)]
    answers = [predicate.query(w, z) for z in samples]
    report.record(len(samples))
    if not answers[0]:
        report.final_base = 0
        return False, report
    t_max = max(t for t, a in enumerate(answers) if a)
    base = samples[t_max]

    for u in range(2, s + 1):
        step = (r + 1) ** (s - u)
        samples = [base + v * step for v in range(1, r + 1)]
        answers = [predicate.query(w, z) for z in samples]
        report.record(len(samples))
        if answers[0]:
            t_max = max(t for t, a in enumerate(answers) if a)
            base = samples[t_max]

    report.final_base = base
    return base % 2 == 1, report


def decide_guess_check(predicate: HausdorffPredicate, w: str):
    """Exhaustive stand-in for guess-and-check: true iff some odd z in
    [1, g(|w|)] has D(w,z) = 1 and D(w,z+1) = 0 (with D(w,g+1) read as 0).

    Two queries per candidate, mirroring the check a guessing machine makes.
    """
    g = predicate.length_for(w)
    report = QueryBudgetReport()
    found = False
    for z in range(1, g + 1, 2):
        here = predicate.query(w, z)
        beyond = predicate.query(w, z + 1) if z + 1 <= g else False
        report.record(2)
        if here and not beyond:
            found = True
    return found, report
