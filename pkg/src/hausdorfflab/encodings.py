"""Formula constructions over Boolean function variables: the arithmetic
gadget mu^u, the machine-computation encoding with certificate quantifiers,
and the three hardness reductions (lexicographic-maximum bit, maximum-weight
parity, lexicographic-maximum function bit).

Internally every construction is a list of clauses over function atoms whose
arguments are propositional variables or constants; the clause list is both
rendered into a :class:`hausdorfflab.qbsf.Formula` and consumed directly by
the evaluator.  Evaluating these formulas by generic table enumeration is
hopeless (a single encoding function of arity 5 already spans 2^32 tables),
so the evaluator enumerates certificate tables exhaustively and derives the
computation-encoding tables by unit propagation over the ground clauses; the
start/step/halt clauses force those tables uniquely for a deterministic
machine, and the derivation conflicts exactly when no assignment exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .errors import BudgetExceeded, ConstructionError, MachineTooLarge
from .machines import BLANK, LEFT_MARKER, Fuel, MachineSpec, RunStatus, run
from .qbsf import (And, App, Block, Const, Formula, Interpretation, Not, Or,
                   Prop, TruthTable)

# -- clause intermediate representation --------------------------------------

CONST0 = ("c", False)
CONST1 = ("c", True)


def var(name):
    return ("v", name)


def group(prefix, width):
    """Variable group, most significant bit first: prefix<width-1> .. prefix0."""
    return tuple(var(f"{prefix}{i}") for i in range(width - 1, 0 - 1, -1))


def cbits(value, width):
    """Constant bits of value, most significant first."""
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} not representable in {width} bits")
    return tuple(("c", bool(int(b))) for b in format(value, f"0{width}b"))


def pad(args, width):
    """Left-pad an argument tuple with constant-false bits."""
    if len(args) > width:
        raise ValueError("argument group wider than the target width")
    return tuple([CONST0] * (width - len(args))) + tuple(args)


@dataclass(frozen=True)
class Lit:
    positive: bool
    func: str
    args: tuple


def pos(func, *parts):
    return Lit(True, func, tuple(itertools.chain(*parts)))


def neg(func, *parts):
    return Lit(False, func, tuple(itertools.chain(*parts)))


@dataclass(frozen=True)
class Clause:
    literals: tuple
    tag: str = ""

    def variables(self):
        names = []
        for lit in self.literals:
            for kind, value in lit.args:
                if kind == "v" and value not in names:
                    names.append(value)
        return names


def clause(*literals, tag=""):
    return Clause(tuple(literals), tag)


def _atom_node(lit: Lit, prop_atoms=()):
    if not lit.args and lit.func in prop_atoms:
        return Prop(lit.func)
    args = tuple(Const(v) if k == "c" else Prop(v) for k, v in lit.args)
    return App(lit.func, args)


def clauses_to_matrix(clauses, prop_atoms=()):
    items = []
    for cl in clauses:
        lits = []
        for lit in cl.literals:
            atom = _atom_node(lit, prop_atoms)
            lits.append(atom if lit.positive else Not(atom))
        items.append(lits[0] if len(lits) == 1 else Or(tuple(lits)))
    return items[0] if len(items) == 1 else And(tuple(items))


# -- intended arithmetic tables ----------------------------------------------

def _tuple_of(value, width):
    return tuple(bool(int(b)) for b in format(value, f"0{width}b"))


def intended_tables(u):
    """The arithmetic instantiation of succ/maj/neq/add/hw at width u,
    as sets of true argument tuples."""
    ww = weight_width(u)
    succ = {_tuple_of(a, u) + _tuple_of(a + 1, u) for a in range(2 ** u - 1)}
    maj = {_tuple_of(a, u) + _tuple_of(b, u)
           for a in range(2 ** u) for b in range(2 ** u) if a < b}
    neq = {_tuple_of(a, u) + _tuple_of(b, u)
           for a in range(2 ** u) for b in range(2 ** u) if a != b}
    add = {_tuple_of(a, u) + _tuple_of(b, u) + _tuple_of(a + b, u)
           for a in range(2 ** u) for b in range(2 ** u) if a + b < 2 ** u}
    hw = set()
    for a in range(2 ** u):
        bits = _tuple_of(a, u)
        hw.add(bits + _tuple_of(sum(bits), ww))
    return {"succ": succ, "maj": maj, "neq": neq, "add": add, "hw": hw}


def weight_width(u):
    return (u.bit_length() - 1) + 1  # floor(log2 u) + 1


MU_FUNCTIONS = ("succ", "maj", "neq", "add", "hw")


def mu_arities(u):
    return {"succ": 2 * u, "maj": 2 * u, "neq": 2 * u, "add": 3 * u,
            "hw": u + weight_width(u)}


# -- the mu^u clause families --------------------------------------------------

@dataclass(frozen=True)
class MuSpec:
    u: int

    def __post_init__(self):
        if self.u < 1:
            raise ValueError("bit width must be >= 1")


def mu_clauses(u, prefixes=("a", "b", "c", "d", "e")):
    """CNF families defining successor, majority, inequality, addition and
    Hamming weight recursively over the bit levels; polynomially many clauses
    in u, each with at most four literals."""
    a, b, c, d, e = (group(p, u) for p in prefixes)
    ww = weight_width(u)
    bl, cl = b[-ww:], c[-ww:]
    out = []

    # successor, level 1
    zeros = tuple([CONST0] * (u - 1))
    out.append(clause(pos("succ", zeros, (CONST0,), zeros, (CONST1,)), tag="S"))
    out.append(clause(neg("succ", zeros, (CONST0,), zeros, (CONST0,)), tag="S"))
    out.append(clause(neg("succ", zeros, (CONST1,), zeros, (CONST0,)), tag="S"))
    out.append(clause(neg("succ", zeros, (CONST1,), zeros, (CONST1,)), tag="S"))

    # successor, levels 2..u
    for i in range(2, u + 1):
        z = tuple([CONST0] * (u - i))
        al, bhl = a[-(i - 1):], b[-(i - 1):]
        low0 = (CONST0,)
        low1 = (CONST1,)
        out.append(clause(
            neg("succ", z, low0, al, z, low0, bhl),
            pos("succ", z, low1, al, z, low1, bhl), tag="S"))
        out.append(clause(
            pos("succ", z, low0, al, z, low0, bhl),
            neg("succ", z, low1, al, z, low1, bhl), tag="S"))
        ones = tuple([CONST1] * (i - 1))
        zlow = tuple([CONST0] * (i - 1))
        out.append(clause(pos("succ", z, low0, ones, z, low1, zlow), tag="S"))
        for j in range(i - 1):
            a_hole = list(al)
            a_hole[(i - 2) - j] = CONST0
            out.append(clause(
                neg("succ", z, low0, tuple(a_hole), z, low1, bhl), tag="S"))
            b_hole = list(bhl)
            b_hole[(i - 2) - j] = CONST1
            out.append(clause(
                neg("succ", z, low0, al, z, low1, tuple(b_hole)), tag="S"))
        out.append(clause(neg("succ", z, low1, al, z, low0, bhl), tag="S"))

    # majority from successor
    out.append(clause(neg("succ", a, b), pos("maj", a, b), tag="M"))
    out.append(clause(neg("maj", a, b), neg("succ", b, c), pos("maj", a, c), tag="M"))
    out.append(clause(neg("maj", a, b), neg("maj", b, a), tag="M"))

    # inequality from majority
    out.append(clause(neg("maj", a, b), pos("neq", a, b), tag="D"))
    out.append(clause(neg("maj", a, b), pos("neq", b, a), tag="D"))
    out.append(clause(neg("neq", a, a), tag="D"))

    # addition from successor and inequality
    zero_u = tuple([CONST0] * u)
    out.append(clause(pos("add", a, zero_u, a), tag="A"))
    out.append(clause(neg("neq", a, c), neg("add", a, zero_u, c), tag="A"))
    out.append(clause(neg("add", a, b, c), neg("succ", b, d), neg("succ", c, e),
                      pos("add", a, d, e), tag="A"))
    out.append(clause(neg("add", a, b, c), neg("neq", c, d),
                      neg("add", a, b, d), tag="A"))

    # Hamming weight from successor and inequality
    zeros1 = tuple([CONST0] * (u - 1))
    out.append(clause(pos("hw", zeros1, (CONST0,), cbits(0, ww)), tag="W"))
    out.append(clause(pos("hw", zeros1, (CONST1,), cbits(1, ww)), tag="W"))
    a0 = (a[-1],)
    out.append(clause(neg("hw", zeros1, a0, bl), neg("neq", pad(bl, u), pad(cl, u)),
                      neg("hw", zeros1, a0, cl), tag="W"))
    for i in range(2, u + 1):
        z = tuple([CONST0] * (u - i))
        al = a[-(i - 1):]
        afull = a[-i:]
        out.append(clause(
            neg("hw", z, (CONST0,), al, bl),
            neg("succ", pad(bl, u), pad(cl, u)),
            pos("hw", z, (CONST1,), al, cl), tag="W"))
        out.append(clause(
            neg("hw", z, afull, bl),
            neg("neq", pad(bl, u), pad(cl, u)),
            neg("hw", z, afull, cl), tag="W"))

    return out


def build_mu(spec: MuSpec) -> Formula:
    """Quantifier-free CNF over the five arithmetic function variables; the
    intended instantiation satisfies its universal closure."""
    if spec.u > 8:
        raise BudgetExceeded("mu width above the desk budget")
    return Formula((), clauses_to_matrix(mu_clauses(spec.u)))


# -- clause checking against fixed tables --------------------------------------

def _literal_value(lit, tables, assignment):
    entry = []
    for kind, value in lit.args:
        entry.append(value if kind == "c" else assignment[value])
    truth = tuple(entry) in tables[lit.func]
    return truth if lit.positive else not truth


def _iter_consistent(lit, table, binding):
    """Bindings extending `binding` that make the known atom TRUE."""
    for entry in table:
        new = dict(binding)
        ok = True
        for (kind, value), bit in zip(lit.args, entry):
            if kind == "c":
                if value != bit:
                    ok = False
                    break
            elif value in new:
                if new[value] != bit:
                    ok = False
                    break
            else:
                new[value] = bit
        if ok:
            yield new



def _complement(table, arity):
    return [entry for entry in itertools.product((False, True), repeat=arity)
            if entry not in table]


def holds_everywhere(cl: Clause, tables, arities) -> bool:
    """True iff the clause is satisfied under every assignment of its
    variables, with all functions interpreted by the given tables."""
    return not list(_violations(cl, tables, arities, limit=1))


def _violations(cl: Clause, tables, arities, limit=None):
    """Assignments under which every literal of the clause is false.

    Join-style search: literals over the fixed tables are processed first,
    iterating only the entries that make them false (true entries for a
    negative literal, complement entries for a positive one)."""
    known = [lit for lit in cl.literals if lit.func in tables]
    count = 0

    def relevant(lit):
        if lit.positive:
            return _complement(tables[lit.func], arities[lit.func])
        return tables[lit.func]

    ordered = sorted(known, key=lambda lit: len(relevant(lit)))

    def descend(index, binding):
        nonlocal count
        if limit is not None and count >= limit:
            return
        if index == len(ordered):
            free = [v for v in cl.variables() if v not in binding]
            for combo in itertools.product((False, True), repeat=len(free)):
                full = dict(binding)
                full.update(zip(free, combo))
                if all(v in full for v in cl.variables()):
                    if not any(_literal_value(lit, tables, full)
                               for lit in cl.literals):
                        count += 1
                        yield full
                        if limit is not None and count >= limit:
                            return
            return
        lit = ordered[index]
        for new in _iter_consistent(
                lit, relevant(lit), binding):
            yield from descend(index + 1, new)

    yield from descend(0, {})


def verify_intended_mu(u) -> bool:
    """The intended arithmetic tables satisfy the universal closure of mu^u."""
    tables = intended_tables(u)
    arities = mu_arities(u)
    return all(holds_everywhere(cl, tables, arities) for cl in mu_clauses(u))


def audit_mu_models(u=1, budget=2 ** 22):
    """Exhaustive model audit of mu^u (meant for u = 1).

    Enumerates every instantiation of the five functions satisfying the
    universal closure, staged family by family (each family constrains one
    new function, so the staged product is the exact model set).  Returns the
    model count, the entries forced to a single value across all models with
    any disagreements against the arithmetic tables, and the unconstrained
    entries (reported, not judged)."""
    families = [("succ", ("S",), ()), ("maj", ("M",), ("succ",)),
                ("neq", ("D",), ("maj",)), ("add", ("A",), ("neq", "succ")),
                ("hw", ("W",), ("neq", "succ"))]
    all_clauses = mu_clauses(u)
    arities = mu_arities(u)
    intended = intended_tables(u)

    def candidates(func):
        arity = arities[func]
        if (1 << (1 << arity)) > budget:
            raise BudgetExceeded(f"{func}/{arity} has too many tables to audit")
        for mask in range(1 << (1 << arity)):
            yield {entry for index, entry in enumerate(
                itertools.product((False, True), repeat=arity))
                if (mask >> index) & 1}

    models = []

    def stage(index, chosen):
        if index == len(families):
            models.append(dict(chosen))
            if len(models) > budget:
                raise BudgetExceeded("model count exceeded the audit budget")
            return
        func, tags, _ = families[index]
        relevant = [cl for cl in all_clauses if cl.tag in tags]
        for table in candidates(func):
            trial = dict(chosen)
            trial[func] = table
            if all(holds_everywhere(cl, trial, arities) for cl in relevant):
                stage(index + 1, trial)

    stage(0, {})

    forced = {}
    mismatches = []
    unconstrained = []
    for func in MU_FUNCTIONS:
        arity = arities[func]
        for entry in itertools.product((False, True), repeat=arity):
            values = {entry in model[func] for model in models}
            if len(values) == 1:
                value = values.pop()
                forced[(func, entry)] = value
                if value != (entry in intended[func]):
                    mismatches.append((func, entry))
            else:
                unconstrained.append((func, entry))
    return {
        "models": len(models),
        "forced": forced,
        "mismatches": mismatches,
        "unconstrained": unconstrained,
    }


# -- machine-computation encoding ----------------------------------------------

INPUT_CODES = {"0": 0, "1": 1, "#": 2}
INPUT_SYMBOL_WIDTH = 2


@dataclass(frozen=True)
class MachineEncodingSpec:
    """A single-tape deterministic total decider together with the window
    parameters of its encoding.

    The decider reads one tape laid out as marker, the m symbols of ``w#z``
    (z written with fixed width, most significant bit first), then k
    certificate blocks of cert_length binary symbols each, then blanks.  It
    must halt in accept or reject within T-2 steps without leaving the
    window.  Certificate blocks alternate exists/forall starting with
    exists; the machine-encoding formula is satisfied by an interpretation
    consistently encoding ``w#z`` on the free function exactly when the
    certificate-quantified run accepts.
    """

    machine: MachineSpec
    n: int              # |w|
    m: int              # |w#z|
    T: int              # tape window = step bound + 2; a power of two
    k: int = 1          # number of certificate blocks
    cert_length: int = 1  # symbols per certificate; a power of two
    str_name: str = "str"
    mu_width: Optional[int] = None

    def __post_init__(self):
        if self.T < 4 or self.T & (self.T - 1):
            raise ValueError("T must be a power of two, at least 4")
        if self.cert_length < 1 or self.cert_length & (self.cert_length - 1):
            raise ValueError("cert_length must be a power of two")
        if self.k < 1:
            raise ValueError("at least one certificate block")
        if self.machine.tape_count != 1 or self.machine.oracle_capable:
            raise ValueError("the encoded decider must be a plain single-tape machine")
        if not self.machine.deterministic:
            raise ValueError("the encoded decider must be deterministic")
        if self.m <= self.n:
            raise ValueError("m must cover w, '#', and at least one index bit")
        if 1 + self.m + self.k * self.cert_length > self.T:
            raise MachineTooLarge("input and certificates do not fit the window")

    @property
    def p(self) -> int:
        return self.T.bit_length() - 1

    @property
    def z_width(self) -> int:
        return self.m - self.n - 1

    @property
    def cert_arity(self) -> int:
        return self.cert_length.bit_length() - 1

    @property
    def last_quantifier(self) -> str:
        return "E" if self.k % 2 == 1 else "A"

    @property
    def math_width(self) -> int:
        return self.mu_width if self.mu_width is not None else self.p

    @property
    def state_width(self) -> int:
        return max(1, (len(self.machine.states) - 1).bit_length())

    @property
    def symbol_width(self) -> int:
        return max(1, (len(self.machine.tape_alphabet) - 1).bit_length())

    @property
    def pos_width(self) -> int:
        return max(1, (self.m - 1).bit_length())

    def state_code(self, state):
        return self.machine.states.index(state)

    def symbol_code(self, symbol):
        return self.machine.tape_alphabet.index(symbol)

    def cert_cell(self, block_index, offset):
        """Tape cell of certificate block block_index (1-based) at offset."""
        return self.m + 1 + (block_index - 1) * self.cert_length + offset

    @property
    def first_blank(self) -> int:
        return self.m + 1 + self.k * self.cert_length


def machine_clauses(spec: MachineEncodingSpec, w: Optional[str] = None):
    """The consistency / start / next-move / finish clause families.

    When w is given, the per-position input clauses tie the tape directly to
    the symbols of w and only the index part is copied from the free string
    function; otherwise the whole ``w#z`` window is copied from it.
    Returns (clauses, finish_clause).
    """
    machine = spec.machine
    p, u = spec.p, spec.math_width
    i, i2 = group("i", p), group("i'", p)
    j, j2 = group("j", p), group("j'", p)
    kk, kk2 = group("k", spec.state_width), group("k'", spec.state_width)
    l, l2 = group("l", spec.symbol_width), group("l'", spec.symbol_width)
    sy, sy2 = group("s", INPUT_SYMBOL_WIDTH), group("s'", INPUT_SYMBOL_WIDTH)
    jy = group("u", spec.pos_width)
    out = []

    def scode(symbol):
        return cbits(spec.symbol_code(symbol), spec.symbol_width)

    def qcode(state):
        return cbits(spec.state_code(state), spec.state_width)

    # string-function consistency: at most one symbol per input position
    out.append(clause(
        neg("neq", pad(sy, u), pad(sy2, u)),
        neg(spec.str_name, jy, sy), neg(spec.str_name, jy, sy2), tag="cons"))

    # consistency of the computation tables (at most one value per group)
    out.append(clause(neg("neq", pad(kk, u), pad(kk2, u)),
                      neg("q", i, kk), neg("q", i, kk2), tag="C"))
    out.append(clause(neg("neq", pad(j, u), pad(j2, u)),
                      neg("h", i, j), neg("h", i, j2), tag="C"))
    out.append(clause(neg("neq", pad(l, u), pad(l2, u)),
                      neg("t", i, j, l), neg("t", i, j, l2), tag="C"))

    # start correct
    out.append(clause(pos("q", cbits(0, p), qcode(machine.start)), tag="S"))
    out.append(clause(pos("h", cbits(0, p), cbits(0, p)), tag="S"))
    out.append(clause(pos("t", cbits(0, p), cbits(0, p), scode(LEFT_MARKER)), tag="S"))
    for position in range(spec.m):
        cell = cbits(position + 1, p)
        if w is not None and position < len(w):
            out.append(clause(pos("t", cbits(0, p), cell, scode(w[position])), tag="S"))
        elif w is not None and position == len(w):
            out.append(clause(pos("t", cbits(0, p), cell, scode("#")), tag="S"))
        else:
            spot = cbits(position, spec.pos_width)
            for symbol, code in INPUT_CODES.items():
                out.append(clause(
                    neg(spec.str_name, spot, cbits(code, INPUT_SYMBOL_WIDTH)),
                    pos("t", cbits(0, p), cell, scode(symbol)), tag="S"))
                out.append(clause(
                    pos(spec.str_name, spot, cbits(code, INPUT_SYMBOL_WIDTH)),
                    neg("t", cbits(0, p), cell, scode(symbol)), tag="S"))
    for block_index in range(1, spec.k + 1):
        for offset in range(spec.cert_length):
            cell = cbits(spec.cert_cell(block_index, offset), p)
            args = cbits(offset, spec.cert_arity) if spec.cert_arity else ()
            name = f"cert{block_index}"
            out.append(clause(neg(name, args), pos("t", cbits(0, p), cell, scode("1")),
                              tag="S"))
            out.append(clause(pos(name, args), pos("t", cbits(0, p), cell, scode("0")),
                              tag="S"))
    for cell in range(spec.first_blank, spec.T):
        out.append(clause(pos("t", cbits(0, p), cbits(cell, p), scode(BLANK)), tag="S"))

    # next move correct: unwritten cells persist
    out.append(clause(neg("succ", pad(i, u), pad(i2, u)), neg("t", i, j, l),
                      pos("h", i, j), pos("t", i2, j, l), tag="N"))
    # next move correct: the transition function
    for rule in machine.transitions:
        premise = [neg("succ", pad(i, u), pad(i2, u)),
                   neg("q", i, qcode(rule.state)), neg("h", i, j),
                   neg("t", i, j, scode(rule.read[0]))]
        move = rule.moves[0]
        if move == "R":
            premise.append(neg("succ", pad(j, u), pad(j2, u)))
            head_after = j2
        elif move == "L":
            premise.append(neg("succ", pad(j2, u), pad(j, u)))
            head_after = j2
        else:
            head_after = j
        for consequent in (pos("q", i2, qcode(rule.next_state)),
                           pos("h", i2, head_after),
                           pos("t", i2, j, scode(rule.write[0]))):
            out.append(Clause(tuple(premise + [consequent]), "N"))
    # halting states persist (accept and reject alike)
    for halt in (machine.accept, machine.reject):
        base = [neg("succ", pad(i, u), pad(i2, u)), neg("q", i, qcode(halt))]
        out.append(Clause(tuple(base + [pos("q", i2, qcode(halt))]), "N"))
        out.append(Clause(tuple(base + [neg("h", i, j), pos("h", i2, j)]), "N"))
        out.append(Clause(tuple(base + [neg("t", i, j, l), pos("t", i2, j, l)]), "N"))

    finish = clause(pos("q", cbits(spec.T - 1, p), qcode(machine.accept)), tag="E")
    return out, finish


#: Clause tags that force the computation tables (dualized when those tables
#: are universally quantified); everything else is a standing constraint.
FORCING_TAGS = ("C", "S", "N")


def _negated_term(cl: Clause, prop_atoms=()):
    lits = []
    for lit in cl.literals:
        atom = _atom_node(lit, prop_atoms)
        lits.append(Not(atom) if lit.positive else atom)
    return lits[0] if len(lits) == 1 else And(tuple(lits))


def assemble_encoding_formula(spec: MachineEncodingSpec, clauses, finish,
                              guard: Optional[Lit] = None,
                              prop_atoms=(), universal_props=(),
                              cnf_dual: bool = False,
                              cnf_clause_cap: int = 5000) -> Formula:
    """Quantifier prefix + matrix for an encoding-style clause set.

    Odd k: the computation tables sit under the last existential block and
    the matrix is the plain clause conjunction, in CNF (a guard literal, when
    given, is disjoined into every forcing clause and the finish clause).

    Even k: the last certificate and the computation tables are universally
    quantified, the index variables flip to existential, and the forcing
    families appear dualized: negated-clause terms disjoined with the
    acceptance literal.  The dual stays in that shape unless cnf_dual is set,
    in which case it is distributed into CNF, failing loudly past the cap.

    prop_atoms names zero-argument IR atoms that render as propositions
    (free guard variables); universal_props lists gadget variables that stay
    universally quantified in both parities."""
    u = spec.math_width
    arg_names = []
    for prefix_name in ("a", "b", "c", "d", "e"):
        arg_names += [v for _, v in group(prefix_name, u)]
    mu_part = mu_clauses(u)
    table_funcs = (("q", spec.p + spec.state_width),
                   ("h", 2 * spec.p),
                   ("t", 2 * spec.p + spec.symbol_width))
    math_funcs = tuple((f, mu_arities(u)[f]) for f in MU_FUNCTIONS)
    cert_funcs = [(f"cert{index}", spec.cert_arity)
                  for index in range(1, spec.k + 1)]

    index_vars = []
    for cl in clauses:
        for name in cl.variables():
            if name not in arg_names and name not in universal_props \
                    and name not in index_vars:
                index_vars.append(name)

    forcing = [cl for cl in clauses if cl.tag in FORCING_TAGS]
    standing = [cl for cl in clauses if cl.tag not in FORCING_TAGS]
    render = lambda items: clauses_to_matrix(items, prop_atoms=prop_atoms)

    prefix = [Block("E", functions=math_funcs + (cert_funcs[0],))]
    for index, func in enumerate(cert_funcs[1:-1], start=2):
        prefix.append(Block("E" if index % 2 == 1 else "A", functions=(func,)))

    if spec.last_quantifier == "E":
        last = (cert_funcs[-1],) if spec.k > 1 else ()
        prefix.append(Block("E", functions=last + table_funcs))
        prefix.append(Block("A", props=tuple(list(universal_props) + arg_names
                                             + index_vars)))
        guarded = []
        for cl in forcing + [finish]:
            lits = cl.literals if guard is None else ((guard,) + cl.literals)
            guarded.append(Clause(lits, cl.tag))
        matrix = render(mu_part + standing + guarded)
        return Formula(tuple(prefix), matrix)

    prefix.append(Block("A", functions=(cert_funcs[-1],) + table_funcs))
    prefix.append(Block("A", props=tuple(list(universal_props) + arg_names)))
    prefix.append(Block("E", props=tuple(index_vars)))
    dual_items = tuple(_negated_term(cl, prop_atoms) for cl in forcing) \
        + (render([finish]),)
    if guard is not None:
        dual_items = (_negated_term(Clause((_flip(guard),)), prop_atoms),) \
            + dual_items
    if cnf_dual:
        dual = _distribute_to_cnf(dual_items, cnf_clause_cap)
    else:
        dual = Or(dual_items)
    matrix = And((render(mu_part + standing), dual))
    return Formula(tuple(prefix), matrix)


def _flip(lit: Lit) -> Lit:
    return Lit(not lit.positive, lit.func, lit.args)


def _distribute_to_cnf(terms, cap: int):
    """DNF -> CNF by distribution, failing loudly past the clause cap.

    Concrete machines blow the cap almost immediately: the product of the
    term sizes is what the distribution produces."""
    clauses = [()]
    for term in terms:
        lits = term.items if isinstance(term, And) else (term,)
        clauses = [cl + (lit,) for cl in clauses for lit in lits]
        if len(clauses) > cap:
            raise BudgetExceeded(
                f"CNF distribution exceeds {cap} clauses; keep the dual form")
    return And(tuple(Or(cl) if len(cl) > 1 else cl[0] for cl in clauses))
