"""Second-order quantified Boolean formulas: prenex simple syntax, parsing,
brute-force semantics, prefix classification, orders on interpretations, and
the function-merging rewrite.

Text format
-----------
Quantifier blocks come first, each ended by a period: ``E f/2.`` declares an
existential function variable of arity 2, ``A x y.`` a universal block of
propositional variables.  Function blocks precede propositional blocks
(prenex simple).  The matrix uses ``~ & | -> <->``, constants ``0 1``, and
function applications ``f(x,0,y)`` whose arguments are propositional
variables or constants (no nesting).  Undeclared symbols in the matrix are
free variables; free function arities are inferred from use.

Example::

    E f/2. A x y. f(x,y) | ~x

Interpretations map function variables to truth tables (bits listed in
unfolding order, lexicographically greatest argument tuple first) and
propositional variables to booleans.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import (ArityMismatch, BudgetExceeded, FormulaSyntaxError,
                     OrderMismatch, Unsatisfiable)

MAX_SO_ARITY = 3
MAX_TABLE_BITS = 24


# -- abstract syntax ----------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: tuple  # Prop or Const


@dataclass(frozen=True)
class Not:
    sub: object


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Block:
    quantifier: str          # 'E' or 'A'
    functions: tuple = ()    # ((name, arity), ...)
    props: tuple = ()        # (name, ...)

    @property
    def second_order(self) -> bool:
        return bool(self.functions)


@dataclass(frozen=True)
class Formula:
    prefix: tuple
    matrix: object

    def __post_init__(self):
        seen_fo = False
        declared = set()
        for block in self.prefix:
            if block.functions and block.props:
                raise ValueError("blocks mix function and propositional variables")
            if not block.functions and not block.props:
                raise ValueError("empty quantifier block")
            if block.second_order and seen_fo:
                raise ValueError("function blocks must precede propositional blocks")
            if not block.second_order:
                seen_fo = True
            for name, _ in block.functions:
                if name in declared:
                    raise ValueError(f"variable {name!r} bound twice")
                declared.add(name)
            for name in block.props:
                if name in declared:
                    raise ValueError(f"variable {name!r} bound twice")
                declared.add(name)
        _free_variables(self.matrix, declared)  # checks free-arity consistency
        bound_arities = {}
        for block in self.prefix:
            bound_arities.update(dict(block.functions))
        bound_props = {n for block in self.prefix for n in block.props}
        _check_bound_usage(self.matrix, bound_arities, bound_props)

    def bound_names(self):
        names = set()
        for block in self.prefix:
            names.update(name for name, _ in block.functions)
            names.update(block.props)
        return names

    def free_variables(self):
        """(free function name -> arity, ordered free prop names)."""
        return _free_variables(self.matrix, self.bound_names())


def _check_bound_usage(node, bound_arities, bound_props):
    def walk(n):
        if isinstance(n, App):
            if n.func in bound_props:
                raise ArityMismatch(f"{n.func!r} is a proposition, not a function")
            if n.func in bound_arities and bound_arities[n.func] != len(n.args):
                raise ArityMismatch(
                    f"{n.func!r} declared /{bound_arities[n.func]}, used /{len(n.args)}")
            for a in n.args:
                walk(a)
        elif isinstance(n, Prop):
            if n.name in bound_arities:
                raise ArityMismatch(f"{n.name!r} is a function, not a proposition")
        elif isinstance(n, Not):
            walk(n.sub)
        elif isinstance(n, (And, Or)):
            for item in n.items:
                walk(item)
        elif isinstance(n, (Implies, Iff)):
            walk(n.left)
            walk(n.right)

    walk(node)


def _free_variables(node, bound):
    functions: dict = {}
    props: list = []

    def walk(n):
        if isinstance(n, Const):
            return
        if isinstance(n, Prop):
            if n.name not in bound and n.name not in props:
                props.append(n.name)
            return
        if isinstance(n, App):
            for a in n.args:
                walk(a)
            if n.func in bound:
                return
            arity = len(n.args)
            if functions.setdefault(n.func, arity) != arity:
                raise ArityMismatch(
                    f"{n.func} used with arities {functions[n.func]} and {arity}")
            return
        if isinstance(n, Not):
            walk(n.sub)
        elif isinstance(n, (And, Or)):
            for item in n.items:
                walk(item)
        elif isinstance(n, (Implies, Iff)):
            walk(n.left)
            walk(n.right)
        else:
            raise TypeError(f"not a formula node: {n!r}")

    walk(node)
    return functions, props


# -- truth tables and interpretations ----------------------------------------

@dataclass(frozen=True)
class TruthTable:
    """Function values in unfolding order: bits[0] is the value at the
    lexicographically greatest argument tuple (1,...,1); bits[-1] at all-0."""

    arity: int
    bits: tuple

    def __post_init__(self):
        if len(self.bits) != 1 << self.arity:
            raise ValueError("table length must be 2**arity")

    def value(self, args) -> bool:
        if len(args) != self.arity:
            raise ArityMismatch(f"expected {self.arity} arguments")
        index = 0
        for a in args:
            index = (index << 1) | (1 if a else 0)
        return self.bits[(1 << self.arity) - 1 - index]

    def unfolding(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @staticmethod
    def from_function(arity: int, fn) -> "TruthTable":
        bits = []
        for args in itertools.product((True, False), repeat=arity):
            bits.append(bool(fn(*args)))
        return TruthTable(arity, tuple(bits))

    @staticmethod
    def from_unfolding(text: str) -> "TruthTable":
        n = len(text)
        arity = n.bit_length() - 1
        if 1 << arity != n:
            raise ValueError("unfolding length must be a power of two")
        return TruthTable(arity, tuple(c == "1" for c in text))

    @staticmethod
    def constant(arity: int, value: bool) -> "TruthTable":
        return TruthTable(arity, tuple([bool(value)] * (1 << arity)))


@dataclass(frozen=True)
class Interpretation:
    functions: dict = field(default_factory=dict)  # name -> TruthTable
    props: dict = field(default_factory=dict)      # name -> bool

    def __hash__(self):
        return hash((tuple(sorted(self.functions.items(),
                                  key=lambda kv: kv[0])),
                     tuple(sorted(self.props.items()))))


def hamming_weight(interp: Interpretation) -> int:
    """True table entries plus true propositions."""
    weight = sum(sum(t.bits) for t in interp.functions.values())
    weight += sum(1 for v in interp.props.values() if v)
    return weight


def unfold(interp: Interpretation, order) -> str:
    """Juxtaposed unfoldings/truth values, most significant variable first."""
    pieces = []
    for name in order:
        if name in interp.functions:
            pieces.append(interp.functions[name].unfolding())
        elif name in interp.props:
            pieces.append("1" if interp.props[name] else "0")
        else:
            raise OrderMismatch(f"{name!r} not interpreted")
    return "".join(pieces)


def lex_compare(left: Interpretation, right: Interpretation, order) -> int:
    """-1, 0, or 1 comparing unfoldings w.r.t. the variable order."""
    a, b = unfold(left, order), unfold(right, order)
    if len(a) != len(b):
        raise OrderMismatch("interpretations differ in shape")
    return (a > b) - (a < b)


# -- evaluation ---------------------------------------------------------------

def _block_budget(block: Block, max_bits: int):
    total = 0
    for name, arity in block.functions:
        if arity > MAX_SO_ARITY:
            raise BudgetExceeded(f"{name}/{arity} exceeds arity {MAX_SO_ARITY}")
        total += 1 << arity
    if total > max_bits:
        raise BudgetExceeded(f"{total} table bits in one block (cap {max_bits})")


def _matrix_value(node, env) -> bool:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Prop):
        return env[node.name]
    if isinstance(node, App):
        table = env[node.func]
        args = [a.value if isinstance(a, Const) else env[a.name] for a in node.args]
        return table.value(args)
    if isinstance(node, Not):
        return not _matrix_value(node.sub, env)
    if isinstance(node, And):
        return all(_matrix_value(i, env) for i in node.items)
    if isinstance(node, Or):
        return any(_matrix_value(i, env) for i in node.items)
    if isinstance(node, Implies):
        return (not _matrix_value(node.left, env)) or _matrix_value(node.right, env)
    if isinstance(node, Iff):
        return _matrix_value(node.left, env) == _matrix_value(node.right, env)
    raise TypeError(f"not a formula node: {node!r}")


def _tables_for_block(block: Block):
    spaces = []
    for _, arity in block.functions:
        spaces.append([TruthTable(arity, bits)
                       for bits in itertools.product((False, True),
                                                     repeat=1 << arity)])
    return spaces


def evaluate(formula: Formula, interp: Interpretation,
             max_bits: int = MAX_TABLE_BITS) -> bool:
    """Standard second-order semantics by exhaustive expansion."""
    functions, props = formula.free_variables()
    env = {}
    for name, arity in functions.items():
        table = interp.functions.get(name)
        if table is None:
            raise ArityMismatch(f"free function {name!r} not interpreted")
        if table.arity != arity:
            raise ArityMismatch(f"{name!r}: declared {table.arity}, used {arity}")
        env[name] = table
    for name in props:
        if name not in interp.props:
            raise ArityMismatch(f"free proposition {name!r} not interpreted")
        env[name] = interp.props[name]

    def eval_prefix(blocks, env) -> bool:
        if not blocks:
            return _matrix_value(formula.matrix, env)
        block, rest = blocks[0], blocks[1:]
        if block.second_order:
            _block_budget(block, max_bits)
            names = [name for name, _ in block.functions]
            combos = itertools.product(*_tables_for_block(block))
        else:
            names = list(block.props)
            combos = itertools.product((False, True), repeat=len(names))
        results = (eval_prefix(rest, {**env, **dict(zip(names, combo))})
                   for combo in combos)
        return any(results) if block.quantifier == "E" else all(results)

    return eval_prefix(list(formula.prefix), env)


def free_interpretations(formula: Formula, max_bits: int = MAX_TABLE_BITS):
    """All interpretations of the free variables, in descending unfold order
    of the canonical variable order (see natural_variable_order)."""
    functions, props = formula.free_variables()
    order = natural_variable_order(list(functions) + props)
    total_bits = sum(1 << a for a in functions.values()) + len(props)
    if total_bits > max_bits:
        raise BudgetExceeded(f"{total_bits} free bits (cap {max_bits})")
    for pattern in range((1 << total_bits) - 1, -1, -1):
        bits = format(pattern, f"0{total_bits}b") if total_bits else ""
        interp_funcs, interp_props = {}, {}
        cursor = 0
        for name in order:
            if name in functions:
                width = 1 << functions[name]
                interp_funcs[name] = TruthTable.from_unfolding(bits[cursor:cursor + width])
                cursor += width
            else:
                interp_props[name] = bits[cursor] == "1"
                cursor += 1
        yield Interpretation(interp_funcs, interp_props), order


_SUFFIX = re.compile(r"^(.*?)(\d*)$")


def natural_variable_order(names):
    """Descending-subscript order: x10 before x2 before x1 before x."""
    def key(name):
        stem, digits = _SUFFIX.match(name).groups()
        return (stem, int(digits) if digits else -1)
    return sorted(names, key=key, reverse=True)


def is_satisfiable(formula: Formula, max_bits: int = MAX_TABLE_BITS):
    """(bool, witness-or-None) over the free variables, by enumeration."""
    for interp, _ in free_interpretations(formula, max_bits):
        if evaluate(formula, interp, max_bits):
            return True, interp
    return False, None


def is_valid(formula: Formula, max_bits: int = MAX_TABLE_BITS):
    """(bool, counterexample-or-None)."""
    for interp, _ in free_interpretations(formula, max_bits):
        if not evaluate(formula, interp, max_bits):
            return False, interp
    return True, None


def lex_max_model(formula: Formula, order=None,
                  max_bits: int = MAX_TABLE_BITS) -> Interpretation:
    """The lexicographically maximum model of the free variables."""
    best = None
    for interp, canonical in free_interpretations(formula, max_bits):
        use = order or canonical
        if evaluate(formula, interp, max_bits):
            if best is None or lex_compare(interp, best, use) > 0:
                best = interp
            if order is None:
                return interp  # canonical order enumerates descending
    if best is None:
        raise Unsatisfiable("formula has no model within budget")
    return best


def max_weight_model(formula: Formula, order=None,
                     max_bits: int = MAX_TABLE_BITS) -> Interpretation:
    """A maximum-Hamming-weight model; ties resolved lexicographically so
    that the returned representative is deterministic."""
    best = None
    best_weight = -1
    for interp, canonical in free_interpretations(formula, max_bits):
        if not evaluate(formula, interp, max_bits):
            continue
        weight = hamming_weight(interp)
        if weight > best_weight:
            best, best_weight = interp, weight
        elif weight == best_weight and \
                lex_compare(interp, best, order or canonical) > 0:
            best = interp
    if best is None:
        raise Unsatisfiable("formula has no model within budget")
    return best


# -- classification -----------------------------------------------------------

@dataclass(frozen=True)
class Shape:
    k: int                   # alternating second-order quantifier count
    starts_with: Optional[str]  # 'E' or 'A' (None when k == 0)
    simple_blocks: bool      # every SO block binds a single function
    single_fo_block: bool
    cnf_matrix: bool


def is_literal(node) -> bool:
    if isinstance(node, Not):
        node = node.sub
    return isinstance(node, (Prop, App, Const))


def is_cnf(node) -> bool:
    clauses = node.items if isinstance(node, And) else (node,)
    for clause in clauses:
        parts = clause.items if isinstance(clause, Or) else (clause,)
        if not all(is_literal(p) for p in parts):
            return False
    return True


def classify(formula: Formula) -> Shape:
    so_blocks = [b for b in formula.prefix if b.second_order]
    fo_blocks = [b for b in formula.prefix if not b.second_order]
    k = 0
    last = None
    for block in so_blocks:
        if block.quantifier != last:
            k += 1
            last = block.quantifier
    return Shape(
        k=k,
        starts_with=so_blocks[0].quantifier if so_blocks else None,
        simple_blocks=all(len(b.functions) == 1 for b in so_blocks),
        single_fo_block=len(fo_blocks) == 1,
        cnf_matrix=is_cnf(formula.matrix),
    )


# -- function-block merging ---------------------------------------------------

def merge_function_blocks(formula: Formula) -> Formula:
    """Aggregate each multi-function SO block into a single function.

    In a block binding f_0..f_{n-1} of arities a_j, a fresh function h of
    arity floor(log2 n)+1+max(a_j) replaces them; an occurrence f_j(args)
    becomes h(bits(j); 0-padding, args).  Free variables are untouched and
    every interpretation of them is preserved.
    """
    replacements = {}
    new_prefix = []
    used = set(formula.bound_names())
    functions, props = formula.free_variables()
    used |= set(functions) | set(props)
    counter = itertools.count(1)

    for block in formula.prefix:
        if not block.second_order or len(block.functions) == 1:
            new_prefix.append(block)
            continue
        names = [name for name, _ in block.functions]
        arities = [arity for _, arity in block.functions]
        index_bits = (len(names) - 1).bit_length() or 1
        width = max(arities)
        merged = f"h{next(counter)}"
        while merged in used:
            merged = f"h{next(counter)}"
        used.add(merged)
        for j, (name, arity) in enumerate(block.functions):
            prefix_bits = tuple(Const(bool(int(b)))
                                for b in format(j, f"0{index_bits}b"))
            replacements[name] = (merged, prefix_bits, width - arity)
        new_prefix.append(Block(block.quantifier,
                                functions=((merged, index_bits + width),)))

    def rewrite(node):
        if isinstance(node, App) and node.func in replacements:
            merged, prefix_bits, pad = replacements[node.func]
            args = prefix_bits + tuple([Const(False)] * pad) + node.args
            return App(merged, args)
        if isinstance(node, Not):
            return Not(rewrite(node.sub))
        if isinstance(node, And):
            return And(tuple(rewrite(i) for i in node.items))
        if isinstance(node, Or):
            return Or(tuple(rewrite(i) for i in node.items))
        if isinstance(node, Implies):
            return Implies(rewrite(node.left), rewrite(node.right))
        if isinstance(node, Iff):
            return Iff(rewrite(node.left), rewrite(node.right))
        return node

    return Formula(tuple(new_prefix), rewrite(formula.matrix))


# -- parser / serializer ------------------------------------------------------

_TOKEN = re.compile(r"\s*(->|<->|[()~&|,./]|[A-Za-z_][A-Za-z0-9_']*|\d+)")


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        line, col = 1, 1
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or not m.group(1):
                stray = text[pos:].strip()
                if not stray:
                    break
                raise FormulaSyntaxError(f"stray character {stray[0]!r}", line, col)
            skipped = text[pos:m.start(1)]
            line += skipped.count("\n")
            col = (len(skipped) - skipped.rfind("\n") if "\n" in skipped
                   else col + len(skipped))
            self.tokens.append((m.group(1), line, col))
            col += len(m.group(1))
            pos = m.end()
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    def location(self):
        if self.index < len(self.tokens):
            _, line, col = self.tokens[self.index]
            return line, col
        if self.tokens:
            _, line, col = self.tokens[-1]
            return line, col
        return 1, 1

    def next(self):
        token = self.peek()
        if token is None:
            raise FormulaSyntaxError("unexpected end of input", *self.location())
        self.index += 1
        return token

    def expect(self, token):
        got = self.peek()
        if got != token:
            raise FormulaSyntaxError(f"expected {token!r}, found {got!r}",
                                     *self.location())
        return self.next()


_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


def _parse_block(tokens: _Tokens) -> Block:
    quantifier = tokens.next()
    functions = []
    props = []
    while tokens.peek() != ".":
        name = tokens.next()
        if not _NAME.match(name) or name in ("E", "A"):
            raise FormulaSyntaxError(f"bad variable name {name!r}", *tokens.location())
        if tokens.peek() == "/":
            tokens.next()
            arity_token = tokens.next()
            if not arity_token.isdigit():
                raise FormulaSyntaxError("arity must be a number", *tokens.location())
            functions.append((name, int(arity_token)))
        else:
            props.append(name)
    tokens.expect(".")
    if functions and props:
        raise FormulaSyntaxError("block mixes functions and propositions",
                                 *tokens.location())
    return Block(quantifier, tuple(functions), tuple(props))


def _parse_atom(tokens: _Tokens):
    token = tokens.peek()
    if token == "(":
        tokens.next()
        node = _parse_iff(tokens)
        tokens.expect(")")
        return node
    if token == "~":
        tokens.next()
        return Not(_parse_atom(tokens))
    if token in ("0", "1"):
        tokens.next()
        return Const(token == "1")
    if token is None or not _NAME.match(token):
        raise FormulaSyntaxError(f"expected a literal, found {token!r}",
                                 *tokens.location())
    tokens.next()
    if tokens.peek() == "(":
        tokens.next()
        args = []
        if tokens.peek() != ")":
            while True:
                arg = tokens.next()
                if arg in ("0", "1"):
                    args.append(Const(arg == "1"))
                elif _NAME.match(arg):
                    if tokens.peek() == "(":
                        raise FormulaSyntaxError(
                            "functions cannot be arguments of functions",
                            *tokens.location())
                    args.append(Prop(arg))
                else:
                    raise FormulaSyntaxError(f"bad argument {arg!r}",
                                             *tokens.location())
                if tokens.peek() == ",":
                    tokens.next()
                    continue
                break
        tokens.expect(")")
        return App(token, tuple(args))
    return Prop(token)


def _parse_and(tokens):
    items = [_parse_atom(tokens)]
    while tokens.peek() == "&":
        tokens.next()
        items.append(_parse_atom(tokens))
    return items[0] if len(items) == 1 else And(tuple(items))


def _parse_or(tokens):
    items = [_parse_and(tokens)]
    while tokens.peek() == "|":
        tokens.next()
        items.append(_parse_and(tokens))
    return items[0] if len(items) == 1 else Or(tuple(items))


def _parse_implies(tokens):
    left = _parse_or(tokens)
    if tokens.peek() == "->":
        tokens.next()
        return Implies(left, _parse_implies(tokens))
    return left


def _parse_iff(tokens):
    left = _parse_implies(tokens)
    while tokens.peek() == "<->":
        tokens.next()
        left = Iff(left, _parse_implies(tokens))
    return left


def parse(text: str) -> Formula:
    tokens = _Tokens(text)
    prefix = []
    while tokens.peek() in ("E", "A"):
        prefix.append(_parse_block(tokens))
    matrix = _parse_iff(tokens)
    if tokens.peek() is not None:
        raise FormulaSyntaxError(f"trailing input {tokens.peek()!r}",
                                 *tokens.location())
    try:
        return Formula(tuple(prefix), matrix)
    except ValueError as exc:
        raise FormulaSyntaxError(str(exc), *tokens.location())


def _render(node, parent_level=0) -> str:
    # levels: iff=1, implies=2, or=3, and=4, atom=5
    if isinstance(node, Const):
        return "1" if node.value else "0"
    if isinstance(node, Prop):
        return node.name
    if isinstance(node, App):
        args = ",".join(_render(a) for a in node.args)
        return f"{node.func}({args})"
    if isinstance(node, Not):
        return f"~{_render(node.sub, 5)}"
    if isinstance(node, And):
        text = " & ".join(_render(i, 4) for i in node.items)
        level = 4
    elif isinstance(node, Or):
        text = " | ".join(_render(i, 3) for i in node.items)
        level = 3
    elif isinstance(node, Implies):
        text = f"{_render(node.left, 3)} -> {_render(node.right, 2)}"
        level = 2
    elif isinstance(node, Iff):
        text = f"{_render(node.left, 2)} <-> {_render(node.right, 2)}"
        level = 1
    else:
        raise TypeError(f"not a formula node: {node!r}")
    return f"({text})" if level < parent_level else text


def serialize(formula: Formula) -> str:
    parts = []
    for block in formula.prefix:
        names = [f"{n}/{a}" for n, a in block.functions] + list(block.props)
        parts.append(f"{block.quantifier} {' '.join(names)}.")
    parts.append(_render(formula.matrix))
    return " ".join(parts)


def serialize_interpretation(interp: Interpretation, order=None) -> str:
    """``var=bits`` lines in unfolding order."""
    names = order or natural_variable_order(
        list(interp.functions) + list(interp.props))
    lines = []
    for name in names:
        if name in interp.functions:
            lines.append(f"{name}={interp.functions[name].unfolding()}")
        else:
            lines.append(f"{name}={'1' if interp.props[name] else '0'}")
    return "\n".join(lines) + "\n"
