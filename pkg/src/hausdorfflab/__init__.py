"""Desk-scale laboratory for Hausdorff reductions over oracle machines:
machine simulation, parity deciders, predicate constructions, second-order
Boolean formulas, machine-computation encodings, and class-expression
normalization."""

__version__ = "0.1.0"
