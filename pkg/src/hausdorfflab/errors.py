"""Exception types shared across the package."""


class HausdorffLabError(Exception):
    """Base class for all package-specific errors."""


class MalformedConfiguration(HausdorffLabError):
    """Configuration inconsistent with the machine (alphabets, tape count, state)."""


class HaltedConfiguration(HausdorffLabError):
    """Attempt to step a configuration whose state is accepting or rejecting."""


class QueryStateReached(HausdorffLabError):
    """Attempt to step through the query state outside the oracle runner."""


class DecodeError(HausdorffLabError):
    """Bit string does not decode to a computation."""


class ScheduleViolation(HausdorffLabError):
    """Machine exceeded its query or round budget."""


class OracleExhausted(HausdorffLabError):
    """The oracle's decider ran out of fuel on a queried string."""


class RoundOutOfRange(HausdorffLabError):
    """Requested query round does not exist in the computation."""


class BudgetExceeded(HausdorffLabError):
    """A desk-scale enumeration or size budget was exceeded."""


class NotMonotone(HausdorffLabError):
    """Predicate violates D(w,z) >= D(w,z+1)."""


class LengthNotDominating(HausdorffLabError):
    """New length function is smaller than the old one somewhere."""


class SpaceTooSmall(HausdorffLabError):
    """(r+1)^s does not cover the declared predicate length."""


class IndexOutOfRange(HausdorffLabError):
    """Index outside the representable digit-vector space."""


class FormulaSyntaxError(HausdorffLabError):
    """Formula text rejected by the parser; carries line/column."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ArityMismatch(HausdorffLabError):
    """Function used with an arity different from its declaration."""


class OrderMismatch(HausdorffLabError):
    """Interpretations compared over different variable sets."""


class Unsatisfiable(HausdorffLabError):
    """No model exists within the enumeration budget."""


class MachineTooLarge(HausdorffLabError):
    """Machine or input does not fit the encoding window."""


class NotCharted(HausdorffLabError):
    """No rewrite rule applies and the expression is not canonical."""


class DomainError(HausdorffLabError):
    """Numeric function applied outside its domain."""


class MonotonicityViolation(HausdorffLabError):
    """Declared-monotone instance tuple is not monotone."""


class ManifestError(HausdorffLabError):
    """Verification manifest is malformed or references missing files."""


class ConstructionError(HausdorffLabError):
    """A predicate or formula construction precondition failed."""
