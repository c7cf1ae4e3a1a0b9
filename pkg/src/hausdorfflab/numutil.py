"""Arbitrary-precision naturals: iterated exponentials, exponentiation by
squaring, polynomial evaluation, integer log, and fixed-width base digits.

Values are plain Python ints (always >= 0 here).  A global result-size cap
turns runaway exponential growth into a clean :class:`BudgetExceeded` instead
of an out-of-memory surprise.
"""

from __future__ import annotations

from .errors import BudgetExceeded, DomainError, IndexOutOfRange

#: Default cap on result sizes, in bits.
DEFAULT_BIT_CAP = 2 ** 20


def _check_cap(value: int, bit_cap: int) -> int:
    if value.bit_length() > bit_cap:
        raise BudgetExceeded(
            f"result needs {value.bit_length()} bits, cap is {bit_cap}")
    return value


def pow_sq(a: int, b: int, bit_cap: int = DEFAULT_BIT_CAP) -> int:
    """a**b by the squaring loop (b mod 2 / b div 2 structure)."""
    if a < 0 or b < 0:
        raise DomainError("pow_sq is defined on naturals only")
    res = 1
    mult = a
    while b > 0:
        if b % 2 == 1:
            res = _check_cap(res * mult, bit_cap)
        b = b // 2
        if b > 0:
            mult = _check_cap(mult * mult, bit_cap)
    return res


def poly_eval(coeffs, n: int, bit_cap: int = DEFAULT_BIT_CAP) -> int:
    """a0 + a1*n + ... + ak*n^k via a running power of n."""
    coeffs = list(coeffs)
    if not coeffs:
        return 0
    if n < 0 or any(c < 0 for c in coeffs):
        raise DomainError("poly_eval is defined on naturals only")
    res = coeffs[0]
    pow_x = 1
    for a_i in coeffs[1:]:
        pow_x = _check_cap(pow_x * n, bit_cap)
        res = _check_cap(res + a_i * pow_x, bit_cap)
    return res


def iexp(i: int, x: int, bit_cap: int = DEFAULT_BIT_CAP) -> int:
    """Iterated exponential: iexp(0, x) = x, iexp(i, x) = 2**iexp(i-1, x)."""
    if i < 0:
        raise DomainError("use ilog for negative towers")
    if x < 0:
        raise DomainError("iexp is defined on naturals only")
    value = x
    for _ in range(i):
        if value > bit_cap:
            raise BudgetExceeded(f"2**{value} exceeds the {bit_cap}-bit cap")
        value = 1 << value
    return value


def ilog(i: int, x: int) -> int:
    """Floor-iterated base-2 log; inverse of iexp on exact towers.

    Every intermediate value must stay >= 1, otherwise DomainError.
    """
    if i < 0:
        raise DomainError("negative iteration count")
    value = x
    for _ in range(i):
        if value < 1:
            raise DomainError("iterated log ran below 1")
        value = value.bit_length() - 1
    return value


def int_log_plus1(a: int) -> int:
    """floor(log2 a) + 1, i.e. the number of bits needed to write a."""
    if a <= 0:
        raise DomainError("int_log_plus1 needs a positive argument")
    return a.bit_length()


def base_digits(z: int, base: int, width: int):
    """Fixed-width digits of z in the given base, most significant first."""
    if base < 2:
        raise DomainError("base must be at least 2")
    if z < 0 or z >= base ** width:
        raise IndexOutOfRange(f"{z} not representable in {width} base-{base} digits")
    digits = []
    for _ in range(width):
        digits.append(z % base)
        z //= base
    digits.reverse()
    return digits


def digits_to_index(digits, base: int) -> int:
    """Inverse of base_digits: most-significant-first digits back to an int."""
    value = 0
    for d in digits:
        if d < 0 or d >= base:
            raise IndexOutOfRange(f"digit {d} outside base {base}")
        value = value * base + d
    return value
