"""
Closed forms for family sizes, longest cycles and longest paths, the region
recurrences of the third family and shortness-exponent estimates.

Counts are exact integers. Logarithms use :mod:`decimal` at a caller-chosen
precision with guard digits, and every estimate reports its error bound.
"""

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Dict, Tuple

from shortness_lab.errors import UndefinedForDepth

GUARD_DIGITS = 12

# (block size, white vertices, whites per cycle) for the arranged-block families.
ARRANGED_PARAMETERS = {1: (102, 30, 22), 2: (15, 6, 5)}

# Limit constants log_base(value) of each family's exponent.
LIMIT_BASES = {1: (22, 30), 2: (5, 6), 3: (2, 3)}


def _check_family(i: int) -> None:
    if i not in (1, 2, 3):
        raise ValueError(f"Family must be 1, 2 or 3, got {i}")


def _check_depth(n: int) -> None:
    if n < 0:
        raise ValueError(f"Depth must be non-negative, got {n}")


def geometric_sum(base: int, n: int) -> int:
    """1 + base + ... + base**n (zero for n < 0)."""
    return sum(base ** t for t in range(n + 1))


def f(i: int, n: int) -> int:
    _check_family(i)
    _check_depth(n)
    if i == 1:
        return 1 + 101 * geometric_sum(30, n)
    if i == 2:
        return 1 + 14 * geometric_sum(6, n)
    return 4 + 5 * geometric_sum(3, n)


def c(i: int, n: int) -> int:
    _check_family(i)
    _check_depth(n)
    if i == 1:
        return 1 + 93 * geometric_sum(22, n)
    if i == 2:
        return 1 + 13 * geometric_sum(5, n)
    return 3 * 2 ** (n + 3) - 9 * n - 15


def f_closed(i: int, n: int) -> Fraction:
    _check_family(i)
    _check_depth(n)
    if i == 1:
        return 1 + Fraction(101, 29) * (30 ** (n + 1) - 1)
    if i == 2:
        return 1 + Fraction(14, 5) * (6 ** (n + 1) - 1)
    return 4 + Fraction(5, 2) * (3 ** (n + 1) - 1)


def c_closed(i: int, n: int) -> Fraction:
    _check_family(i)
    _check_depth(n)
    if i == 1:
        return 1 + Fraction(93, 21) * (22 ** (n + 1) - 1)
    if i == 2:
        return 1 + Fraction(13, 4) * (5 ** (n + 1) - 1)
    return Fraction(3 * 2 ** (n + 3) - 9 * n - 15)


def s_values(n: int) -> Tuple[int, int, int]:
    """(s0, s1, s2) at depth n by iterating the region recurrence from (9, 9, 8)."""
    _check_depth(n)
    s0, s1, s2 = 9, 9, 8
    for _ in range(n):
        s0, s1, s2 = 3 * s1 - 3, 2 * s2 + s1 - 3, 2 * s2
    return s0, s1, s2


def s_closed(n: int) -> Tuple[int, int, int]:
    _check_depth(n)
    return 3 * 2 ** (n + 3) - 9 * n - 15, 2 ** (n + 4) - 3 * n - 7, 2 ** (n + 3)


def region_split_inequality(n: int) -> Tuple[int, int]:
    """Both sides of the comparison showing a cycle through several regions beats one region.

    Returns (longest cycle kept inside one region at depth n-1, best cycle
    joining the three regions); the first is always the smaller.
    """
    if n < 1:
        raise ValueError(f"The comparison needs n >= 1, got {n}")
    lhs = 3 * 2 ** (n + 2) - 9 * (n - 1) - 15
    rhs = 3 * (2 ** (n + 3) - 3 * (n - 1) - 7) - 3
    return lhs, rhs


def lemma_cyc_bound(j: int, w_size: int, k: int, n: int) -> int:
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if w_size < 1:
        raise ValueError(f"The white set must be non-empty, got {w_size}")
    if j <= w_size:
        raise ValueError(f"Block order {j} must exceed the white count {w_size}")
    _check_depth(n)
    ell = j - w_size + k
    return 1 + (ell - 1) * geometric_sum(k, n)


def p(i: int, n: int) -> int:
    _check_family(i)
    _check_depth(n)
    sgn = 1 if n > 0 else 0
    if i == 1:
        return 2 + c(1, n) + 2 * sum(c(1, k) for k in range(n))
    if i == 2:
        if n == 0:
            raise UndefinedForDepth("p(2, 0) is not given by the closed form; use the exhaustive path search")
        return 1 + sgn + c(2, n) + c(2, n - 1) + 2 * sum(c(2, k) for k in range(n - 1))
    return 7 * 2 ** (n + 2) + 2 * sgn - 15 * n - 19


def fan_white_bound(r: int) -> int:
    if r < 2:
        raise ValueError(f"The fan bound needs r >= 2, got {r}")
    return 2 * r + 2


def fan_order(r: int) -> int:
    return 10 * r + 2


def fan_cycle_bound(r: int) -> int:
    """Vertices minus whites plus the whites a cycle can collect in the r-fan."""
    return fan_order(r) - 3 * r + fan_white_bound(r)


@dataclass(frozen=True)
class LogEstimate:
    value: Decimal
    error_bound: Decimal
    precision: int


def log_ratio(numerator: int, base: int, precision: int = 30) -> LogEstimate:
    """log_base(numerator) to ``precision`` significant digits."""
    if numerator < 1 or base < 2:
        raise ValueError(f"Logarithm needs numerator >= 1 and base >= 2, got {numerator}, {base}")
    with localcontext() as ctx:
        ctx.prec = precision + GUARD_DIGITS
        value = Decimal(numerator).ln() / Decimal(base).ln()
    with localcontext() as ctx:
        ctx.prec = precision
        value = +value
    return LogEstimate(value, Decimal(10) ** -precision, precision)


def minimize_fan_exponent(r_max: int, precision: int = 30) -> Tuple[int, Dict[int, Decimal]]:
    if r_max < 10:
        raise ValueError(f"r_max must be at least 10, got {r_max}")
    table = {r: log_ratio(fan_white_bound(r), 3 * r, precision).value for r in range(3, r_max + 1)}
    best = min(table, key=lambda r: (table[r], r))
    return best, table


@dataclass(frozen=True)
class ShortnessEstimate:
    family: int
    depth: int
    value: Decimal
    limit: Decimal
    error_bound: Decimal


def shortness_estimate(i: int, n: int, precision: int = 30) -> ShortnessEstimate:
    _check_family(i)
    _check_depth(n)
    value = log_ratio(c(i, n), f(i, n), precision)
    limit = log_ratio(*LIMIT_BASES[i], precision=precision)
    return ShortnessEstimate(i, n, value.value, limit.value, value.error_bound)
