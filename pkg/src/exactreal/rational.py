"""Exact rational arithmetic and integer-logarithm helpers.

Rationals are ``gmpy2.mpq`` values: always reduced, denominator positive.
The precision formulas only ever need floors and ceilings of binary
logarithms, which are computed from bit lengths and never from floats.
"""

from __future__ import annotations

from typing import Union

import gmpy2
from gmpy2 import mpq, mpz

from .errors import DomainError

Rational = type(mpq())
RationalLike = Union[int, "mpq", str]

ZERO = mpq(0)
ONE = mpq(1)


def normalize(num: int, den: int) -> mpq:
    """Return ``num/den`` in lowest terms with a positive denominator."""
    if den == 0:
        raise DomainError("zero denominator")
    return mpq(num, den)


def to_rational(value: RationalLike) -> mpq:
    """Coerce an int, mpq, Fraction or ``"a/b"`` string to an mpq."""
    try:
        return mpq(value)
    except ZeroDivisionError:
        raise DomainError(f"zero denominator in {value!r}") from None


def rat_add(a: mpq, b: mpq) -> mpq:
    return a + b


def rat_mul(a: mpq, b: mpq) -> mpq:
    return a * b


def rat_neg(a: mpq) -> mpq:
    return -a


def rat_inv(a: mpq) -> mpq:
    if a == 0:
        raise DomainError("inverse of zero")
    return 1 / mpq(a)


def rat_cmp(a: mpq, b: mpq) -> int:
    """Three-way comparison: -1, 0 or 1."""
    return (a > b) - (a < b)


def floor_q(q: mpq) -> int:
    """Exact floor; never routed through a binary float."""
    return int(q.numerator // q.denominator)


def ceil_q(q: mpq) -> int:
    return -int((-q.numerator) // q.denominator)


def bit_size(q: mpq) -> int:
    """Largest bit length of numerator and denominator."""
    q = mpq(q)
    return max(gmpy2.bit_length(q.numerator), gmpy2.bit_length(q.denominator))


def floor_log2(q: mpq) -> int:
    """The unique ``e`` with ``2**e <= q < 2**(e+1)``."""
    q = mpq(q)
    if q <= 0:
        raise DomainError(f"floor_log2 of non-positive {q}")
    num, den = q.numerator, q.denominator
    e = gmpy2.bit_length(num) - gmpy2.bit_length(den)
    # 2**e <= q  <=>  num >= den * 2**e
    lhs, rhs = (num, den << e) if e >= 0 else (num << -e, den)
    return e if lhs >= rhs else e - 1


def ceil_log2(q: mpq) -> int:
    """The smallest integer ``e`` with ``q <= 2**e``."""
    e = floor_log2(q)
    return e if is_power_of_two(q) else e + 1


def is_power_of_two(q: mpq) -> bool:
    """True when ``q`` is ``2**e`` for some integer ``e``."""
    q = mpq(q)
    if q <= 0:
        return False
    num, den = q.numerator, q.denominator
    return (num & (num - 1)) == 0 and (den & (den - 1)) == 0


def pow_int(q: mpq, e: int) -> mpq:
    """Exact ``q**e`` for ``e >= 0``."""
    if e < 0:
        raise ValueError("pow_int takes a non-negative exponent")
    if e == 0:
        return ONE
    q = mpq(q)
    return mpq(q.numerator ** e, q.denominator ** e)


def pow2(e: int) -> mpq:
    """``2**e`` as a rational, for any integer ``e``."""
    return mpq(mpz(1) << e) if e >= 0 else mpq(1, mpz(1) << -e)


def log2_ratio_loss(a: mpq, b: mpq) -> int | None:
    """Precision lost when adding two approximations of opposite sign.

    Returns the smallest natural ``i`` with ``i >= log2((1+r)/(1-r))`` where
    ``r = min(|a|,|b|) / max(|a|,|b|)``, or ``None`` when ``|a| == |b|`` and
    the bound is infinite.
    """
    a, b = abs(mpq(a)), abs(mpq(b))
    lo, hi = (a, b) if a <= b else (b, a)
    if lo == hi:
        return None
    if lo == 0:
        return 0
    # (1+r)/(1-r) with r = lo/hi equals (hi+lo)/(hi-lo) and is always > 1
    return max(0, ceil_log2((hi + lo) / (hi - lo)))
