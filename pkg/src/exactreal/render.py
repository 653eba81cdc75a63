"""Decimal rendering of exact rationals with round-half-even."""

from __future__ import annotations

from gmpy2 import mpq, mpz


def _scaled_digits(q: mpq, d: int) -> tuple[int, int]:
    """Integer ``D`` with ``d`` digits and exponent ``e`` such that ``q ~ D * 10**(e-d+1)``."""
    num, den = mpz(q.numerator), mpz(q.denominator)
    # first guess of the decimal exponent from the digit counts, then fix it
    e = len(str(num)) - len(str(den))
    if num * 10 ** max(0, -e) < den * 10 ** max(0, e):
        e -= 1
    shift = d - 1 - e
    top, bottom = (num * 10 ** shift, den) if shift >= 0 else (num, den * 10 ** -shift)
    digits, rem = divmod(top, bottom)
    twice = 2 * rem
    if twice > bottom or (twice == bottom and digits % 2 == 1):
        digits += 1
    if digits == 10 ** d:
        digits //= 10
        e += 1
    return int(digits), e


def render_decimal(q, d: int) -> str:
    """``d`` significant digits of ``q``, rounded half to even.

    Uses positional notation unless ``|q| >= 10**d`` or ``|q| < 10**-4``,
    in which case the result is ``D.DDDe±X``.
    """
    if d < 1:
        raise ValueError("digits must be at least 1")
    q = mpq(q)
    if q == 0:
        return "0" if d == 1 else "0." + "0" * (d - 1)
    sign = "-" if q < 0 else ""
    q = abs(q)
    digits, e = _scaled_digits(q, d)
    text = str(digits)
    # the exponent after rounding, so 999.96 at 3 digits prints as 1.00e+3
    if e >= d or q < mpq(1, 10 ** 4):
        mant = text[0] + ("." + text[1:] if d > 1 else "")
        return f"{sign}{mant}e{e:+d}"
    if e == d - 1:
        return sign + text
    if e >= 0:
        return f"{sign}{text[:e + 1]}.{text[e + 1:]}"
    return f"{sign}0.{'0' * (-e - 1)}{text}"
