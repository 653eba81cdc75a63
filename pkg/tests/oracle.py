"""Reference values from mpmath at far higher precision than any test requests."""

from __future__ import annotations

import mpmath
from gmpy2 import mpq

from exactreal.verification import to_mpmath


def represents(r: mpq, true_value, p: int) -> bool:
    """``|v - r| < |r| 2**-p`` for an mpmath value computed with ample guard bits."""
    rr = mpmath.mpf(r.numerator) / r.denominator
    return abs(true_value - rr) < abs(rr) * mpmath.mpf(2) ** -p


def check_expr(e, r: mpq, p: int, guard: int = 256) -> bool:
    with mpmath.workprec(p + guard):
        return represents(r, to_mpmath(e), p)
