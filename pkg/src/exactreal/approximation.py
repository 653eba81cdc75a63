"""The ``(m, n, p)`` representation: a rational plus a relative-error exponent."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import DomainError
from .rational import floor_log2, pow2


@dataclass(frozen=True)
class Approximation:
    """A real ``x`` known to satisfy ``|x - value| < |value| * 2**-prec``.

    ``value`` may not be zero: no nonzero relative bound can describe 0.
    A ``prec`` below zero carries no information; callers refine instead.
    """

    value: mpq
    prec: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", mpq(self.value))
        if self.value == 0:
            raise DomainError("an approximation cannot have value 0")

    @property
    def m(self) -> int:
        return int(self.value.numerator)

    @property
    def n(self) -> int:
        return int(self.value.denominator)

    def bounds(self) -> tuple[mpq, mpq]:
        """Open interval guaranteed to contain the represented real."""
        slack = abs(self.value) * pow2(-self.prec)
        return self.value - slack, self.value + slack

    def weaken(self, loss: int) -> "Approximation":
        return Approximation(self.value, self.prec - loss)


@dataclass(frozen=True)
class ExactValue:
    """A subexpression whose value is known exactly (zero allowed)."""

    value: mpq

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", mpq(self.value))


def check_represents(a: Approximation, x: mpq) -> bool:
    """Whether the rational ``x`` lies strictly within ``a``'s error bound."""
    return abs(mpq(x) - a.value) < abs(a.value) * pow2(-a.prec)


def mantissa_exponent(q: mpq) -> int:
    """The ``a`` with ``q = f * 2**a`` and ``f`` in ``[1/2, 1)``."""
    return floor_log2(q) + 1
