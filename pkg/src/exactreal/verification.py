"""Oracles that check the engine without reusing its formulas.

An expression is checked against itself at two precisions and against
exactly equal expressions. Well-known constants are also compared with
published reference digits, and mpmath supplies an outside reference value.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
from gmpy2 import mpq

from .engine import EvalConfig, compute, pow_with_loss
from .expr import Add, Arctan, Const, Cos, Exp, Expr, Inv, Ln, Mul, Neg, Sin, Sqrt
from .parser import parse
from .rational import ceil_log2, pow2


@dataclass(frozen=True)
class GoldenConstant:
    name: str
    source: str
    digits: str

    @property
    def expr(self) -> Expr:
        return parse(self.source)

    @property
    def reference(self) -> mpq:
        return mpq(Fraction(self.digits))


# 50 significant digits, as published in OEIS A002193 (sqrt 2), A001113 (e),
# A002162 (ln 2) and A000796 (pi)
GOLDEN = {
    "sqrt2": GoldenConstant("sqrt2", "sqrt(2)",
                            "1.4142135623730950488016887242096980785696718753769"),
    "e": GoldenConstant("e", "exp(1)",
                        "2.7182818284590452353602874713526624977572470936999"),
    "ln2": GoldenConstant("ln2", "ln(2)",
                          "0.69314718055994530941723212145817656807550013436025"),
    "pi": GoldenConstant("pi", "4*arctan(1)",
                         "3.1415926535897932384626433832795028841971693993751"),
}
# the references are truncated, so they are off by less than one unit here
REFERENCE_ERROR = mpq(1, 10 ** 49)


def golden_check(name: str, p: int, cfg: EvalConfig | None = None) -> bool:
    """Whether the engine's value at ``p`` bits is within ``2**-p`` of the reference."""
    g = GOLDEN[name]
    r = compute(g.expr, p, cfg)
    return abs(r - g.reference) + REFERENCE_ERROR < abs(r) * pow2(-p)


def cross_precision_check(e: Expr, p: int, cfg: EvalConfig | None = None,
                          offset: int = 16) -> bool:
    """Both ``compute(e, p)`` and ``compute(e, p + offset)`` bracket the same real.

    If both are valid, they differ by less than ``2 * 2**-p * |compute(e, p)|``.
    A folded exact zero has no relative bound and passes only if both agree.
    """
    return precisions_agree(compute(e, p, cfg), compute(e, p + offset, cfg), p)


def precisions_agree(a: mpq, b: mpq, p: int) -> bool:
    """``|a - b| < 2 * 2**-p * |a|``, the test behind ``cross_precision_check``."""
    if a == 0:
        return b == 0
    return abs(a - b) < 2 * pow2(-p) * abs(a)


def identity_residual(lhs: Expr, rhs: Expr, p: int,
                      cfg: EvalConfig | None = None) -> mpq:
    """``|compute(lhs, p) / compute(rhs, p) - 1|`` as an exact rational."""
    a = compute(lhs, p, cfg)
    b = compute(rhs, p, cfg)
    return abs(a / b - 1)


IDENTITIES: dict[str, tuple[str, str]] = {
    "exp_ln": ("exp(ln(7/2))", "7/2"),
    "pythagoras": ("sin(7/5)*sin(7/5) + cos(7/5)*cos(7/5)", "1"),
    "sqrt_square": ("sqrt(2)*sqrt(2)", "2"),
    "tan_ratio": ("tan(1/2)", "sin(1/2)/cos(1/2)"),
}


def to_mpmath(e: Expr):
    """Value of ``e`` in the current mpmath context: an oracle independent of the engine."""
    if isinstance(e, Const):
        return mpmath.mpf(e.value.numerator) / e.value.denominator
    x = [to_mpmath(k) for k in e.children]
    if isinstance(e, Neg):
        return -x[0]
    if isinstance(e, Add):
        return x[0] + x[1]
    if isinstance(e, Mul):
        return x[0] * x[1]
    if isinstance(e, Inv):
        return 1 / x[0]
    fn = {Sqrt: mpmath.sqrt, Exp: mpmath.exp, Ln: mpmath.log, Arctan: mpmath.atan,
          Sin: mpmath.sin, Cos: mpmath.cos}[type(e)]
    return fn(x[0])


def oracle_check(e: Expr, r: mpq, p: int, guard: int = 200) -> bool:
    """``|v - r| < |r| 2**-p`` with ``v`` from mpmath at ``p + guard`` bits."""
    with mpmath.workprec(p + guard):
        v = to_mpmath(e)
        if r == 0:
            return v == 0
        rr = mpmath.mpf(r.numerator) / r.denominator
        return abs(v - rr) < abs(rr) * mpmath.mpf(2) ** -p


# -- random expressions -------------------------------------------------------

def _constant(rng: random.Random, positive: bool) -> Const:
    while True:
        q = mpq(rng.randint(1, 8), rng.choice((1, 1, 2, 3, 4)))
        if q <= 8:
            break
    if not positive and rng.random() < 0.5:
        q = -q
    return Const(q)


def random_expression(rng: random.Random, depth: int = 4, positive: bool = False) -> Expr:
    """A random tree of at most ``depth`` levels below the root.

    Constants are nonzero rationals in ``[-8, 8]``. Arguments of sqrt, ln and
    inverse are drawn from a generator that only builds positive values, so
    no domain error can arise.
    """
    if depth == 0 or rng.random() < 0.2:
        return _constant(rng, positive)
    sub = depth - 1
    if positive:
        kind = rng.choice(("add", "mul", "inv", "sqrt", "exp", "arctan"))
        if kind == "add":
            return Add(random_expression(rng, sub, True), random_expression(rng, sub, True))
        if kind == "mul":
            return Mul(random_expression(rng, sub, True), random_expression(rng, sub, True))
        if kind == "inv":
            return Inv(random_expression(rng, sub, True))
        if kind == "sqrt":
            return Sqrt(random_expression(rng, sub, True))
        if kind == "exp":
            return Exp(random_expression(rng, sub))
        return Arctan(random_expression(rng, sub, True))
    kind = rng.choice(("neg", "add", "add", "mul", "mul", "inv", "sqrt", "exp", "ln",
                       "arctan", "sin", "cos"))
    if kind == "neg":
        return Neg(random_expression(rng, sub))
    if kind == "add":
        return Add(random_expression(rng, sub), random_expression(rng, sub))
    if kind == "mul":
        return Mul(random_expression(rng, sub), random_expression(rng, sub))
    if kind == "inv":
        if rng.random() < 0.5:
            # a negative divisor, built within the same depth budget
            if sub == 0:
                return Inv(_constant(rng, False))
            return Inv(Neg(random_expression(rng, sub - 1, True)))
        return Inv(random_expression(rng, sub, True))
    if kind == "sqrt":
        return Sqrt(random_expression(rng, sub, True))
    if kind == "ln":
        return Ln(random_expression(rng, sub, True))
    cls = {"exp": Exp, "arctan": Arctan, "sin": Sin, "cos": Cos}[kind]
    return cls(random_expression(rng, sub))


def random_corpus(n: int = 500, seed: int = 20240601, depth: int = 4) -> list[Expr]:
    rng = random.Random(seed)
    return [random_expression(rng, depth) for _ in range(n)]


# -- sampled propositions -----------------------------------------------------

def _sample_open_unit(rng: random.Random, count: int, signed: bool) -> list[mpq]:
    out = []
    while len(out) < count:
        den = rng.randint(2, 1000)
        num = rng.randint(1, den - 1)
        q = mpq(num, den)
        if signed and rng.random() < 0.5:
            q = -q
        out.append(q)
    return out


def prop_prec2() -> bool:
    for p in range(0, 65):
        e, f = pow2(-p), pow2(2 - p)
        if not ((1 + e) ** 2 <= 1 + f and 1 - f <= (1 - e) ** 2):
            return False
    return True


def prop_prec1() -> bool:
    for p in range(1, 65):
        t = pow2(p)
        if not (t / (t - 1) <= 1 + pow2(1 - p) and 1 - pow2(1 - p) <= t / (t + 1)):
            return False
    return True


def prop_ln_bounds(count: int = 100, seed: int = 7) -> bool:
    """``log2(1+y) <= y / ln 2`` with both sides as outward-rounded intervals."""
    iv = mpmath.iv
    for y in _sample_open_unit(random.Random(seed), count, signed=False):
        yi = iv.mpf(y.numerator) / y.denominator
        lhs = iv.log(1 + yi) / iv.log(2)
        rhs = yi / iv.log(2)
        if not lhs.b <= rhs.a:
            return False
    return True


def prop_sin_sign(count: int = 100, seed: int = 11) -> bool:
    for q in _sample_open_unit(random.Random(seed), count, signed=True):
        for i in range(6):
            a, b = 4 * i + 1, 4 * i + 3
            term = q ** a / _fact(a) - q ** b / _fact(b)
            if (term > 0) != (q > 0) or term == 0:
                return False
    return True


def prop_cos_sign(count: int = 100, seed: int = 13) -> bool:
    for q in _sample_open_unit(random.Random(seed), count, signed=True):
        for i in range(6):
            a, b = 4 * i, 4 * i + 2
            if not q ** a / _fact(a) - q ** b / _fact(b) > 0:
                return False
    return True


def _fact(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _bracket(r: mpq, p: int) -> tuple[mpq, mpq]:
    """Interval of magnitudes consistent with an approximation ``r`` at ``p`` bits."""
    a = abs(r)
    return a * (1 - pow2(-p)), a * (1 + pow2(-p))


def _grid(steps: int) -> list[mpq]:
    pts = [mpq(k, steps) for k in range(1, steps)]
    return pts + [-x for x in pts]


def prop_sin_condition(p: int = 32, steps: int = 64, cfg: EvalConfig | None = None) -> bool:
    """``|x cot x| < 1`` on a grid in ``(-1, 1)``, with engine brackets for sin and cos."""
    for x in _grid(steps):
        s_lo, _ = _bracket(compute(Sin(Const(x)), p, cfg), p)
        _, c_hi = _bracket(compute(Cos(Const(x)), p, cfg), p)
        if not abs(x) * c_hi / s_lo < 1:
            return False
    return True


def tan1_lower(p: int = 32, cfg: EvalConfig | None = None) -> mpq:
    """Lower bound for ``tan 1 = 2 s c / (c^2 - s^2)`` with ``s, c`` at ``1/2``."""
    half = Const(mpq(1, 2))
    s_lo, s_hi = _bracket(compute(Sin(half), p, cfg), p)
    c_lo, c_hi = _bracket(compute(Cos(half), p, cfg), p)
    return 2 * s_lo * c_lo / (c_hi * c_hi - s_lo * s_lo)


def prop_cos_condition(p: int = 32, steps: int = 64, cfg: EvalConfig | None = None) -> bool:
    """``|x tan x| < tan 1`` on a grid in ``(-1, 1)``."""
    bound = tan1_lower(p, cfg)
    for x in _grid(steps) + [mpq(0)]:
        if x == 0:
            continue
        _, s_hi = _bracket(compute(Sin(Const(x)), p, cfg), p)
        c_lo, _ = _bracket(compute(Cos(Const(x)), p, cfg), p)
        if not abs(x) * s_hi / c_lo < bound:
            return False
    return True


def prop_arctan_condition(p: int = 10, cfg: EvalConfig | None = None) -> bool:
    """``|x / ((1+x^2) arctan x)| < 1`` at ``x = +-k/8``, ``k = 1..16``."""
    for k in range(1, 17):
        for x in (mpq(k, 8), mpq(-k, 8)):
            a_lo, _ = _bracket(compute(Arctan(Const(x)), p, cfg), p)
            if not abs(x) / ((1 + x * x) * a_lo) < 1:
                return False
    return True


def prop_power_lemma(seed: int = 17) -> bool:
    """Loss values of the power lemma, and the bound itself on perturbed inputs."""
    if [pow_with_loss(mpq(3, 2), i)[1] for i in (1, 2, 5, 8)] != [0, 2, 6, 6]:
        return False
    rng = random.Random(seed)
    for _ in range(50):
        q = mpq(rng.randint(1, 99), rng.randint(1, 99))
        p = rng.randint(4, 40)
        for sign in (1, -1):
            # a real at the edge of what (m, n, p) allows
            x = q * (1 + sign * pow2(-p) * mpq(999, 1000))
            for i in range(1, 13):
                qi, loss = pow_with_loss(q, i)
                if loss != 2 * ceil_log2(mpq(i)):
                    return False
                if not abs(x ** i - qi) < abs(qi) * pow2(loss - p):
                    return False
    return True


PROPOSITIONS: dict[str, Callable[[], bool]] = {
    "prec2": prop_prec2,
    "prec1": prop_prec1,
    "ln_bounds": prop_ln_bounds,
    "sin_sign": prop_sin_sign,
    "cos_sign": prop_cos_sign,
    "sin_condition": prop_sin_condition,
    "cos_condition": prop_cos_condition,
    "arctan_condition": prop_arctan_condition,
    "power_lemma": prop_power_lemma,
}


def proposition_suite() -> dict[str, bool]:
    return {name: check() for name, check in PROPOSITIONS.items()}


__all__ = [
    "GOLDEN", "GoldenConstant", "golden_check", "cross_precision_check", "precisions_agree", "identity_residual",
    "IDENTITIES", "to_mpmath", "oracle_check", "random_expression", "random_corpus",
    "PROPOSITIONS", "proposition_suite",
]
