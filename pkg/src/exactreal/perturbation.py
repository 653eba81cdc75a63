"""Condition numbers per node and a prediction of which nodes will iterate.

For a unary ``f`` the condition number is ``|x f'(x) / f(x)|``; for a binary
``f(a, b)`` it is the componentwise sum ``|a f_a / f| + |b f_b / f|``. A large
value means a small relative error in the input becomes a large one in the
output, which is exactly when the engine's refinement loops have to run.

Node values are taken from mpmath at a working precision rather than from
the engine: the engine's pi costs ``2**p`` rectangles, which would make the
analysis slower than the evaluation it is meant to predict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import mpmath
from gmpy2 import mpq

from .errors import DomainError, ExactRealError
from .expr import Add, Arctan, Const, Cos, Exp, Expr, Inv, Ln, Mul, Neg, Sin, Sqrt

INF = "inf"
Condition = Union[mpq, str]

CONSTANT_BOUNDED = "constant-bounded"
ARGUMENT_DEPENDENT = "argument-dependent"
ILL_CONDITIONED = "ill-conditioned-near-singularity"

# kinds whose engine handler contains a refinement loop
LOOPING = ("add", "exp", "ln", "sin", "cos")
# kinds whose condition number is a constant independent of the argument
FIXED = {"const": mpq(0), "neg": mpq(1), "inv": mpq(1), "mul": mpq(2), "sqrt": mpq(1, 2)}


def to_exact(x: mpmath.mpf) -> mpq:
    """The binary float ``x`` as the rational it denotes."""
    x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError(f"not a finite value: {x}")
    sign, man, exp, _ = x._mpf_
    q = mpq(man) * mpq(2) ** exp
    return -q if sign else q


def _mpf(q: mpq) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def condition_add(a: mpq, b: mpq) -> Condition:
    """``(|a| + |b|) / |a + b|``, or ``INF`` when the sum vanishes."""
    s = a + b
    if s == 0:
        return INF
    return (abs(a) + abs(b)) / abs(s)


def condition_mul(a: mpq, b: mpq) -> mpq:
    return mpq(2)


def condition_unary(op: str, a) -> Condition:
    """Condition number of a unary kind at ``a`` (rational or mpmath value)."""
    if op in FIXED and op != "const":
        if op == "inv" and a == 0:
            raise DomainError("inverse of zero")
        if op == "sqrt" and a < 0:
            raise DomainError("square root of a negative value")
        return FIXED[op]
    if op == "exp":
        return abs(mpq(a)) if isinstance(a, mpq) else to_exact(abs(a))
    x = _mpf(a) if isinstance(a, mpq) else mpmath.mpf(a)
    if op == "ln":
        if x <= 0:
            raise DomainError("logarithm of a non-positive value")
        lx = mpmath.log(x)
        return INF if lx == 0 else to_exact(abs(1 / lx))
    if op == "arctan":
        if x == 0:
            return mpq(1)
        return to_exact(abs(x / ((1 + x * x) * mpmath.atan(x))))
    if op == "sin":
        if x == 0:
            return mpq(1)
        s = mpmath.sin(x)
        return INF if s == 0 else to_exact(abs(x * mpmath.cos(x) / s))
    if op == "cos":
        c = mpmath.cos(x)
        return INF if c == 0 else to_exact(abs(x * mpmath.sin(x) / c))
    raise ValueError(f"no unary condition number for {op!r}")


def _exceeds(c: Condition, threshold: mpq) -> bool:
    return c == INF or c > threshold


@dataclass
class ConditionEstimate:
    """Analysis of one node: its condition number and the resulting prediction."""

    node: str
    op: str
    condition: Condition
    classification: str
    flagged: bool
    exact: bool
    value: mpq | None = None
    children: list["ConditionEstimate"] = field(default_factory=list)

    def walk(self):
        yield self
        for kid in self.children:
            yield from kid.walk()

    def as_dict(self) -> dict:
        return {"node": self.node, "op": self.op, "condition": condition_text(self.condition),
                "class": self.classification, "flagged": self.flagged}


@dataclass
class ConditionReport:
    root: ConditionEstimate
    threshold: mpq
    overall: Condition | None = None

    def nodes(self) -> list[ConditionEstimate]:
        return list(self.root.walk())

    def flagged(self) -> list[ConditionEstimate]:
        return [n for n in self.root.walk() if n.flagged]

    def find(self, path: str) -> ConditionEstimate:
        for n in self.root.walk():
            if n.node == path:
                return n
        raise KeyError(path)

    def as_dict(self) -> dict:
        out = {"threshold": condition_text(self.threshold),
               "report": [n.as_dict() for n in self.root.walk()]}
        if self.overall is not None:
            out["overall_condition"] = condition_text(self.overall)
        return out


def condition_text(c: Condition) -> str:
    if c == INF:
        return INF
    c = mpq(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _classify(op: str, cond: Condition, kids: list[ConditionEstimate],
              threshold: mpq) -> str:
    if op in FIXED or op == "arctan":
        return CONSTANT_BOUNDED
    if op == "add":
        a, b = (k.value for k in kids)
        if (a * b > 0) or (kids[0].exact and a == 0) or (kids[1].exact and b == 0):
            return CONSTANT_BOUNDED
    if op in ("exp", "sin", "cos") and abs(kids[0].value) < 1:
        return CONSTANT_BOUNDED
    return ILL_CONDITIONED if _exceeds(cond, threshold) else ARGUMENT_DEPENDENT


class _Analyzer:
    def __init__(self, threshold: mpq, wrt: mpq | None):
        self.threshold = threshold
        self.wrt = wrt

    def node(self, e: Expr, path: str) -> tuple[ConditionEstimate, object, object]:
        """Estimate for ``e`` plus its value and derivative w.r.t. the marked leaves."""
        try:
            return self._node(e, path)
        except ExactRealError as err:
            if err.node is None:
                err.node, err.span = path, e.span
            raise

    def _node(self, e: Expr, path: str):
        if isinstance(e, Const):
            d = 1 if self.wrt is not None and e.value == self.wrt else 0
            est = ConditionEstimate(path, "const", FIXED["const"], CONSTANT_BOUNDED,
                                    False, True, e.value)
            return est, e.value, mpmath.mpf(d)
        parts = [self.node(k, f"{path}.{i}") for i, k in enumerate(e.children)]
        kids = [p[0] for p in parts]
        vals = [p[1] for p in parts]
        ders = [p[2] for p in parts]
        exact = all(k.exact for k in kids) and isinstance(e, (Neg, Add, Mul, Inv))
        value, der = self._apply(e, vals, ders, exact)
        if isinstance(e, Add):
            cond = condition_add(*(self._rat(v) for v in vals))
        elif isinstance(e, Mul):
            cond = condition_mul(*(self._rat(v) for v in vals))
        else:
            cond = condition_unary(e.op, vals[0])
        cls = _classify(e.op, cond, [self._with_rat(k, v) for k, v in zip(kids, vals)],
                        self.threshold)
        flagged = e.op in LOOPING and not exact and _exceeds(cond, self.threshold)
        rat = self._rat(value)
        est = ConditionEstimate(path, e.op, cond, cls, flagged, exact, rat, kids)
        return est, value, der

    @staticmethod
    def _rat(v) -> mpq:
        return v if isinstance(v, mpq) else to_exact(v)

    def _with_rat(self, k: ConditionEstimate, v) -> ConditionEstimate:
        k.value = self._rat(v)
        return k

    @staticmethod
    def _apply(e: Expr, vals: list, ders: list, exact: bool):
        if exact:
            a = vals[0]
            if isinstance(e, Neg):
                value = -a
            elif isinstance(e, Add):
                value = vals[0] + vals[1]
            elif isinstance(e, Mul):
                value = vals[0] * vals[1]
            else:
                if a == 0:
                    raise DomainError("inverse of exact zero")
                value = 1 / a
        else:
            value = None
        x = [v if not isinstance(v, mpq) else _mpf(v) for v in vals]
        dx = ders
        if isinstance(e, Neg):
            f, df = -x[0], -dx[0]
        elif isinstance(e, Add):
            f, df = x[0] + x[1], dx[0] + dx[1]
        elif isinstance(e, Mul):
            f, df = x[0] * x[1], dx[0] * x[1] + x[0] * dx[1]
        elif isinstance(e, Inv):
            if x[0] == 0:
                raise DomainError("inverse of zero")
            f, df = 1 / x[0], -dx[0] / (x[0] * x[0])
        elif isinstance(e, Sqrt):
            if x[0] < 0:
                raise DomainError("square root of a negative value")
            f = mpmath.sqrt(x[0])
            df = dx[0] / (2 * f) if f != 0 else mpmath.mpf(0)
        elif isinstance(e, Exp):
            f = mpmath.exp(x[0])
            df = f * dx[0]
        elif isinstance(e, Ln):
            if x[0] <= 0:
                raise DomainError("logarithm of a non-positive value")
            f, df = mpmath.log(x[0]), dx[0] / x[0]
        elif isinstance(e, Arctan):
            f, df = mpmath.atan(x[0]), dx[0] / (1 + x[0] * x[0])
        elif isinstance(e, Sin):
            f, df = mpmath.sin(x[0]), mpmath.cos(x[0]) * dx[0]
        elif isinstance(e, Cos):
            f, df = mpmath.cos(x[0]), -mpmath.sin(x[0]) * dx[0]
        else:
            raise TypeError(f"unknown node kind {type(e).__name__}")
        return (value if value is not None else f), df


def analyze(e: Expr, p: int = 32, threshold=4, wrt=None) -> ConditionReport:
    """Annotate every node of ``e`` with its condition number and classification.

    A node is flagged when its evaluation contains a refinement loop and its
    condition number exceeds ``threshold``; exactly computable rational
    subtrees are never flagged. Values are computed with ``p`` bits of
    working precision. With ``wrt`` given, every constant leaf equal to it
    is treated as one variable ``x`` and ``overall`` holds the condition
    number of the whole expression as a function of ``x``.
    """
    if p < 2:
        raise ValueError("working precision must be at least 2 bits")
    threshold = mpq(threshold)
    wrt_q = None if wrt is None else mpq(wrt)
    with mpmath.workprec(p):
        root, value, der = _Analyzer(threshold, wrt_q).node(e, "r")
        overall = None
        if wrt_q is not None:
            f = value if not isinstance(value, mpq) else _mpf(value)
            overall = INF if f == 0 else to_exact(abs(_mpf(wrt_q) * der / f))
    return ConditionReport(root, threshold, overall)
