"""Negation, multiplication, inverse, addition and square root.

All but addition are one-pass: the precision each loses is a constant
independent of the argument, so children are requested once at a fixed
higher precision.
"""

from __future__ import annotations

from gmpy2 import mpq

from ..errors import DomainError
from ..expr import Add, Const, Inv, Mul, Neg, Sqrt
from ..rational import ZERO, bit_size, floor_log2, log2_ratio_loss, pow2
from .core import Evaluator, TraceRecord, handles


@handles(Neg)
def compute_neg(ev: Evaluator, node: Neg, p: int, rec: TraceRecord) -> mpq:
    v, sub = ev.child(rec, node.arg, 0, p)
    rec.delivered_p, rec.exact = sub.delivered_p, sub.exact
    return -v


@handles(Mul)
def compute_mul(ev: Evaluator, node: Mul, p: int, rec: TraceRecord) -> mpq:
    consts = [i for i, k in enumerate(node.children) if isinstance(k, Const)]
    if consts:
        # an exact factor scales the relative error by exactly 1
        (ci,) = consts
        c = node.children[ci].value
        oi = 1 - ci
        v, sub = ev.child(rec, node.children[oi], oi, p)
        rec.delivered_p = sub.delivered_p
        rec.exact = sub.exact or c == 0
        return c * v
    a, sa = ev.child(rec, node.left, 0, p + 2)
    b, sb = ev.child(rec, node.right, 1, p + 2)
    if (sa.exact and a == 0) or (sb.exact and b == 0) or (sa.exact and sb.exact):
        rec.exact = True
        return a * b
    rec.delivered_p = min(sa.delivered_p, sb.delivered_p) - 2
    return a * b


@handles(Inv)
def compute_inv(ev: Evaluator, node: Inv, p: int, rec: TraceRecord) -> mpq:
    v, sub = ev.child(rec, node.arg, 0, p + 1)
    if v == 0:
        raise DomainError("inverse of exact zero")
    rec.exact = sub.exact
    rec.delivered_p = sub.delivered_p - 1
    return 1 / v


@handles(Add)
def compute_add(ev: Evaluator, node: Add, p: int, rec: TraceRecord) -> mpq:
    dp = p
    while True:
        a, sa = ev.child(rec, node.left, 0, dp)
        b, sb = ev.child(rec, node.right, 1, dp)
        if sa.exact and sb.exact:
            rec.exact = True
            return a + b
        if a * b > 0 or a == 0 or b == 0:
            # same sign, or one side an exact zero: no loss
            rec.delivered_p = min(sa.delivered_p, sb.delivered_p)
            return a + b
        loss = log2_ratio_loss(a, b)
        if loss is not None and dp - loss >= p:
            rec.delivered_p = min(sa.delivered_p, sb.delivered_p) - loss
            return a + b
        ev.refine(rec, node, "operands cancel" if loss is None
                  else f"cancellation costs {loss} bits")
        dp += 1


def _sqrt_inner(px: int) -> int:
    # ceil(log2(log2(2**(px+3) + 1))) is exactly the bit length of px + 3
    return (px + 3).bit_length()


def sqrt_params(p: int) -> tuple[int, int]:
    """Smallest child precision ``p_x`` and Newton step count for target ``p``."""
    px = p + 8
    while px < p + 4 * _sqrt_inner(px) + 4:
        px += 1
    return px, _sqrt_inner(px) + 1


def newton_sqrt(q: mpq, steps: int) -> mpq:
    """``steps`` Newton iterations for sqrt(q) from the dyadic seed above it."""
    a = floor_log2(q) + 1
    y = pow2(-(-a // 2) + 1)
    for _ in range(steps):
        y = (y * y + q) / (2 * y)
    return y


@handles(Sqrt)
def compute_sqrt(ev: Evaluator, node: Sqrt, p: int, rec: TraceRecord) -> mpq:
    px, steps = sqrt_params(p)
    v, sub = ev.child(rec, node.arg, 0, px)
    if v < 0:
        raise DomainError(f"square root of negative value {float(v):.6g}")
    if v == 0:
        rec.exact = True
        return ZERO
    # each step roughly doubles the size of the iterate
    ev.charge(rec, steps, (bit_size(v) + abs(floor_log2(v)) + 4) << steps)
    rec.terms = steps
    rec.delivered_p = px - 4 * steps
    return newton_sqrt(v, steps)
