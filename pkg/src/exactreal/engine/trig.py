"""Sine and cosine from paired Taylor sums, with range reduction by pi.

Grouping consecutive terms of the alternating series in pairs makes every
summand carry the sign of the argument, so summation loses no precision.
Arguments outside ``(-1, 1)`` are shifted by a multiple of an approximated
pi into ``(0, pi)`` and then halved or split with double-angle identities.
"""

from __future__ import annotations

import copy
import math
import threading

from gmpy2 import mpq

from ..expr import Arctan, Const, Cos, Mul, Sin
from ..rational import ONE, ZERO, bit_size, ceil_log2, floor_q, log2_ratio_loss
from .core import EvalConfig, Evaluator, TraceRecord, handles
from .riemann import arctan_bits, arctan_terms

PI_EXPR = Mul(Const(mpq(4)), Arctan(Const(ONE)))


def taylor_sin_paired(q: mpq, n: int) -> mpq:
    """``sum_{i<=k} q^{4i+1}/(4i+1)! * (1 - q^2/((4i+2)(4i+3)))`` with ``n = 2k+1``."""
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be a positive odd integer")
    q2 = q * q
    q4 = q2 * q2
    term = q  # q^{4i+1}/(4i+1)!
    total = ZERO
    for i in range((n - 1) // 2 + 1):
        j = 4 * i
        total += term * (1 - q2 / ((j + 2) * (j + 3)))
        term = term * q4 / ((j + 2) * (j + 3) * (j + 4) * (j + 5))
    return total


def taylor_cos_paired(q: mpq, n: int) -> mpq:
    """``sum_{i<=k} q^{4i}/(4i)! * (1 - q^2/((4i+1)(4i+2)))`` with ``n = 2k+1``."""
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be a positive odd integer")
    q2 = q * q
    q4 = q2 * q2
    term = ONE
    total = ZERO
    for i in range((n - 1) // 2 + 1):
        j = 4 * i
        total += term * (1 - q2 / ((j + 1) * (j + 2)))
        term = term * q4 / ((j + 1) * (j + 2) * (j + 3) * (j + 4))
    return total


def _exceeds(lhs: int, rhs_log2: int) -> bool:
    """``lhs > 2**rhs_log2`` for an integer ``lhs`` and any integer exponent."""
    if rhs_log2 < 0:
        return lhs << -rhs_log2 > 1
    return lhs > 1 << rhs_log2


def sin_accepts(n: int, q: int) -> bool:
    """``(5/6) (2n+2)! (2n-1)^2 / 2^{2n} > 2^q``."""
    lhs = 5 * math.factorial(2 * n + 2) * (2 * n - 1) ** 2
    if q + 2 * n < 0:
        return lhs << -(q + 2 * n) > 6
    return lhs > 6 << (q + 2 * n)


def cos_accepts(n: int, q: int) -> bool:
    """``(2n+1)! (2n-2)^2 / 2^{2n} > 2^q``."""
    return _exceeds(math.factorial(2 * n + 1) * (2 * n - 2) ** 2, q + 2 * n)


def t_sin(n: int) -> int:
    return 2 * ceil_log2(mpq(2 * n - 1)) + 3


def t_cos(n: int) -> int:
    return 2 * ceil_log2(mpq(2 * n - 2)) + 3


def choose_n_sin(p: int) -> int:
    """Smallest odd ``N >= 3`` meeting the sine remainder bound for ``p`` bits."""
    n = 3
    while not sin_accepts(n, p):
        n += 2
    return n


def choose_n_cos(p: int) -> int:
    """Smallest odd ``N`` meeting the cosine remainder bound for ``p`` bits."""
    n = 1
    while not cos_accepts(n, p):
        n += 2
    return n


def sin_start(p: int) -> tuple[int, int]:
    """``(N, p_x)`` for the base interval: the bound must absorb its own loss."""
    n = 3
    while not sin_accepts(n, p + t_sin(n)):
        n += 2
    return n, p + t_sin(n)


def cos_start(p: int) -> tuple[int, int]:
    n = 3
    while not cos_accepts(n, p + t_cos(n)):
        n += 2
    return n, p + t_cos(n)


_pi_lock = threading.Lock()
_pi_cache: dict[int, tuple[mpq, TraceRecord]] = {}


def _repath(rec: TraceRecord, old: str, new: str) -> TraceRecord:
    out = copy.deepcopy(rec)
    for r in out.walk():
        r.node = new + r.node[len(old):]
    return out


def pi_child(ev: Evaluator, rec: TraceRecord, p: int) -> mpq:
    """pi to ``p`` bits as ``4 arctan(1)``, recorded as the child ``<node>.pi``.

    Results are memoized per precision. A cache hit still passes the budget
    check, so the outcome never depends on what ran before.
    """
    path = f"{rec.node}.pi"
    with _pi_lock:
        hit = _pi_cache.get(p)
    if hit is None:
        value, sub = ev.run(PI_EXPR, p, path)
        with _pi_lock:
            _pi_cache.setdefault(p, (value, sub))
    else:
        value, cached = hit
        n = arctan_terms(ONE, p)
        ev.charge(rec, n, arctan_bits(ONE, n))
        sub = _repath(cached, cached.node, path)
    rec.children.append(sub)
    return value


def pi_approx(p: int, cfg: EvalConfig | None = None) -> mpq:
    """Rational within relative ``2**-p`` of pi."""
    if p < 0:
        raise ValueError("precision must be non-negative")
    ev = Evaluator(cfg or EvalConfig())
    return pi_child(ev, TraceRecord("pi", "pi", p, p), p)


def clear_pi_cache() -> None:
    with _pi_lock:
        _pi_cache.clear()


def taylor_bits(q: mpq, n: int) -> int:
    """Rough size of the largest power formed by an ``n``-term paired sum."""
    return 2 * bit_size(q) * (2 * n + 3)


def _charge_reduction(ev: Evaluator, rec: TraceRecord, px: int) -> None:
    """Refuse a shift by pi whose Taylor sums would outgrow the budget.

    Checked before pi is fetched. The shifted argument is at least as large
    as pi at ``px`` bits, which measures about half of ``arctan_bits``; a
    quarter is used as a conservative floor.
    """
    pi_bits = arctan_bits(ONE, arctan_terms(ONE, px)) // 4
    ev.charge(rec, 3, 2 * pi_bits * (2 * 3 + 3))


def _reduced_sine(ev: Evaluator, rec: TraceRecord, y: mpq, pi: mpq,
                  px: int, s1: int, p: int) -> mpq | None:
    """``sin(y)`` for ``0 < y < pi`` known to ``px - s1`` bits; None means refine."""
    n1 = choose_n_sin(px - s1)
    n2 = choose_n_cos(px - s1)
    if y < 1:
        loss = s1 + t_sin(n1)
        if px - loss < p:
            return None
        ev.charge(rec, n1, taylor_bits(y, n1))
        rec.terms, rec.delivered_p = n1, px - loss
        return taylor_sin_paired(y, n1)
    if y < 2:
        loss = s1 + max(t_sin(n1), t_cos(n2)) + 2
        if px - loss < p:
            return None
        h = y / 2
        ev.charge(rec, n1 + n2, taylor_bits(h, n1) + taylor_bits(h, n2))
        rec.terms, rec.delivered_p = max(n1, n2), px - loss
        return 2 * taylor_sin_paired(h, n1) * taylor_cos_paired(h, n2)
    q, rest = y / 4, (pi - y) / 4
    s2 = log2_ratio_loss(pi / 4, q)
    if s2 is None:
        return None
    n3 = choose_n_sin(px - s1 - s2)
    n4 = choose_n_cos(px - s1 - s2)
    t3 = max(t_sin(n1), t_cos(n2), t_sin(n3), t_cos(n4))
    loss = s1 + s2 + t3 + 6
    if px - loss < p:
        return None
    ev.charge(rec, n1 + n2 + n3 + n4, taylor_bits(q, n1) + taylor_bits(q, n2)
              + taylor_bits(rest, n3) + taylor_bits(rest, n4))
    rec.terms, rec.delivered_p = max(n1, n2, n3, n4), px - loss
    return (8 * taylor_sin_paired(q, n1) * taylor_cos_paired(q, n2)
            * taylor_sin_paired(rest, n3) * taylor_cos_paired(rest, n4))


@handles(Sin)
def compute_sin(ev: Evaluator, node: Sin, p: int, rec: TraceRecord) -> mpq:
    n, px = sin_start(p)
    while True:
        v, sub = ev.child(rec, node.arg, 0, px)
        if -1 < v < 1:
            ev.charge(rec, n, taylor_bits(v, n))
            rec.terms, rec.delivered_p = n, px - t_sin(n)
            return taylor_sin_paired(v, n)
        if 1 <= v < 2:
            # already inside (0, pi): k = 0 and no pi is needed
            out = _reduced_sine(ev, rec, v, ZERO, px, 0, p)
        else:
            if v < 0 or v >= 4:
                # pi < 4, so the shift below is nonzero
                _charge_reduction(ev, rec, px)
            pi = pi_child(ev, rec, px)
            k = floor_q(-v / pi) + 1
            y = v + k * pi
            if not 0 < y < pi:
                ev.refine(rec, node, "reduced argument on a multiple of pi")
                px += 1
                continue
            s1 = log2_ratio_loss(v, k * pi)
            out = None if s1 is None else _reduced_sine(ev, rec, y, pi, px, s1, p)
        if out is not None:
            return out
        ev.refine(rec, node, "argument close to a multiple of pi")
        px += 1


@handles(Cos)
def compute_cos(ev: Evaluator, node: Cos, p: int, rec: TraceRecord) -> mpq:
    n, px = cos_start(p)
    while True:
        v, sub = ev.child(rec, node.arg, 0, px)
        if -1 < v < 1:
            ev.charge(rec, n, taylor_bits(v, n))
            rec.terms, rec.delivered_p = n, px - t_cos(n)
            return taylor_cos_paired(v, n)
        _charge_reduction(ev, rec, px)
        pi = pi_child(ev, rec, px)
        k = floor_q(-v / pi + mpq(1, 2))
        shift = (2 * k + 1) * pi / 2
        y = v + shift
        out = None
        if 0 < y < pi:
            s1 = log2_ratio_loss(v, shift)
            if s1 is not None:
                out = _reduced_sine(ev, rec, y, pi, px, s1, p)
        if out is not None:
            return out if k % 2 == 0 else -out
        ev.refine(rec, node, "argument close to an odd multiple of pi/2")
        px += 1
