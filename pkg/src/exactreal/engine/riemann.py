"""exp, ln and arctan from rectangle sums under a monotone curve.

Each value is an area: ``ln x`` under ``1/t`` on ``[1, x]``, ``arctan x``
under ``1/(1+t^2)`` on ``[0, x]``, and ``e^x`` from the sum for
``e^{2x} - 1``, which closes to ``(N/(N-2x))^{N/2}``. Error bounds need
``N`` proportional to ``2**p``, so the cost is exponential in the precision.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

from ..errors import DomainError
from ..expr import Arctan, Exp, Ln
from ..rational import ONE, ZERO, bit_size, ceil_log2, ceil_q, floor_log2, floor_q, log2_ratio_loss, pow2
from .core import Evaluator, TraceRecord, handles


def sum_reciprocals(dens: list) -> mpq:
    """Exact ``sum(1/d)`` by pairwise merging, reducing only once at the end."""
    if not dens:
        return ZERO
    nums = [mpz(1)] * len(dens)
    dens = [mpz(d) for d in dens]
    while len(dens) > 1:
        nn, dd = [], []
        for i in range(0, len(dens) - 1, 2):
            nn.append(nums[i] * dens[i + 1] + nums[i + 1] * dens[i])
            dd.append(dens[i] * dens[i + 1])
        if len(dens) % 2:
            nn.append(nums[-1])
            dd.append(dens[-1])
        nums, dens = nn, dd
    return mpq(nums[0], dens[0])


def ln_upper_sum(arg: mpq, n: int) -> mpq:
    """Left-endpoint sum ``(arg-1)/n * sum_{i<n} 1/(1 + (i/n)(arg-1))``, for ``arg > 1``."""
    a, b = arg.numerator, arg.denominator
    step = a - b
    return step * sum_reciprocals([n * b + i * step for i in range(n)])


def arctan_upper_sum(x: mpq, n: int) -> mpq:
    """Left-endpoint sum ``x/n * sum_{i<n} 1/(1 + (i x/n)^2)``; odd in ``x``."""
    a, b = x.numerator, x.denominator
    nb2 = (n * b) ** 2
    a2 = a * a
    return a * n * b * sum_reciprocals([nb2 + i * i * a2 for i in range(n)])


def exp_upper(x: mpq, n: int) -> mpq:
    """``(n/(n-2x))^{n/2}``, an upper bound for ``e^x`` when ``0 < 2x < n``."""
    return mpq(n, 1) ** (n // 2) / (n - 2 * x) ** (n // 2)


def exp_base(x: mpq, n: int) -> mpq:
    """Approximation of ``e^x`` for ``0 < |x| < 1``; negative ``x`` via ``1/e^{-x}``."""
    return exp_upper(x, n) if x > 0 else 1 / exp_upper(-x, n)


def choose_n_exp(px: int) -> int:
    """Smallest even ``N`` with ``N > max(2**ceil((px+11)/3), 8)``."""
    e = -(-(px + 11) // 3)
    bound = max(pow2(e), mpq(8))
    n = floor_q(bound) + 1
    return n + (n & 1)


def exp_loss(n: int) -> int:
    return 2 * ceil_log2(mpq(n, 2))


def exp_start_precision(p: int) -> int:
    """Smallest ``p_x`` for which the worst base case (negative argument) passes."""
    px = p
    while px - exp_loss(choose_n_exp(px)) - 4 < p:
        px += 1
    return px


def exp_reduction(v: mpq) -> tuple[int, mpq]:
    """``k`` and ``v / 2**k`` with the quotient inside ``(-1, 1)``."""
    if abs(v) < 1:
        return 0, v
    k = floor_log2(abs(v)) + 1
    return k, v * pow2(-k)


def _exp_power_bits(base: mpq, n: int, k: int) -> int:
    return ((n // 2) << k) * (bit_size(base) + n.bit_length() + 2)


def _exp_exact(ev: Evaluator, v: mpq, p: int, rec: TraceRecord) -> mpq:
    """``e^v`` for an exactly known ``v``.

    The input carries no error, so only the rectangle error remains:
    ``|e^y - (N/(N-2y))^{N/2}| <= (2y^2/N) (N/(N-2y))^{N/2}`` for
    ``0 < y < 1``. Taking ``N > 2**(q+1) y^2`` gives precision ``q``; the
    reciprocal for negative ``y`` costs one bit and squaring ``k`` times
    costs ``2k``.
    """
    k, base = exp_reduction(v)
    q = p + 2 * k + (1 if base < 0 else 0)
    bound = max(pow2(q + 1) * base * base, mpq(8))
    n = floor_q(bound) + 1
    n += n & 1
    ev.charge(rec, n, _exp_power_bits(base, n, k))
    rec.terms = n
    rec.delivered_p = p
    return exp_base(base, n) ** (1 << k)


@handles(Exp)
def compute_exp(ev: Evaluator, node: Exp, p: int, rec: TraceRecord) -> mpq:
    px = exp_start_precision(p)
    while True:
        v, sub = ev.child(rec, node.arg, 0, px)
        if sub.exact:
            if v == 0:
                rec.exact = True
                return ONE
            return _exp_exact(ev, v, p, rec)
        n = choose_n_exp(px)
        k, base = exp_reduction(v)
        loss = exp_loss(n) + 2 * k + (3 if base > 0 else 4)
        if px - loss >= p:
            ev.charge(rec, n, _exp_power_bits(base, n, k))
            rec.terms = n
            rec.delivered_p = px - loss
            return exp_base(base, n) ** (1 << k)
        ev.refine(rec, node, f"argument needs {k} halvings")
        px += 1


def ln_terms(arg: mpq, px: int) -> int:
    """``ceil(2**(px-2) * arg^2 / (arg - 1))``."""
    return ceil_q(pow2(px - 2) * arg * arg / (arg - 1))


@handles(Ln)
def compute_ln(ev: Evaluator, node: Ln, p: int, rec: TraceRecord) -> mpq:
    px = p + 5
    while True:
        v, sub = ev.child(rec, node.arg, 0, px)
        if v <= 0:
            raise DomainError(f"logarithm of non-positive value {float(v):.6g}")
        if v == 1:
            if sub.exact:
                rec.exact = True
                return ZERO
            ev.refine(rec, node, "argument approximated as exactly 1")
            px += 1
            continue
        arg, ell = (v, 4) if v > 1 else (1 / v, 5)
        j = log2_ratio_loss(arg, ONE)
        if px - j - ell >= p:
            n = ln_terms(arg, px)
            ev.charge(rec, n, n * (bit_size(arg) + n.bit_length() + 2))
            rec.terms = n
            rec.delivered_p = px - j - ell
            s = ln_upper_sum(arg, n)
            return s if v > 1 else -s
        ev.refine(rec, node, f"argument close to 1 costs {j} bits")
        px += 1


def arctan_terms(x: mpq, p: int) -> int:
    """``2**(p+4) * ceil(x^2)``: rectangles for the target precision ``p``."""
    return (1 << (p + 4)) * ceil_q(x * x)


def arctan_bits(x: mpq, n: int) -> int:
    return n * (2 * bit_size(x) + 2 * n.bit_length() + 2)


@handles(Arctan)
def compute_arctan(ev: Evaluator, node: Arctan, p: int, rec: TraceRecord) -> mpq:
    v, sub = ev.child(rec, node.arg, 0, p + 6)
    if v == 0:
        rec.exact = True
        return ZERO
    n = arctan_terms(v, p)
    ev.charge(rec, n, arctan_bits(v, n))
    rec.terms = n
    rec.delivered_p = p
    return arctan_upper_sum(v, n)


def pow_with_loss(q: mpq, i: int) -> tuple[mpq, int]:
    """``q**i`` and the bits it costs: an approximation at ``p`` becomes one at ``p - 2 ceil(log2 i)``."""
    if i < 1:
        raise ValueError("exponent must be at least 1")
    return mpq(q) ** i, 2 * ceil_log2(mpq(i))
