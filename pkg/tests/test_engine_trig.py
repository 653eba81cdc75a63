from __future__ import annotations

import math
import threading
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from exactreal import CostLimitExceeded, EvalConfig, PrecisionDivergence, compute, compute_traced, parse
from exactreal.engine import (choose_n_cos, choose_n_sin, clear_pi_cache, pi_approx, t_cos, t_sin,
                              taylor_cos_paired, taylor_sin_paired)
from exactreal.expr import Const, Cos, Sin
from exactreal.rational import pow2
from exactreal.verification import GOLDEN

from oracle import check_expr

unit = st.builds(lambda a, b: mpq(a, b), st.integers(-999, 999), st.just(1000)).filter(bool)


def brute_sin(p: int) -> int:
    """Smallest odd N >= 3 with (5/6)(2N+2)!(2N-1)^2 / 2^(2N) > 2^p, in Fractions."""
    n = 3
    while not Fraction(5, 6) * math.factorial(2 * n + 2) * (2 * n - 1) ** 2 / 2 ** (2 * n) \
            > Fraction(2) ** p:
        n += 2
    return n


def brute_cos(p: int) -> int:
    n = 1
    while not Fraction(math.factorial(2 * n + 1) * (2 * n - 2) ** 2, 2 ** (2 * n)) \
            > Fraction(2) ** p:
        n += 2
    return n


def test_choose_n_examples():
    assert choose_n_sin(10) == 3
    assert choose_n_cos(10) == 3
    assert choose_n_cos(0) == 3


@pytest.mark.parametrize("p", range(-20, 200, 3))
def test_choose_n_matches_brute_force(p):
    assert choose_n_sin(p) == brute_sin(p)
    assert choose_n_cos(p) == brute_cos(p)


def test_loss_constants():
    assert t_sin(3) == 9 and t_cos(3) == 7
    assert t_sin(5) == 11 and t_cos(5) == 9


def plain_series(q: Fraction, terms: int, sine: bool) -> Fraction:
    start = 1 if sine else 0
    return sum(Fraction((-1) ** k) * q ** (2 * k + start) / math.factorial(2 * k + start)
               for k in range(terms))


def test_paired_sums_equal_plain_partial_sums():
    q = mpq(1, 2)
    assert taylor_sin_paired(q, 3) == q - q**3 / 6 + q**5 / 120 - q**7 / 5040
    for n in (1, 3, 5, 7):
        # N = 2k+1 pairs cover 2k+2 plain terms
        assert taylor_sin_paired(q, n) == mpq(plain_series(Fraction(1, 2), n + 1, True))
        assert taylor_cos_paired(q, n) == mpq(plain_series(Fraction(1, 2), n + 1, False))


def test_paired_sums_reject_even_n():
    with pytest.raises(ValueError):
        taylor_sin_paired(mpq(1, 2), 4)


@given(unit, st.sampled_from([1, 3, 5, 9]))
def test_paired_sine_has_sign_of_argument(q, n):
    assert (taylor_sin_paired(q, n) > 0) == (q > 0)
    assert taylor_cos_paired(q, n) > 0


@given(unit, st.integers(0, 120))
@settings(max_examples=60)
def test_base_interval_sound_and_one_pass(q, p):
    for kind in (Sin, Cos):
        e = kind(Const(q))
        r, trace = compute_traced(e, p)
        assert trace.refinements == 0
        assert check_expr(e, r, p)


@pytest.mark.parametrize("text, p", [
    ("sin(3/2)", 40), ("sin(sqrt(2))", 30), ("sin(1)", 20), ("sin(1.99)", 12),
    ("cos(sqrt(1/2))", 50), ("sin(arctan(1/2))", 0), ("cos(-1)", 0),
])
def test_values_sound(text, p):
    e = parse(text)
    assert check_expr(e, compute(e, p), p)


def test_sin_between_one_and_two_skips_pi():
    _, trace = compute_traced(parse("sin(3/2)"), 20)
    assert not any(rec.node.endswith(".pi") for rec in trace.walk())


def test_cos_outside_unit_interval_fetches_pi():
    _, trace = compute_traced(parse("cos(-1)"), 0)
    assert any(rec.node == "r.pi" for rec in trace.walk())


@pytest.mark.parametrize("text", ["cos(3)", "cos(-3/2)"])
def test_large_reduction_fails_fast(text):
    with pytest.raises(CostLimitExceeded):
        compute(parse(text), 0)


def test_sine_of_pi_diverges():
    with pytest.raises(PrecisionDivergence):
        compute(parse("sin(4*arctan(1))"), 4, EvalConfig(max_terms=1 << 14))


def test_pi_matches_reference_digits():
    ref = GOLDEN["pi"].reference
    for p in (4, 8, 12):
        r = pi_approx(p)
        assert abs(r - ref) < abs(r) * pow2(-p)


def test_pi_consistent_across_precisions():
    a, b = pi_approx(4), pi_approx(12)
    assert abs(a - b) < 2 * pow2(-4) * abs(a)


def test_pi_cache_is_invisible():
    first = pi_approx(10)
    clear_pi_cache()
    assert pi_approx(10) == first


def test_pi_cache_hit_still_checks_budget():
    pi_approx(12)
    with pytest.raises(PrecisionDivergence):
        pi_approx(12, EvalConfig(max_terms=1 << 10))


def test_concurrent_pi_requests_agree():
    clear_pi_cache()
    out = []
    workers = [threading.Thread(target=lambda: out.append(pi_approx(9))) for _ in range(4)]
    for w in workers:
        w.start()
    for w in workers:
        w.join()
    assert len(set(out)) == 1
    with mpmath.workprec(100):
        assert check_expr(parse("4*arctan(1)"), out[0], 9)
