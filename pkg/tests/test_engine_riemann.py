from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from exactreal import (CostLimitExceeded, DomainError, EvalConfig, PrecisionDivergence, compute,
                       compute_traced, parse)
from exactreal.engine import (arctan_terms, arctan_upper_sum, choose_n_exp, exp_start_precision,
                              exp_upper, ln_terms, ln_upper_sum, pow_with_loss, sum_reciprocals)
from exactreal.expr import Arctan, Const, Exp, Ln

from oracle import check_expr

small = EvalConfig(max_terms=1 << 16)


def test_choose_n_exp_example():
    assert choose_n_exp(10) == 130


@pytest.mark.parametrize("px", range(-5, 60))
def test_choose_n_exp_matches_brute_force(px):
    bound = max(2 ** Fraction(math.ceil(Fraction(px + 11, 3))), 8)
    n = next(k for k in range(2, 10**9, 2) if k > bound)
    assert choose_n_exp(px) == n


def test_exp_start_precision_covers_worst_case():
    for p in range(0, 30):
        px = exp_start_precision(p)
        loss = lambda q: 2 * math.ceil(math.log2(choose_n_exp(q) // 2)) + 4  # noqa: E731
        assert px - loss(px) >= p
        assert all(q - loss(q) < p for q in range(p, px))


def test_ln_terms_example():
    assert ln_terms(mpq(3), 10) == 1152


def test_arctan_terms_example():
    assert arctan_terms(mpq(1), 4) == 256
    assert arctan_terms(mpq(-1, 3), 4) == 256
    assert arctan_terms(mpq(3, 2), 4) == 768


def test_sum_reciprocals_matches_fraction_sum():
    dens = [3, 7, 11, 5, 2, 9, 13]
    assert sum_reciprocals(dens) == mpq(sum(Fraction(1, d) for d in dens))
    assert sum_reciprocals([]) == 0


args_above_one = st.builds(lambda a, b: mpq(a + b, b), st.integers(1, 50), st.integers(1, 50))


@given(args_above_one, st.sampled_from([8, 64, 512]))
@settings(max_examples=30)
def test_ln_rectangles_bracket_the_area(x, n):
    upper = ln_upper_sum(x, n)
    step = (x - 1) / n
    lower = step * sum(1 / (1 + (i + 1) * step) for i in range(n))
    with mpmath.workprec(200):
        true = mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
        assert mpmath.mpf(lower.numerator) / lower.denominator <= true
        assert true <= mpmath.mpf(upper.numerator) / upper.denominator


@given(st.builds(mpq, st.integers(-40, 40).filter(bool), st.integers(1, 20)),
       st.sampled_from([8, 64, 512]))
@settings(max_examples=30)
def test_arctan_rectangles_bracket_the_area(x, n):
    upper = arctan_upper_sum(x, n)
    ax = abs(x)
    lower = ax / n * sum(1 / (1 + ((i + 1) * ax / n) ** 2) for i in range(n))
    with mpmath.workprec(200):
        true = mpmath.atan(mpmath.mpf(ax.numerator) / ax.denominator)
        assert mpmath.mpf(lower.numerator) / lower.denominator <= true
        assert true <= abs(mpmath.mpf(upper.numerator) / upper.denominator)
    assert (upper > 0) == (x > 0)


@given(st.builds(mpq, st.integers(1, 99), st.just(100)))
@settings(max_examples=30)
def test_exp_closed_forms_bracket(x):
    with mpmath.workprec(200):
        true = mpmath.exp(mpmath.mpf(x.numerator) / x.denominator)
        for n in (16, 64, 256):
            lower = (1 + 2 * x / n) ** (n // 2)
            upper = exp_upper(x, n)
            assert mpmath.mpf(lower.numerator) / lower.denominator <= true
            assert true <= mpmath.mpf(upper.numerator) / upper.denominator
            assert upper <= exp_upper(x, n // 2) or n == 16


@pytest.mark.parametrize("text, p", [
    ("exp(1)", 12), ("exp(1/3)", 10), ("exp(-5/2)", 10), ("exp(-1/7)", 12), ("exp(6)", 6),
    ("ln(2)", 10), ("ln(3)", 8), ("ln(1/3)", 8), ("ln(1.5)", 6), ("ln(100)", 8),
    ("arctan(1)", 12), ("arctan(3)", 8), ("arctan(-1/2)", 12), ("arctan(sqrt(2))", 10),
    ("arctan(-sqrt(1/3))", 10), ("ln(sqrt(5))", 8),
])
def test_transcendental_values_sound(text, p):
    e = parse(text)
    r = compute(e, p)
    assert check_expr(e, r, p)


def test_exp_inexact_argument_in_unit_interval_is_one_pass():
    e = Exp(parse("sqrt(1/5)"))
    r, trace = compute_traced(e, 0)
    assert trace.refinements == 0
    assert trace.terms == choose_n_exp(exp_start_precision(0))
    assert check_expr(e, r, 0)


def test_exp_exact_path_term_count():
    # e at 12 bits: N is the smallest even integer above 2**13
    _, trace = compute_traced(parse("exp(1)"), 12)
    assert trace.terms == 8194 and trace.refinements == 0


def test_arctan_is_one_pass_with_fixed_terms():
    _, trace = compute_traced(Arctan(parse("sqrt(2)")), 6)
    assert trace.refinements == 0
    assert trace.children[0].requested_p == 12
    # Newton iterates stay above sqrt(2), so the child squared is just over 2
    assert trace.terms == arctan_terms(mpq(3, 2), 6) == 3 * 2 ** 10


def test_ln_trace_term_count():
    _, trace = compute_traced(Ln(Const(mpq(3))), 5)
    assert trace.terms == ln_terms(mpq(3), 10)


def test_ln_near_one_refines():
    _, trace = compute_traced(parse("ln(1 + 1/8)"), 4)
    assert trace.refinements >= 1


def test_ln_of_negative_value_is_domain_error():
    with pytest.raises(DomainError):
        compute(parse("ln(sin(-1/2))"), 4)


def test_budget_stops_before_work():
    with pytest.raises(CostLimitExceeded) as info:
        compute(parse("ln(2)"), 40)
    assert isinstance(info.value, PrecisionDivergence)
    assert "terms" in info.value.message


def test_exp_of_inexact_argument_hits_budget():
    with pytest.raises(CostLimitExceeded):
        compute(parse("exp(sqrt(2))"), 8, small)


def test_pow_with_loss_examples():
    assert pow_with_loss(mpq(3, 2), 1) == (mpq(3, 2), 0)
    assert pow_with_loss(mpq(3, 2), 8)[1] == 6
    assert pow_with_loss(mpq(3, 2), 5) == (mpq(243, 32), 6)
    with pytest.raises(ValueError):
        pow_with_loss(mpq(2), 0)
