from __future__ import annotations

import random

import mpmath
import pytest
from gmpy2 import mpq

from exactreal import EvalConfig, compute, fold_exact, parse
from exactreal.expr import Const, Inv, Ln, Sqrt
from exactreal.verification import (GOLDEN, IDENTITIES, PROPOSITIONS, cross_precision_check,
                                    golden_check, identity_residual, oracle_check,
                                    random_corpus, random_expression, tan1_lower, to_mpmath)


def test_golden_literals_agree_with_mpmath():
    """The embedded digits are the published ones: compare with mpmath's constants."""
    with mpmath.workdps(60):
        ref = {"sqrt2": mpmath.sqrt(2), "e": mpmath.e, "ln2": mpmath.log(2), "pi": mpmath.pi}
        for name, g in GOLDEN.items():
            assert abs(mpmath.mpf(g.digits) - ref[name]) < mpmath.mpf(10) ** -49


@pytest.mark.parametrize("name,p", [("sqrt2", 64), ("ln2", 12), ("pi", 10), ("e", 10)])
def test_golden(name, p):
    assert golden_check(name, p)


@pytest.mark.parametrize("text,p", [("sqrt(2)", 32), ("exp(1/3)", 4), ("1/3 - 1/3 + 1", 8)])
def test_cross_precision(text, p):
    assert cross_precision_check(parse(text), p)


def test_cross_precision_on_folded_zero():
    assert cross_precision_check(parse("ln(1)"), 8)


def test_identity_sqrt_square():
    lhs, rhs = IDENTITIES["sqrt_square"]
    assert identity_residual(parse(lhs), parse(rhs), 16) < mpq(1, 2 ** 13)


def test_oracle_check_rejects_wrong_value():
    e = parse("sqrt(2)")
    r = compute(e, 20)
    assert oracle_check(e, r, 20)
    assert not oracle_check(e, r * (1 + mpq(1, 2 ** 10)), 20)
    assert oracle_check(parse("ln(1)"), mpq(0), 10)


def test_to_mpmath_matches_direct_evaluation():
    with mpmath.workprec(80):
        assert to_mpmath(parse("sin(1/2)/cos(1/2)")) == mpmath.sin(0.5) / mpmath.cos(0.5)


def test_corpus_is_reproducible():
    a = [str(e) for e in random_corpus(50)]
    b = [str(e) for e in random_corpus(50)]
    assert a == b
    assert a != [str(e) for e in random_corpus(50, seed=1)]


def _depth(e) -> int:
    return 1 + max((_depth(k) for k in e.children), default=0)


def test_corpus_shape_and_domains():
    """Depth at most 4 below the root, constants in [-8, 8] without 0, no domain errors."""
    with mpmath.workprec(100):
        for e in random_corpus(500):
            assert _depth(e) <= 5
            for _, node in e.walk():
                if isinstance(node, Const):
                    assert node.value != 0 and abs(node.value) <= 8
            fold_exact(e)
            for _, node in e.walk():
                if isinstance(node, (Sqrt, Ln)):
                    assert to_mpmath(node.arg) > 0
                if isinstance(node, Inv):
                    assert to_mpmath(node.arg) != 0


def test_random_expression_positive_generator():
    rng = random.Random(3)
    with mpmath.workprec(100):
        for _ in range(200):
            assert to_mpmath(random_expression(rng, 3, positive=True)) > 0


def test_tan1_lower_is_a_lower_bound():
    lo = tan1_lower(24)
    with mpmath.workprec(80):
        assert mpmath.mpf(lo.numerator) / lo.denominator < mpmath.tan(1)
        assert mpmath.tan(1) - mpmath.mpf(lo.numerator) / lo.denominator < mpmath.mpf(2) ** -18


@pytest.mark.parametrize("name", sorted(PROPOSITIONS))
def test_propositions(name):
    assert PROPOSITIONS[name]()


def test_budget_passes_through():
    with pytest.raises(Exception) as info:
        cross_precision_check(parse("exp(1/3)"), 12, EvalConfig(max_terms=1 << 10))
    assert type(info.value).__name__ == "CostLimitExceeded"
