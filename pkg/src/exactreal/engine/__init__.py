"""Top-down evaluation of expression trees to a requested relative precision."""

from __future__ import annotations

from . import algebraic, riemann, trig  # noqa: F401  (register handlers)
from .algebraic import newton_sqrt, sqrt_params
from .core import EvalConfig, Evaluator, Result, TraceRecord, compute, compute_traced, evaluate
from .riemann import (arctan_terms, arctan_upper_sum, choose_n_exp, exp_base, exp_start_precision,
                      exp_upper, ln_terms, ln_upper_sum, pow_with_loss, sum_reciprocals)
from .trig import (choose_n_cos, choose_n_sin, clear_pi_cache, pi_approx, t_cos, t_sin,
                   taylor_cos_paired, taylor_sin_paired)

__all__ = [
    "EvalConfig", "Evaluator", "Result", "TraceRecord",
    "compute", "compute_traced", "evaluate",
    "pi_approx", "clear_pi_cache",
    "sqrt_params", "newton_sqrt",
    "choose_n_exp", "exp_start_precision", "exp_upper", "exp_base",
    "ln_terms", "ln_upper_sum", "arctan_terms", "arctan_upper_sum", "sum_reciprocals",
    "pow_with_loss",
    "choose_n_sin", "choose_n_cos", "t_sin", "t_cos",
    "taylor_sin_paired", "taylor_cos_paired",
]
