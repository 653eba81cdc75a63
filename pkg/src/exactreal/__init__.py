"""Exact real arithmetic: evaluate expressions to a guaranteed relative precision."""

from __future__ import annotations

from .approximation import Approximation, check_represents
from .engine import EvalConfig, Result, TraceRecord, compute, compute_traced, evaluate, pi_approx
from .errors import (CostLimitExceeded, DomainError, ExactRealError, ExprSyntaxError,
                     PrecisionDivergence, SourceSpan)
from .expr import (Add, Arctan, Const, Cos, Exp, Expr, Inv, Ln, Mul, Neg, Sin, Sqrt, const,
                   fold_exact, to_text)
from .parser import parse

__version__ = "0.1.0"

__all__ = [
    "Approximation", "check_represents",
    "EvalConfig", "Result", "TraceRecord", "compute", "compute_traced", "evaluate", "pi_approx",
    "CostLimitExceeded", "DomainError", "ExactRealError", "ExprSyntaxError",
    "PrecisionDivergence", "SourceSpan",
    "Add", "Arctan", "Const", "Cos", "Exp", "Expr", "Inv", "Ln", "Mul", "Neg", "Sin", "Sqrt",
    "const", "fold_exact", "to_text", "parse",
]
