"""Top-down evaluation: dispatch, refinement bookkeeping and trace records."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

from gmpy2 import mpq

from ..errors import CostLimitExceeded, ExactRealError, PrecisionDivergence
from ..expr import Const, Expr, fold_exact
from ..rational import bit_size


@dataclass(frozen=True)
class EvalConfig:
    """Limits for one evaluation.

    ``max_refine`` caps precision bumps per node. ``max_terms`` and
    ``max_bits`` bound a single series, Riemann sum or power before it is
    started; the Riemann-sum methods need about ``2**p`` terms, so these
    limits are what keeps an unreachable request from running for hours.
    """

    max_refine: int = 256
    trace_enabled: bool = False
    max_terms: int = 1 << 20
    max_bits: int = 1 << 26

    def __post_init__(self) -> None:
        if self.max_refine < 1:
            raise ValueError("max_refine must be at least 1")
        if self.max_terms < 1 or self.max_bits < 1:
            raise ValueError("cost limits must be positive")


@dataclass
class TraceRecord:
    """Telemetry for one evaluated node.

    ``node`` is the tree path (``r`` for the root, ``r.0`` its first child,
    ...). ``terms`` counts Riemann rectangles, Taylor terms or Newton steps.
    Children hold the records of the attempt that was finally accepted.
    """

    node: str
    op: str
    requested_p: int
    delivered_p: int
    refinements: int = 0
    terms: int = 0
    coeff_bits: int = 0
    exact: bool = False
    children: list["TraceRecord"] = field(default_factory=list)

    def walk(self) -> Iterator["TraceRecord"]:
        yield self
        for kid in self.children:
            yield from kid.walk()

    def as_dict(self) -> dict:
        return {
            "node": self.node, "op": self.op,
            "requested_p": self.requested_p, "delivered_p": self.delivered_p,
            "refinements": self.refinements, "terms": self.terms,
            "coeff_bits": self.coeff_bits,
        }


@dataclass(frozen=True)
class Result:
    value: mpq
    precision: int
    trace: TraceRecord | None = None


Handler = Callable[["Evaluator", Expr, int, TraceRecord], mpq]
HANDLERS: dict[type, Handler] = {}


def handles(kind: type) -> Callable[[Handler], Handler]:
    def register(fn: Handler) -> Handler:
        HANDLERS[kind] = fn
        return fn
    return register


class Evaluator:
    """One evaluation run: applies the limits and builds the trace tree."""

    def __init__(self, cfg: EvalConfig):
        self.cfg = cfg

    def run(self, node: Expr, p: int, path: str) -> tuple[mpq, TraceRecord]:
        rec = TraceRecord(path, node.op, p, p)
        if isinstance(node, Const):
            rec.exact = True
            rec.coeff_bits = bit_size(node.value)
            return node.value, rec
        try:
            value = HANDLERS[type(node)](self, node, p, rec)
        except ExactRealError as err:
            if err.node is None:
                err.node = path
                err.span = node.span
            raise
        rec.coeff_bits = max(rec.coeff_bits, bit_size(value))
        return value, rec

    def child(self, rec: TraceRecord, node: Expr, index: int | str,
              p: int) -> tuple[mpq, TraceRecord]:
        value, sub = self.run(node, p, f"{rec.node}.{index}")
        rec.children.append(sub)
        rec.coeff_bits = max(rec.coeff_bits, sub.coeff_bits)
        return value, sub

    def refine(self, rec: TraceRecord, node: Expr, why: str) -> None:
        """Count one precision bump, failing once the cap is exceeded."""
        rec.refinements += 1
        rec.children.clear()
        if rec.refinements > self.cfg.max_refine:
            raise PrecisionDivergence(
                f"{node.op} did not reach {rec.requested_p} bits after "
                f"{self.cfg.max_refine} refinements ({why})")

    def charge(self, rec: TraceRecord, terms: int, bits: int) -> None:
        """Refuse a step whose size estimate exceeds the budget."""
        if terms > self.cfg.max_terms:
            raise CostLimitExceeded(
                f"{rec.op} at {rec.requested_p} bits needs {terms} terms, "
                f"budget is {self.cfg.max_terms}")
        if bits > self.cfg.max_bits:
            raise CostLimitExceeded(
                f"{rec.op} at {rec.requested_p} bits would build ~{bits}-bit "
                f"numbers, budget is {self.cfg.max_bits}")


def evaluate(e: Expr, p: int, cfg: EvalConfig | None = None) -> Result:
    """Approximate ``e`` to relative error below ``2**-p``.

    Rational subtrees are folded first and come back exact. The trace is
    attached when ``cfg.trace_enabled`` is set.
    """
    if p < 0:
        raise ValueError("precision must be non-negative")
    cfg = cfg or EvalConfig()
    folded = fold_exact(e)
    value, rec = Evaluator(cfg).run(folded, p, "r")
    return Result(value, p, rec if cfg.trace_enabled else None)


def compute(e: Expr, p: int, cfg: EvalConfig | None = None) -> mpq:
    """The rational ``r`` with ``|v - r| < |r| * 2**-p`` for the value ``v`` of ``e``."""
    return evaluate(e, p, cfg).value


def compute_traced(e: Expr, p: int, cfg: EvalConfig | None = None) -> tuple[mpq, TraceRecord]:
    cfg = cfg or EvalConfig()
    res = evaluate(e, p, replace(cfg, trace_enabled=True))
    assert res.trace is not None
    return res.value, res.trace
