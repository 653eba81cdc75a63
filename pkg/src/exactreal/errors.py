"""Exception types shared by the parser, the engine and the command line."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Half-open byte range ``[start, end)`` into the parsed text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"span start {self.start} exceeds end {self.end}")

    def excerpt(self, text: str) -> str:
        return text[self.start:self.end]


class ExactRealError(Exception):
    """Base class. Carries the offending node's span and trace path when known."""

    def __init__(self, message: str, span: SourceSpan | None = None,
                 node: str | None = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.node = node

    def describe(self, text: str | None = None) -> str:
        parts = [self.message]
        if self.node is not None:
            parts.append(f"node {self.node}")
        if self.span is not None:
            where = f"at {self.span.start}..{self.span.end}"
            if text is not None:
                where += f" ({self.span.excerpt(text)!r})"
            parts.append(where)
        return "; ".join(parts)


class ExprSyntaxError(ExactRealError):
    """Malformed expression text."""


class DomainError(ExactRealError, ValueError):
    """An operation was applied outside its domain (zero divisor, ln of x <= 0, ...)."""


class PrecisionDivergence(ExactRealError):
    """The requested precision was not reached within the configured limits.

    Raised when a refinement loop exceeds ``EvalConfig.max_refine``. This is
    how an expression whose exact value is zero shows up, since zero has no
    relative-error approximation.
    """


class CostLimitExceeded(PrecisionDivergence):
    """A single step would exceed the configured term or bit budget.

    Checked before the work starts, so hopeless requests fail immediately
    instead of running for hours.
    """
