"""Expression trees over the core grammar, plus exact constant folding.

The core grammar has rational constants, negation, addition,
multiplication, inverse, square root, exp, ln, arctan, sin and cos.
Everything else (tan, arcsin, ...) is rewritten into these kinds.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import ClassVar, Iterator

from gmpy2 import mpq

from .errors import DomainError, SourceSpan
from .rational import ONE, ZERO


@dataclass(frozen=True)
class Expr:
    span: SourceSpan | None = field(default=None, compare=False, repr=False,
                                    kw_only=True)
    op: ClassVar[str] = "?"

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()

    def with_children(self, *kids: "Expr") -> "Expr":
        return self

    def walk(self, path: str = "r") -> Iterator[tuple[str, "Expr"]]:
        """Pre-order ``(path, node)`` pairs; child ``i`` of ``path`` is ``path.i``."""
        yield path, self
        for i, kid in enumerate(self.children):
            yield from kid.walk(f"{path}.{i}")

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: mpq
    op: ClassVar[str] = "const"

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", mpq(self.value))


@dataclass(frozen=True)
class Unary(Expr):
    arg: Expr

    @property
    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)

    def with_children(self, *kids: Expr) -> Expr:
        (arg,) = kids
        return self if arg is self.arg else dataclasses.replace(self, arg=arg)


@dataclass(frozen=True)
class Binary(Expr):
    left: Expr
    right: Expr

    @property
    def children(self) -> tuple[Expr, ...]:
        return (self.left, self.right)

    def with_children(self, *kids: Expr) -> Expr:
        left, right = kids
        if left is self.left and right is self.right:
            return self
        return dataclasses.replace(self, left=left, right=right)


@dataclass(frozen=True)
class Neg(Unary):
    op: ClassVar[str] = "neg"


@dataclass(frozen=True)
class Inv(Unary):
    op: ClassVar[str] = "inv"


@dataclass(frozen=True)
class Sqrt(Unary):
    op: ClassVar[str] = "sqrt"


@dataclass(frozen=True)
class Exp(Unary):
    op: ClassVar[str] = "exp"


@dataclass(frozen=True)
class Ln(Unary):
    op: ClassVar[str] = "ln"


@dataclass(frozen=True)
class Arctan(Unary):
    op: ClassVar[str] = "arctan"


@dataclass(frozen=True)
class Sin(Unary):
    op: ClassVar[str] = "sin"


@dataclass(frozen=True)
class Cos(Unary):
    op: ClassVar[str] = "cos"


@dataclass(frozen=True)
class Add(Binary):
    op: ClassVar[str] = "add"


@dataclass(frozen=True)
class Mul(Binary):
    op: ClassVar[str] = "mul"


FUNCTIONS: dict[str, type[Unary]] = {
    "sqrt": Sqrt, "exp": Exp, "ln": Ln, "arctan": Arctan,
    "sin": Sin, "cos": Cos, "inv": Inv,
}
DERIVED = ("tan", "cot", "arcsin", "arccos", "arccot")
RATIONAL_KINDS = (Const, Neg, Add, Mul, Inv)


def const(value) -> Const:
    return Const(mpq(value))


def sub(a: Expr, b: Expr) -> Expr:
    return Add(a, Neg(b))


def div(a: Expr, b: Expr) -> Expr:
    return Mul(a, Inv(b))


def rewrite_derived(name: str, arg: Expr, span: SourceSpan | None = None) -> Expr:
    """Expand a derived function into core node kinds.

    The arccos expansion ``arctan(sqrt(1-x^2)/x)`` equals arccos only for
    ``x > 0``; for negative ``x`` it is off by pi. arccot inherits this
    through its arccos step, so it is exact only for ``x > 0`` as well.
    """
    one = Const(ONE)
    if name == "tan":
        return Mul(Sin(arg), Inv(Cos(arg)), span=span)
    if name == "cot":
        return Inv(rewrite_derived("tan", arg), span=span)
    if name == "arcsin":
        root = Sqrt(Add(one, Neg(Mul(arg, arg))))
        return Arctan(Mul(arg, Inv(root)), span=span)
    if name == "arccos":
        root = Sqrt(Add(one, Neg(Mul(arg, arg))))
        return Arctan(Mul(root, Inv(arg)), span=span)
    if name == "arccot":
        inner = Mul(arg, Inv(Sqrt(Add(one, Mul(arg, arg)))))
        return rewrite_derived("arccos", inner, span)
    raise ValueError(f"not a derived function: {name}")


def _fold_rational(node: Expr, kids: tuple[Expr, ...]) -> mpq | None:
    if not all(isinstance(k, Const) for k in kids):
        return None
    vals = [k.value for k in kids]
    if isinstance(node, Neg):
        return -vals[0]
    if isinstance(node, Add):
        return vals[0] + vals[1]
    if isinstance(node, Mul):
        return vals[0] * vals[1]
    if isinstance(node, Inv):
        if vals[0] == 0:
            raise DomainError("inverse of exact zero", node.span)
        return 1 / vals[0]
    return None


def fold_exact(e: Expr) -> Expr:
    """Replace every maximal rational subtree by its exact value.

    Transcendental nodes are folded only at the trivial points
    sqrt(0), sin(0), arctan(0), ln(1), exp(0) and cos(0).
    """
    if isinstance(e, Const):
        return e
    kids = tuple(fold_exact(k) for k in e.children)
    value = _fold_rational(e, kids)
    if value is not None:
        return Const(value, span=e.span)
    if isinstance(e, Unary) and isinstance(kids[0], Const):
        c = kids[0].value
        if isinstance(e, Sqrt):
            if c < 0:
                raise DomainError(f"square root of negative constant {c}", e.span)
            if c == 0:
                return Const(ZERO, span=e.span)
        elif isinstance(e, Ln):
            if c <= 0:
                raise DomainError(f"logarithm of non-positive constant {c}", e.span)
            if c == 1:
                return Const(ZERO, span=e.span)
        elif c == 0 and isinstance(e, (Sin, Arctan)):
            return Const(ZERO, span=e.span)
        elif c == 0 and isinstance(e, (Exp, Cos)):
            return Const(ONE, span=e.span)
    return e.with_children(*kids)


def rationalize_sqrt_difference(e: Expr) -> Expr:
    """Rewrite ``sqrt(a) - sqrt(b)`` as ``(a - b) / (sqrt(a) + sqrt(b))``.

    Only applied on request: it removes the cancellation in the subtraction,
    but no general rewrite of this kind exists.
    """
    kids = tuple(rationalize_sqrt_difference(k) for k in e.children)
    e = e.with_children(*kids)
    if (isinstance(e, Add) and isinstance(e.left, Sqrt)
            and isinstance(e.right, Neg) and isinstance(e.right.arg, Sqrt)):
        a, b = e.left.arg, e.right.arg.arg
        return Mul(Add(a, Neg(b)), Inv(Add(Sqrt(a), Sqrt(b))), span=e.span)
    return e


def _const_text(q: mpq) -> str:
    if q < 0:
        return f"(-{_const_text(-q)})"
    num, den = int(q.numerator), int(q.denominator)
    if den == 1:
        return str(num)
    twos = (den & -den).bit_length() - 1
    rest = den >> twos
    fives = 0
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"({num}/{den})"
    places = max(twos, fives)
    scaled = str(num * 10**places // den).rjust(places + 1, "0")
    return f"{scaled[:-places]}.{scaled[-places:]}"


def _text(e: Expr) -> str:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Neg):
        return f"-{_text(e.arg)}"
    if isinstance(e, Add):
        if isinstance(e.right, Neg):
            return f"({_text(e.left)} - {_text(e.right.arg)})"
        return f"({_text(e.left)} + {_text(e.right)})"
    if isinstance(e, Mul):
        if isinstance(e.right, Inv):
            return f"({_text(e.left)} / {_text(e.right.arg)})"
        return f"({_text(e.left)} * {_text(e.right)})"
    if isinstance(e, Unary):
        return f"{e.op}({to_text(e.arg)})"
    raise TypeError(f"unknown node {e!r}")


def to_text(e: Expr) -> str:
    """Render in the concrete syntax; parsing the result gives back ``e``.

    Every binary node is parenthesized, so the text is unambiguous.
    """
    s = _text(e)
    if isinstance(e, Binary):
        s = s[1:-1]
    return s
