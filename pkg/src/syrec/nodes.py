"""Typed syntax tree for SyReC programs.

Nodes are frozen dataclasses.  Source positions are excluded from equality
so that a pretty-printed and reparsed program compares equal to the
original.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Tuple, Union

from .errors import Position

PARAM_MODIFIERS = ("in", "out", "inout")
LOCAL_MODIFIERS = ("wire", "state")

ARITH_OPS = ("+", "-", "*", "/")
BITWISE_OPS = ("^", "&", "|")
LOGICAL_OPS = ("&&", "||")
COMPARISON_OPS = ("<", ">", "=", "!=", "<=", ">=")
BINARY_OPS = ARITH_OPS + BITWISE_OPS + LOGICAL_OPS + COMPARISON_OPS
SHIFT_OPS = ("<<", ">>")


def _pos() -> Optional[Position]:
    return field(default=None, compare=False, repr=False)


# -- compile-time numbers ---------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: int
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class WidthOf:
    name: str
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class LoopVar:
    name: str
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class NumBinary:
    op: str  # one of ARITH_OPS
    lhs: "NumberExpr"
    rhs: "NumberExpr"
    pos: Optional[Position] = _pos()


NumberExpr = Union[Lit, WidthOf, LoopVar, NumBinary]


# -- expressions --------------------------------------------------------------


@dataclass(frozen=True)
class Number:
    value: NumberExpr
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class SignalAccess:
    name: str
    indices: Tuple["Expression", ...] = ()
    bit_lo: Optional[NumberExpr] = None
    bit_hi: Optional[NumberExpr] = None
    pos: Optional[Position] = _pos()

    @property
    def has_range(self) -> bool:
        return self.bit_lo is not None


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "Expression"
    rhs: "Expression"
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class Unary:
    op: str  # "!" or "~"
    operand: "Expression"
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class Shift:
    op: str  # "<<" or ">>"
    operand: "Expression"
    amount: NumberExpr
    pos: Optional[Position] = _pos()


Expression = Union[Number, SignalAccess, Binary, Unary, Shift]


# -- statements ---------------------------------------------------------------


@dataclass(frozen=True)
class Call:
    kind: str  # "call" or "uncall"
    name: str
    args: Tuple[str, ...]
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class For:
    """Counting loop.

    ``start`` is ``None`` for the short form ``for n ... rof`` which runs the
    body ``n`` times.  ``start`` may be a run-time expression over signals
    (the elevator listings need this); ``stop`` and ``step`` must be static.
    """

    var: Optional[str]
    start: Optional[Expression]
    stop: Expression
    step: Optional[NumberExpr]
    step_negative: bool
    body: Tuple["Statement", ...]
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class If:
    cond: Expression
    then_body: Tuple["Statement", ...]
    else_body: Tuple["Statement", ...]
    fi_cond: Expression
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class UnaryStmt:
    op: str  # "~", "++" or "--"
    target: SignalAccess
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class Assign:
    lhs: SignalAccess
    op: str  # "^", "+" or "-"
    rhs: Expression
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class Swap:
    lhs: SignalAccess
    rhs: SignalAccess
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class Skip:
    pos: Optional[Position] = _pos()


Statement = Union[Call, For, If, UnaryStmt, Assign, Swap, Skip]


# -- declarations -------------------------------------------------------------


@dataclass(frozen=True)
class SignalDecl:
    name: str
    modifier: str
    dims: Tuple[int, ...] = ()
    width: Optional[int] = None  # None: width omitted in the source
    pos: Optional[Position] = _pos()


@dataclass(frozen=True)
class Module:
    name: str
    params: Tuple[SignalDecl, ...]
    locals: Tuple[SignalDecl, ...]
    body: Tuple[Statement, ...]
    pos: Optional[Position] = _pos()

    @property
    def signals(self) -> Tuple[SignalDecl, ...]:
        return self.params + self.locals

    def signal(self, name: str) -> Optional[SignalDecl]:
        for decl in self.signals:
            if decl.name == name:
                return decl
        return None


@dataclass(frozen=True)
class Program:
    modules: Tuple[Module, ...]

    def module(self, name: str) -> Optional[Module]:
        for m in self.modules:
            if m.name == name:
                return m
        return None


# -- helpers ------------------------------------------------------------------


def is_static(expr: Expression) -> bool:
    """True when ``expr`` reads no signal values (only compile-time numbers)."""
    return isinstance(expr, Number)


def signal_reads(expr: Expression) -> Iterator[SignalAccess]:
    """Yield every signal access whose value ``expr`` reads, including indices."""
    if isinstance(expr, SignalAccess):
        yield expr
        for idx in expr.indices:
            yield from signal_reads(idx)
    elif isinstance(expr, Binary):
        yield from signal_reads(expr.lhs)
        yield from signal_reads(expr.rhs)
    elif isinstance(expr, (Unary, Shift)):
        yield from signal_reads(expr.operand)


def contains_division(expr: Expression) -> bool:
    if isinstance(expr, Binary):
        return expr.op == "/" or contains_division(expr.lhs) or contains_division(expr.rhs)
    if isinstance(expr, (Unary, Shift)):
        return contains_division(expr.operand)
    if isinstance(expr, SignalAccess):
        return any(contains_division(i) for i in expr.indices)
    return False


def with_widths(program: Program, default_width: int, overrides=None, module: Optional[str] = None) -> Program:
    """Fill omitted widths with ``default_width`` and apply ``overrides``.

    ``overrides`` maps signal names to widths and only touches the module
    named ``module`` (every module when ``module`` is ``None``).
    """
    overrides = dict(overrides or {})
    mods = []
    for m in program.modules:
        use = overrides if module is None or m.name == module else {}

        def fix(d: SignalDecl) -> SignalDecl:
            width = use.get(d.name, d.width if d.width is not None else default_width)
            return replace(d, width=width)

        mods.append(replace(m, params=tuple(map(fix, m.params)), locals=tuple(map(fix, m.locals))))
    return Program(tuple(mods))
