"""Name resolution, static checks and compile-time number evaluation."""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Optional, Set

from .errors import Diagnostic, EvalError
from .nodes import (
    COMPARISON_OPS,
    LOGICAL_OPS,
    Assign,
    Binary,
    Call,
    Expression,
    For,
    If,
    Lit,
    LoopVar,
    Module,
    Number,
    NumberExpr,
    NumBinary,
    Program,
    Shift,
    SignalAccess,
    Skip,
    Swap,
    Unary,
    UnaryStmt,
    WidthOf,
    signal_reads,
    with_widths,
)

DEFAULT_WIDTH = 16


def eval_number(expr: NumberExpr, env: Mapping[str, int], widths: Mapping[str, int]) -> int:
    """Evaluate a compile-time number.

    ``env`` binds loop variables (without the ``$``), ``widths`` maps signal
    names to their declared bit width.
    """
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, WidthOf):
        if expr.name not in widths:
            raise EvalError(f"unknown signal #{expr.name}", expr.pos, kind="UnboundIdentifier")
        return widths[expr.name]
    if isinstance(expr, LoopVar):
        if expr.name not in env:
            raise EvalError(f"unbound loop variable ${expr.name}", expr.pos, kind="UnboundIdentifier")
        return env[expr.name]
    if isinstance(expr, NumBinary):
        a = eval_number(expr.lhs, env, widths)
        b = eval_number(expr.rhs, env, widths)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            if b > a:
                raise EvalError(f"{a} - {b} is negative", expr.pos, kind="NegativeResult")
            return a - b
        if expr.op == "*":
            return a * b
        if b == 0:
            raise EvalError("division by zero", expr.pos, kind="DivisionByZero")
        return a // b
    raise TypeError(f"not a number expression: {expr!r}")


def number_names(expr: NumberExpr):
    """Return (loop variables, width-of names) referenced by ``expr``."""
    loops: Set[str] = set()
    widths: Set[str] = set()

    def walk(n):
        if isinstance(n, LoopVar):
            loops.add(n.name)
        elif isinstance(n, WidthOf):
            widths.add(n.name)
        elif isinstance(n, NumBinary):
            walk(n.lhs)
            walk(n.rhs)

    walk(expr)
    return loops, widths


def resolve_main(program: Program) -> Module:
    """The top module: ``main`` if declared, else the last module."""
    return program.module("main") or program.modules[-1]


def loop_values(start: int, stop: int, step: int, negative: bool) -> range:
    """Inclusive iteration range of a counting loop."""
    if step == 0:
        raise EvalError("loop step is zero", kind="ZeroStep")
    if negative:
        return range(start, stop - 1, -step)
    return range(start, stop + 1, step)


def written_names(stmts: Iterable, program: Program, _seen=None) -> Set[str]:
    """Names of signals (in the current scope) that ``stmts`` may modify."""
    out: Set[str] = set()
    for s in stmts:
        if isinstance(s, Assign):
            out.add(s.lhs.name)
        elif isinstance(s, UnaryStmt):
            out.add(s.target.name)
        elif isinstance(s, Swap):
            out.update((s.lhs.name, s.rhs.name))
        elif isinstance(s, For):
            out |= written_names(s.body, program, _seen)
        elif isinstance(s, If):
            out |= written_names(s.then_body, program, _seen)
            out |= written_names(s.else_body, program, _seen)
        elif isinstance(s, Call):
            callee = program.module(s.name)
            seen = set(_seen or ())
            if callee is None or s.name in seen:
                out.update(s.args)
                continue
            seen.add(s.name)
            inner = written_names(callee.body, program, seen)
            for decl, arg in zip(callee.params, s.args):
                if decl.name in inner:
                    out.add(arg)
    return out


def read_names(expr: Expression) -> Set[str]:
    return {a.name for a in signal_reads(expr)}


# -- checking -----------------------------------------------------------------


class _Checker:
    def __init__(self, program: Program, module: Module, diags: List[Diagnostic]):
        self.program = program
        self.module = module
        self.diags = diags
        self.decls = {}
        for d in module.signals:
            if d.name in self.decls:
                self.error("DuplicateSignal", f"signal '{d.name}' declared twice", d.pos)
            self.decls[d.name] = d
        self.widths = {d.name: d.width for d in module.signals}

    def error(self, kind: str, message: str, pos, severity: str = "error") -> None:
        self.diags.append(Diagnostic(kind, message, pos, severity))

    # numbers

    def number(self, n: NumberExpr, loops: Set[str]) -> Optional[int]:
        lv, wn = number_names(n)
        for name in sorted(lv - loops):
            self.error("UnboundIdentifier", f"unbound loop variable ${name}", n.pos)
        for name in sorted(wn - set(self.decls)):
            self.error("UnknownSignal", f"unknown signal '{name}' in #{name}", n.pos)
        if lv or wn - set(self.decls):
            return None
        try:
            return eval_number(n, {}, self.widths)
        except EvalError as exc:
            self.error(exc.kind, exc.message, n.pos)
            return None

    # expressions: return bit width, or None when unknown / adopting

    def access(self, a: SignalAccess, loops: Set[str], whole_array_ok: bool = False) -> Optional[int]:
        decl = self.decls.get(a.name)
        for idx in a.indices:
            self.expr(idx, loops)
        if decl is None:
            self.error("UnknownSignal", f"unknown signal '{a.name}'", a.pos)
            return None
        if a.indices and len(a.indices) != len(decl.dims):
            self.error(
                "IndexCountMismatch",
                f"'{a.name}' has {len(decl.dims)} dimension(s), accessed with {len(a.indices)}",
                a.pos,
            )
        elif not a.indices and decl.dims and not whole_array_ok:
            self.error("ArrayAccessWithoutIndex", f"array '{a.name}' accessed without index", a.pos)
        for idx, dim in zip(a.indices, decl.dims):
            if isinstance(idx, Number):
                try:
                    value = eval_number(idx.value, {}, self.widths)
                except EvalError:
                    continue
                if value >= dim:
                    self.error("IndexOutOfRange", f"index {value} out of range for '{a.name}'[{dim}]", a.pos)
        if a.bit_lo is None:
            return decl.width
        lo = self.number(a.bit_lo, loops)
        hi = self.number(a.bit_hi, loops)
        if lo is not None and hi is not None:
            if not lo <= hi < decl.width:
                self.error(
                    "BitOutOfRange", f"bit range {lo}:{hi} outside '{a.name}' of width {decl.width}", a.pos
                )
                return None
            return hi - lo + 1
        if a.bit_lo == a.bit_hi:
            return 1
        return None

    def expr(self, e: Expression, loops: Set[str]) -> Optional[int]:
        if isinstance(e, Number):
            self.number(e.value, loops)
            return None
        if isinstance(e, SignalAccess):
            return self.access(e, loops)
        if isinstance(e, Unary):
            w = self.expr(e.operand, loops)
            if e.op == "!" and w not in (None, 1):
                self.error("CondNotBoolean", "operand of '!' must be 1 bit wide", e.pos)
            return 1 if e.op == "!" else w
        if isinstance(e, Shift):
            self.number(e.amount, loops)
            return self.expr(e.operand, loops)
        if isinstance(e, Binary):
            lw = self.expr(e.lhs, loops)
            rw = self.expr(e.rhs, loops)
            if e.op in LOGICAL_OPS:
                for w in (lw, rw):
                    if w not in (None, 1):
                        self.error("CondNotBoolean", f"operands of '{e.op}' must be 1 bit wide", e.pos)
                return 1
            if lw is not None and rw is not None and lw != rw:
                self.error("WidthMismatch", f"operands of '{e.op}' have widths {lw} and {rw}", e.pos)
            if e.op in COMPARISON_OPS:
                return 1
            return lw if lw is not None else rw
        raise TypeError(e)

    def same_width(self, a: Optional[int], b: Optional[int], pos, what: str) -> None:
        if a is not None and b is not None and a != b:
            self.error("WidthMismatch", f"{what}: widths {a} and {b} differ", pos)

    # statements

    def statements(self, stmts, loops: Set[str]) -> None:
        for s in stmts:
            self.statement(s, loops)

    def statement(self, s, loops: Set[str]) -> None:
        if isinstance(s, Skip):
            return
        if isinstance(s, Assign):
            lw = self.access(s.lhs, loops)
            rw = self.expr(s.rhs, loops)
            if s.lhs.name in read_names(s.rhs):
                self.error("LhsInRhs", f"'{s.lhs.name}' appears on both sides of the assignment", s.pos)
            self.same_width(lw, rw, s.pos, "assignment")
            for idx in s.lhs.indices:
                if s.lhs.name in read_names(idx):
                    self.error("LhsInRhs", f"'{s.lhs.name}' indexes itself", s.pos)
        elif isinstance(s, UnaryStmt):
            self.access(s.target, loops)
        elif isinstance(s, Swap):
            lw = self.access(s.lhs, loops)
            rw = self.access(s.rhs, loops)
            self.same_width(lw, rw, s.pos, "swap")
            touched = {s.lhs.name, s.rhs.name}
            for a in (s.lhs, s.rhs):
                for idx in a.indices:
                    if touched & read_names(idx):
                        self.error("LhsInRhs", "swap operand indexed by a swapped signal", s.pos)
        elif isinstance(s, Call):
            self.call(s)
        elif isinstance(s, If):
            for cond in (s.cond, s.fi_cond):
                w = self.expr(cond, loops)
                if w not in (None, 1):
                    self.error("CondNotBoolean", f"condition is {w} bits wide, expected 1", cond.pos or s.pos)
            self.statements(s.then_body, loops)
            self.statements(s.else_body, loops)
        elif isinstance(s, For):
            self.loop(s, loops)
        else:
            raise TypeError(s)

    def loop(self, s: For, loops: Set[str]) -> None:
        if not isinstance(s.stop, Number):
            self.error("NonStaticBound", "loop end must be a compile-time number", s.pos)
        else:
            self.number(s.stop.value, loops)
        step = None
        if s.step is not None:
            step = self.number(s.step, loops)
            if step == 0:
                self.error("ZeroStep", "loop step is zero", s.pos)
        if s.start is not None:
            if isinstance(s.start, Number):
                self.number(s.start.value, loops)
            else:
                self.expr(s.start, loops)
                if step not in (None, 1):
                    self.error("NonStaticBound", "a run-time loop start requires step 1 or -1", s.pos)
                if s.var is None:
                    self.error("NonStaticBound", "a run-time loop start needs a loop variable", s.pos)
                clash = read_names(s.start) & written_names(s.body, self.program)
                if clash:
                    self.error(
                        "DynamicBoundModified",
                        f"loop body modifies {', '.join(sorted(clash))} used in the loop start",
                        s.pos,
                    )
        inner = loops | {s.var} if s.var is not None else loops
        self.statements(s.body, inner)

    def call(self, s: Call) -> None:
        callee = self.program.module(s.name)
        for arg in s.args:
            if arg not in self.decls:
                self.error("UnknownSignal", f"unknown signal '{arg}'", s.pos)
        if len(set(s.args)) != len(s.args):
            self.error("DuplicateArgument", "the same signal is passed twice", s.pos)
        if callee is None:
            self.error("UnknownModule", f"unknown module '{s.name}'", s.pos)
            return
        if len(callee.params) != len(s.args):
            self.error(
                "ArityMismatch", f"'{s.name}' takes {len(callee.params)} argument(s), got {len(s.args)}", s.pos
            )
            return
        for param, arg in zip(callee.params, s.args):
            decl = self.decls.get(arg)
            if decl is None:
                continue
            if decl.dims != param.dims or decl.width != param.width:
                self.error(
                    "WidthMismatch",
                    f"argument '{arg}' does not match parameter '{param.name}' of '{s.name}'",
                    s.pos,
                )

    def run(self) -> None:
        for d in self.module.locals:
            if d.modifier == "state":
                self.error("StateSignal", f"state signal '{d.name}' needs sequential synthesis", d.pos, "warning")
        for d in self.module.signals:
            if d.width is not None and d.width < 1 or any(n < 1 for n in d.dims):
                self.error("BadDeclaration", f"'{d.name}' must have positive width and dimensions", d.pos)
        self.statements(self.module.body, set())


def _call_graph_cycles(program: Program, diags: List[Diagnostic]) -> None:
    edges: Dict[str, Set[str]] = {}

    def collect(stmts, acc):
        for s in stmts:
            if isinstance(s, Call):
                acc.add(s.name)
            elif isinstance(s, For):
                collect(s.body, acc)
            elif isinstance(s, If):
                collect(s.then_body, acc)
                collect(s.else_body, acc)

    for m in program.modules:
        edges[m.name] = set()
        collect(m.body, edges[m.name])

    state: Dict[str, int] = {}

    def visit(name: str) -> bool:
        state[name] = 1
        for nxt in sorted(edges.get(name, ())):
            if state.get(nxt) == 1 or (nxt not in state and nxt in edges and visit(nxt)):
                return True
        state[name] = 2
        return False

    for m in program.modules:
        if m.name not in state and visit(m.name):
            diags.append(Diagnostic("RecursionDetected", f"module '{m.name}' is recursive", m.pos))


def check(program: Program, default_width: int = DEFAULT_WIDTH) -> List[Diagnostic]:
    """Run every static check; returns all diagnostics (empty when clean)."""
    diags: List[Diagnostic] = []
    seen = set()
    for m in program.modules:
        if m.name in seen:
            diags.append(Diagnostic("DuplicateModule", f"module '{m.name}' declared twice", m.pos))
        seen.add(m.name)
    resolved = with_widths(program, default_width)
    for m in resolved.modules:
        _Checker(resolved, m, diags).run()
    _call_graph_cycles(program, diags)
    return diags


def errors_only(diags: Iterable[Diagnostic]) -> List[Diagnostic]:
    return [d for d in diags if d.severity == "error"]
