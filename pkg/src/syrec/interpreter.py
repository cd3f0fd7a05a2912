"""Direct execution of SyReC programs on integer signal values.

This is the semantic oracle the synthesized circuits are compared against,
so it favours obviousness over speed.  Signal values are plain ``int``;
arrays are flat row-major lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import SemanticError
from .nodes import (
    COMPARISON_OPS,
    Assign,
    Binary,
    Call,
    For,
    If,
    Module,
    Number,
    Program,
    Shift,
    SignalAccess,
    Skip,
    Swap,
    Unary,
    UnaryStmt,
    with_widths,
)
from .semantics import DEFAULT_WIDTH, eval_number, loop_values

Value = Union[int, List[int]]


@dataclass
class Storage:
    dims: Tuple[int, ...]
    width: int
    values: List[int]

    @classmethod
    def zeros(cls, dims: Tuple[int, ...], width: int) -> "Storage":
        size = 1
        for d in dims:
            size *= d
        return cls(tuple(dims), width, [0] * size)


def flat_index(dims: Sequence[int], path: Sequence[int]) -> Optional[int]:
    """Row-major offset of ``path`` or ``None`` when out of range."""
    flat = 0
    for d, i in zip(dims, path):
        if not 0 <= i < d:
            return None
        flat = flat * d + i
    return flat


def mask(width: int) -> int:
    return (1 << width) - 1


class _Frame:
    def __init__(self, program: Program, module: Module, store: Dict[str, Storage], inverse: bool, chain):
        self.program = program
        self.module = module
        self.store = store
        self.widths = {name: s.width for name, s in store.items()}
        self.inverse = inverse
        self.chain = chain
        # locals of open calls, so a matching uncall runs on the same cells
        self.calls: Dict[tuple, List[Dict[str, Storage]]] = {}


class Interpreter:
    def __init__(self, program: Program):
        self.program = program

    # -- expressions -------------------------------------------------------------

    def resolve(self, f: _Frame, a: SignalAccess, env) -> Tuple[Storage, Optional[int], int, int]:
        """Storage, flat element (None if out of range), low bit, width."""
        st = f.store.get(a.name)
        if st is None:
            raise SemanticError(f"unknown signal '{a.name}'", a.pos, kind="UnknownSignal")
        if st.dims and not a.indices:
            raise SemanticError(f"array '{a.name}' accessed without index", a.pos, kind="ArrayAccessWithoutIndex")
        path = [self.eval(f, idx, env)[0] for idx in a.indices]
        elem = flat_index(st.dims, path) if st.dims else 0
        if a.bit_lo is None:
            return st, elem, 0, st.width
        lo = eval_number(a.bit_lo, env, f.widths)
        hi = eval_number(a.bit_hi, env, f.widths)
        if not 0 <= lo <= hi < st.width:
            raise SemanticError(f"bit range {lo}:{hi} outside '{a.name}'", a.pos, kind="BitOutOfRange")
        return st, elem, lo, hi - lo + 1

    def read(self, f: _Frame, a: SignalAccess, env) -> Tuple[int, int]:
        st, elem, lo, width = self.resolve(f, a, env)
        if elem is None:
            return 0, width
        return (st.values[elem] >> lo) & mask(width), width

    def write(self, f: _Frame, a: SignalAccess, env, value: int) -> None:
        st, elem, lo, width = self.resolve(f, a, env)
        if elem is None:
            return
        m = mask(width) << lo
        st.values[elem] = (st.values[elem] & ~m) | ((value << lo) & m)

    def eval(self, f: _Frame, e, env, want: Optional[int] = None) -> Tuple[int, Optional[int]]:
        """Value and width of ``e``; width ``None`` marks an unsized literal."""
        if isinstance(e, Number):
            v = eval_number(e.value, env, f.widths)
            return (v & mask(want), want) if want is not None else (v, None)
        if isinstance(e, SignalAccess):
            return self.read(f, e, env)
        if isinstance(e, Unary):
            if e.op == "!":
                v, _ = self.eval(f, e.operand, env, 1)
                return int(v == 0), 1
            v, w = self.eval(f, e.operand, env, want)
            if w is None:
                raise SemanticError("cannot negate an unsized literal", e.pos, kind="WidthMismatch")
            return ~v & mask(w), w
        if isinstance(e, Shift):
            v, w = self.eval(f, e.operand, env, want)
            n = eval_number(e.amount, env, f.widths)
            if w is None:
                raise SemanticError("cannot shift an unsized literal", e.pos, kind="WidthMismatch")
            return ((v << n) & mask(w) if e.op == "<<" else v >> n), w
        if isinstance(e, Binary):
            return self.binary(f, e, env, want)
        raise TypeError(e)

    def binary(self, f: _Frame, e: Binary, env, want):
        if e.op == "/":
            raise SemanticError("division cannot be synthesized", e.pos, kind="DivisionUnsupported")
        if e.op in ("&&", "||"):
            a, _ = self.eval(f, e.lhs, env, 1)
            b, _ = self.eval(f, e.rhs, env, 1)
            return int(bool(a and b) if e.op == "&&" else bool(a or b)), 1
        inner = None if e.op in COMPARISON_OPS else want
        a, aw = self.eval(f, e.lhs, env, inner)
        b, bw = self.eval(f, e.rhs, env, inner)
        if aw is not None and bw is not None and aw != bw:
            raise SemanticError(f"operands of '{e.op}' have widths {aw} and {bw}", e.pos, kind="WidthMismatch")
        w = aw if aw is not None else bw
        if w is not None:
            a &= mask(w)
            b &= mask(w)
        if e.op in COMPARISON_OPS:
            result = {
                "<": a < b,
                ">": a > b,
                "=": a == b,
                "!=": a != b,
                "<=": a <= b,
                ">=": a >= b,
            }[e.op]
            return int(result), 1
        if w is None:
            raise SemanticError(f"cannot size '{e.op}' of two literals", e.pos, kind="WidthMismatch")
        result = {
            "+": a + b,
            "-": a - b,
            "*": a * b,
            "^": a ^ b,
            "&": a & b,
            "|": a | b,
        }[e.op]
        return result & mask(w), w

    # -- statements ----------------------------------------------------------------

    def run_block(self, f: _Frame, stmts, env) -> None:
        for s in reversed(stmts) if f.inverse else stmts:
            self.run(f, s, env)

    def run(self, f: _Frame, s, env) -> None:
        if isinstance(s, Skip):
            return
        if isinstance(s, Assign):
            value, width = self.read(f, s.lhs, env)
            rhs, rw = self.eval(f, s.rhs, env, width)
            if rw is not None and rw != width:
                raise SemanticError(f"assigning {rw} bits to {width}", s.pos, kind="WidthMismatch")
            op = s.op
            if f.inverse and op != "^":
                op = "+" if op == "-" else "-"
            new = {"^": value ^ rhs, "+": value + rhs, "-": value - rhs}[op]
            self.write(f, s.lhs, env, new & mask(width))
        elif isinstance(s, UnaryStmt):
            value, width = self.read(f, s.target, env)
            op = s.op
            if f.inverse and op != "~":
                op = "++" if op == "--" else "--"
            new = {"~": ~value, "++": value + 1, "--": value - 1}[op]
            self.write(f, s.target, env, new & mask(width))
        elif isinstance(s, Swap):
            st1, e1, _, w1 = self.resolve(f, s.lhs, env)
            st2, e2, _, w2 = self.resolve(f, s.rhs, env)
            if w1 != w2:
                raise SemanticError("swap operands differ in width", s.pos, kind="WidthMismatch")
            if e1 is None or e2 is None:
                return
            x, _ = self.read(f, s.lhs, env)
            y, _ = self.read(f, s.rhs, env)
            self.write(f, s.lhs, env, y)
            self.write(f, s.rhs, env, x)
        elif isinstance(s, If):
            cond = s.fi_cond if f.inverse else s.cond
            v, w = self.eval(f, cond, env, 1)
            if w not in (None, 1):
                raise SemanticError("condition must be 1 bit wide", s.pos, kind="CondNotBoolean")
            self.run_block(f, s.then_body if v else s.else_body, env)
        elif isinstance(s, For):
            values = list(self.loop_range(f, s, env))
            for v in reversed(values) if f.inverse else values:
                inner = dict(env)
                if s.var is not None:
                    inner[s.var] = v
                self.run_block(f, s.body, inner)
        elif isinstance(s, Call):
            forward = (s.kind == "call") != f.inverse
            self.call(f, s, forward)
        else:
            raise TypeError(s)

    def loop_range(self, f: _Frame, s: For, env):
        if not isinstance(s.stop, Number):
            raise SemanticError("loop end must be static", s.pos, kind="NonStaticBound")
        stop = eval_number(s.stop.value, env, f.widths)
        step = eval_number(s.step, env, f.widths) if s.step is not None else 1
        if s.start is None:
            return loop_values(1, stop, step, False)
        start, _ = self.eval(f, s.start, env)
        return loop_values(start, stop, step, s.step_negative)

    def call(self, f: _Frame, s: Call, forward: bool) -> None:
        callee = self.program.module(s.name)
        if callee is None:
            raise SemanticError(f"unknown module '{s.name}'", s.pos, kind="UnknownModule")
        if s.name in f.chain:
            raise SemanticError(f"recursive call of '{s.name}'", s.pos, kind="RecursionDetected")
        if len(callee.params) != len(s.args):
            raise SemanticError(f"arity mismatch calling '{s.name}'", s.pos, kind="ArityMismatch")
        store = {}
        for decl, arg in zip(callee.params, s.args):
            st = f.store[arg]
            if st.dims != decl.dims or st.width != decl.width:
                raise SemanticError(f"argument '{arg}' does not fit '{decl.name}'", s.pos, kind="WidthMismatch")
            store[decl.name] = st
        key = (s.name,) + tuple(id(f.store[arg]) for arg in s.args)
        pending = f.calls.get(key)
        if not forward and pending:
            local = pending.pop()
        else:
            local = {}
            for decl in callee.locals:
                _reject_state(decl)
                local[decl.name] = Storage.zeros(decl.dims, decl.width)
        frame = _Frame(self.program, callee, {**store, **local}, not forward, f.chain + (s.name,))
        self.run_block(frame, callee.body, {})
        if forward:
            f.calls.setdefault(key, []).append(local)


def _reject_state(decl) -> None:
    if decl.modifier == "state":
        raise SemanticError(
            f"state signal '{decl.name}' requires sequential semantics", decl.pos, kind="SequentialUnsupported"
        )


def interpret(
    module: Union[Module, str],
    program: Program,
    inputs: Mapping[str, Value],
    default_width: int = DEFAULT_WIDTH,
    overrides: Optional[Mapping[str, int]] = None,
    uncall: bool = False,
) -> Dict[str, Value]:
    """Run ``module`` on ``inputs`` and return the final value of every signal.

    Signals missing from ``inputs`` start at zero (``out`` and ``wire``
    always do).  Array signals are given and returned as flat lists.
    ``uncall=True`` executes the inverse of the module.
    """
    name = module if isinstance(module, str) else module.name
    program = with_widths(program, default_width, overrides, module=name)
    top = program.module(name)
    store: Dict[str, Storage] = {}
    for decl in top.signals:
        _reject_state(decl)
        st = Storage.zeros(decl.dims, decl.width)
        given = inputs.get(decl.name)
        if given is not None and decl.modifier in ("in", "inout"):
            vals = list(given) if isinstance(given, (list, tuple)) else [given]
            if len(vals) != len(st.values):
                raise ValueError(f"signal '{decl.name}' expects {len(st.values)} value(s)")
            st.values = [v & mask(decl.width) for v in vals]
        store[decl.name] = st
    interp = Interpreter(program)
    frame = _Frame(program, top, store, uncall, (name,))
    interp.run_block(frame, top.body, {})
    return {n: (st.values if st.dims else st.values[0]) for n, st in store.items()}
