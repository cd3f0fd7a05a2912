"""Hierarchical synthesis of SyReC modules into Toffoli/Fredkin cascades.

Every statement and expression maps to a fixed gate building block.
Expressions are computed onto fresh constant-0 lines inside a scratch
context; once the statement's effect has been applied the scratch gates are
replayed backwards, which clears those lines so later statements can reuse
them.

Control flow uses a control stack: gates that change program signals get
the stack's lines as extra positive controls, while the scratch computation
itself runs uncontrolled.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

from .circuit import Circuit, Control, Gate, Line, fredkin, toffoli
from .errors import EvalError, SynthesisError
from .nodes import (
    COMPARISON_OPS,
    Assign,
    Binary,
    Call,
    For,
    If,
    Lit,
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
from .semantics import DEFAULT_WIDTH, eval_number, loop_values, read_names, written_names

log = logging.getLogger(__name__)

COND_STRATEGIES = ("control", "duplication")


@dataclass
class SynthOptions:
    """Knobs of :func:`synthesize`.

    Attributes:
        cond_strategy: ``"control"`` adds the condition line as a control to
            every gate of a branch; ``"duplication"`` runs the two branches on
            copies and selects the result with Fredkin gates.
        default_width: width of signals declared without one.
        width_overrides: per-signal widths for the top module.
        max_lines: abort with ``AncillaOverflow`` beyond this many lines.
    """

    cond_strategy: str = "control"
    default_width: int = DEFAULT_WIDTH
    width_overrides: Dict[str, int] = field(default_factory=dict)
    max_lines: Optional[int] = None


@dataclass
class Binding:
    dims: tuple
    width: int
    elements: List[List[int]]  # flat row-major, each LSB first


class _Scratch:
    def __init__(self):
        self.log: List[Gate] = []
        self.lines: List[int] = []


@dataclass
class _CallRecord:
    """Gates of one call, kept so a later uncall can replay them backwards."""

    ops: List[tuple]  # (gate without stack controls, is_effect)
    transient: List[int]  # scratch lines that were clean again afterwards


class _Ctx:
    def __init__(self, module: Module, bindings: Dict[str, Binding], env=None, inverse=False, chain=(), calls=None):
        self.module = module
        self.bindings = bindings
        self.env = dict(env or {})
        self.inverse = inverse
        self.chain = chain
        # open calls of this frame, keyed by callee and argument lines
        self.calls: Dict[tuple, List[_CallRecord]] = {} if calls is None else calls

    @property
    def widths(self) -> Dict[str, int]:
        return {n: b.width for n, b in self.bindings.items()}

    def derive(self, **changes) -> "_Ctx":
        out = _Ctx(self.module, self.bindings, self.env, self.inverse, self.chain, self.calls)
        for k, v in changes.items():
            setattr(out, k, v)
        return out


def _err(kind: str, message: str, pos=None) -> SynthesisError:
    return SynthesisError(message, pos, kind=kind)


def bit_names(name: str, dims: Sequence[int], width: int) -> List[List[str]]:
    """Line names for every element and bit of a signal."""
    out = []
    for path in itertools.product(*(range(d) for d in dims)):
        base = name + "".join(f"[{i}]" for i in path)
        out.append([base] if width == 1 else [f"{base}.{k}" for k in range(width)])
    return out


# -- building blocks ------------------------------------------------------------


def adder_gates(t: Sequence[int], s: Sequence[int], carry: int) -> List[Gate]:
    """Ripple-carry ``t += s (mod 2^n)``; ``carry`` is a clean 0 line and stays 0."""
    n = len(t)
    if n == 0:
        return []
    if n == 1:
        return [toffoli(t[0], s[0])]
    gates: List[Gate] = []
    x = [carry] + list(s[:-1])
    for i in range(n - 1):
        gates += [toffoli(t[i], s[i]), toffoli(x[i], s[i]), toffoli(s[i], x[i], t[i])]
    gates += [toffoli(t[n - 1], s[n - 1]), toffoli(t[n - 1], x[n - 1])]
    for i in reversed(range(n - 1)):
        gates += [toffoli(s[i], x[i], t[i]), toffoli(x[i], s[i]), toffoli(t[i], x[i])]
    return gates


def increment_gates(t: Sequence[int]) -> List[Gate]:
    """``t += 1 (mod 2^n)``."""
    gates = [toffoli(t[k], *t[:k]) for k in range(len(t) - 1, 0, -1)]
    if t:
        gates.append(toffoli(t[0]))
    return gates


def add_constant_gates(t: Sequence[int], k: int) -> List[Gate]:
    """``t += k (mod 2^n)`` as one increment per set bit of ``k``."""
    gates: List[Gate] = []
    for j in range(len(t)):
        if k >> j & 1:
            gates += increment_gates(t[j:])
    return gates


# -- builder --------------------------------------------------------------------


class Builder:
    def __init__(self, program: Program, options: SynthOptions):
        self.program = program
        self.options = options
        self.lines: List[Line] = []
        self.gates: List[Gate] = []
        # per gate: (gate without stack controls, stack at emission) for effects
        self.bases: List[Optional[tuple]] = []
        self.annotations: Dict[int, tuple] = {}
        self.free: List[int] = []
        self.stack: List[int] = []
        self.pos = None
        self.n_ancillae = 0

    # lines

    def new_line(self, name: str, role: str) -> int:
        limit = self.options.max_lines
        if limit is not None and len(self.lines) >= limit:
            raise _err("AncillaOverflow", f"circuit needs more than {limit} lines", self.pos)
        self.lines.append(Line.for_role(name, role))
        return len(self.lines) - 1

    def fresh(self, n: int) -> List[int]:
        out = []
        for _ in range(n):
            out.append(self.new_line(f"const_{self.n_ancillae}", "ancilla"))
            self.n_ancillae += 1
        return out

    def acquire(self, sc: _Scratch, n: int) -> List[int]:
        out = []
        for _ in range(n):
            if self.free:
                self.free.sort()
                out.append(self.free.pop(0))
            else:
                out.extend(self.fresh(1))
        sc.lines.extend(out)
        return out

    # gates

    def raw(self, g: Gate, base: Optional[tuple] = None) -> None:
        if self.pos is not None:
            self.annotations[len(self.gates)] = self.pos
        self.gates.append(g)
        self.bases.append(base)

    def emit(self, g: Gate) -> None:
        """Append a gate that changes program state, under the control stack."""
        self.raw(g.with_controls([Control(c) for c in self.stack]), base=(g, tuple(self.stack)))

    def log(self, sc: _Scratch, g: Gate) -> None:
        self.raw(g)
        sc.log.append(g)

    def release(self, sc: _Scratch) -> None:
        for g in reversed(sc.log):
            self.raw(g)
        self.free.extend(sc.lines)

    # -- signal access ------------------------------------------------------------

    def number(self, ctx: _Ctx, n) -> int:
        try:
            return eval_number(n, ctx.env, ctx.widths)
        except EvalError as exc:
            raise _err(exc.kind, exc.message, getattr(n, "pos", None)) from None

    def binding(self, ctx: _Ctx, a: SignalAccess) -> Binding:
        b = ctx.bindings.get(a.name)
        if b is None:
            raise _err("UnknownSignal", f"unknown signal '{a.name}'", a.pos)
        if b.dims and len(a.indices) != len(b.dims):
            raise _err("IndexCountMismatch", f"'{a.name}' needs {len(b.dims)} index(es)", a.pos)
        return b

    def bit_range(self, ctx: _Ctx, a: SignalAccess, width: int):
        if a.bit_lo is None:
            return 0, width - 1
        lo, hi = self.number(ctx, a.bit_lo), self.number(ctx, a.bit_hi)
        if not 0 <= lo <= hi < width:
            raise _err("BitOutOfRange", f"bit range {lo}:{hi} outside '{a.name}'", a.pos)
        return lo, hi

    def access_width(self, ctx: _Ctx, a: SignalAccess) -> int:
        b = self.binding(ctx, a)
        lo, hi = self.bit_range(ctx, a, b.width)
        return hi - lo + 1

    def static_path(self, ctx: _Ctx, a: SignalAccess) -> Optional[List[int]]:
        path = []
        for idx in a.indices:
            if not isinstance(idx, Number):
                return None
            path.append(self.number(ctx, idx.value))
        return path

    def element_lines(self, ctx: _Ctx, a: SignalAccess, path) -> Optional[List[int]]:
        """Lines of the accessed bits, ``None`` if the element is out of range."""
        b = self.binding(ctx, a)
        flat = 0
        for d, i in zip(b.dims, path):
            if not 0 <= i < d:
                return None
            flat = flat * d + i
        lo, hi = self.bit_range(ctx, a, b.width)
        return b.elements[flat][lo : hi + 1]

    def static_lines(self, ctx: _Ctx, a: SignalAccess) -> Optional[List[int]]:
        path = self.static_path(ctx, a)
        if path is None:
            raise _err("DynamicIndex", f"index of '{a.name}' is not static here", a.pos)
        return self.element_lines(ctx, a, path)

    # -- expressions ----------------------------------------------------------------

    def width_of(self, ctx: _Ctx, e) -> Optional[int]:
        if isinstance(e, Number):
            return None
        if isinstance(e, SignalAccess):
            return self.access_width(ctx, e)
        if isinstance(e, Unary):
            return 1 if e.op == "!" else self.width_of(ctx, e.operand)
        if isinstance(e, Shift):
            return self.width_of(ctx, e.operand)
        if e.op in COMPARISON_OPS or e.op in ("&&", "||"):
            return 1
        lw = self.width_of(ctx, e.lhs)
        return lw if lw is not None else self.width_of(ctx, e.rhs)

    def literal(self, sc: _Scratch, value: int, w: int) -> List[int]:
        t = self.acquire(sc, w)
        for k in range(w):
            if value >> k & 1:
                self.log(sc, toffoli(t[k]))
        return t

    def copy(self, sc: _Scratch, src: Sequence[int]) -> List[int]:
        t = self.acquire(sc, len(src))
        for a, b in zip(src, t):
            self.log(sc, toffoli(b, a))
        return t

    def operand(self, ctx: _Ctx, sc: _Scratch, e, want: Optional[int]) -> List[int]:
        """Lines carrying the value of ``e``.

        A plain signal access yields the signal's own lines; anything else is
        computed onto lines acquired from ``sc``.
        """
        if isinstance(e, Number):
            if want is None:
                raise _err("WidthMismatch", "cannot size a literal here", e.pos)
            return self.literal(sc, self.number(ctx, e.value) & ((1 << want) - 1), want)
        if isinstance(e, SignalAccess):
            return self.read(ctx, sc, e)
        if isinstance(e, Unary):
            if e.op == "!":
                a = self.operand(ctx, sc, e.operand, 1)
                t = self.copy(sc, a)
                self.log(sc, toffoli(t[0]))
                return t
            a = self.operand(ctx, sc, e.operand, want)
            t = self.copy(sc, a)
            for line in t:
                self.log(sc, toffoli(line))
            return t
        if isinstance(e, Shift):
            a = self.operand(ctx, sc, e.operand, want)
            n, w = self.number(ctx, e.amount), len(a)
            t = self.acquire(sc, w)
            for k in range(w):
                src = k - n if e.op == "<<" else k + n
                if 0 <= src < w:
                    self.log(sc, toffoli(t[k], a[src]))
            return t
        return self.binary(ctx, sc, e, want)

    def read(self, ctx: _Ctx, sc: _Scratch, a: SignalAccess) -> List[int]:
        w = self.access_width(ctx, a)
        path = self.static_path(ctx, a)
        if path is not None:
            lines = self.element_lines(ctx, a, path)
            return lines if lines is not None else self.acquire(sc, w)
        # Dynamic index: select the addressed element into a fresh register.
        t = self.acquire(sc, w)
        for path, guard in self.index_cases(ctx, sc, a):
            src = self.element_lines(ctx, a, path)
            for x, y in zip(src, t):
                self.log(sc, toffoli(y, guard, x))
        return t

    def index_cases(self, ctx: _Ctx, sc: _Scratch, a: SignalAccess):
        """Yield (static path, flag line) for every in-range value of the indices."""
        b = self.binding(ctx, a)
        choices = []
        for idx, d in zip(a.indices, b.dims):
            if isinstance(idx, Number):
                choices.append([(self.number(ctx, idx.value), None)])
                continue
            w = self.width_of(ctx, idx)
            opts = []
            for k in range(min(d, 1 << w) if w is not None else d):
                flag = self.operand(ctx, sc, Binary("=", idx, Number(Lit(k))), 1)[0]
                opts.append((k, flag))
            choices.append(opts)
        for combo in itertools.product(*choices):
            path = [k for k, _ in combo]
            flags = [f for _, f in combo if f is not None]
            if len(flags) == 1:
                guard = flags[0]
            else:
                guard = self.acquire(sc, 1)[0]
                self.log(sc, toffoli(guard, *flags))
            yield path, guard

    def distinct(self, sc: _Scratch, a: List[int], b: List[int]) -> List[int]:
        return self.copy(sc, b) if set(a) & set(b) else b

    def binary(self, ctx: _Ctx, sc: _Scratch, e: Binary, want) -> List[int]:
        op = e.op
        if op == "/":
            raise _err("DivisionUnsupported", "division has no reversible realization here", e.pos)
        if op in ("&&", "||"):
            a = self.operand(ctx, sc, e.lhs, 1)
            b = self.distinct(sc, a, self.operand(ctx, sc, e.rhs, 1))
            return self.bitwise(sc, "&" if op == "&&" else "|", a, b)
        lw, rw = self.width_of(ctx, e.lhs), self.width_of(ctx, e.rhs)
        if lw is not None and rw is not None and lw != rw:
            raise _err("WidthMismatch", f"operands of '{op}' have widths {lw} and {rw}", e.pos)
        if op in COMPARISON_OPS:
            w = lw if lw is not None else rw
            if w is None:
                a = self.number(ctx, e.lhs.value)
                b = self.number(ctx, e.rhs.value)
                return self.literal(sc, int(_compare(op, a, b)), 1)
            return self.compare(ctx, sc, e, w)
        w = lw if lw is not None else (rw if rw is not None else want)
        if op in ("+", "-"):
            t = self.operand(ctx, sc, e.lhs, w)
            if isinstance(e.lhs, SignalAccess):
                t = self.copy(sc, t)
            if isinstance(e.rhs, Number):
                k = self.number(ctx, e.rhs.value) % (1 << w)
                gates = add_constant_gates(t, k)
            else:
                s = self.operand(ctx, sc, e.rhs, w)
                if set(s) & set(t):
                    s = self.copy(sc, s)
                gates = adder_gates(t, s, self.acquire(sc, 1)[0])
            for g in gates if op == "+" else reversed(gates):
                self.log(sc, g)
            return t
        a = self.operand(ctx, sc, e.lhs, w)
        b = self.distinct(sc, a, self.operand(ctx, sc, e.rhs, w))
        if op == "*":
            return self.multiply(sc, a, b)
        return self.bitwise(sc, op, a, b)

    def bitwise(self, sc: _Scratch, op: str, a, b) -> List[int]:
        t = self.acquire(sc, len(a))
        for x, y, z in zip(a, b, t):
            if op == "&":
                self.log(sc, toffoli(z, x, y))
            elif op == "|":
                self.log(sc, toffoli(z, x, y))
                self.log(sc, toffoli(z, x))
                self.log(sc, toffoli(z, y))
            else:
                self.log(sc, toffoli(z, x))
                self.log(sc, toffoli(z, y))
        return t

    def multiply(self, sc: _Scratch, a, b) -> List[int]:
        w = len(a)
        t = self.acquire(sc, w)
        carry = self.acquire(sc, 1)[0]
        for i in range(w):
            for g in adder_gates(t[i:], a[: w - i], carry):
                self.log(sc, g.with_controls([Control(b[i])]))
        return t

    def compare(self, ctx: _Ctx, sc: _Scratch, e: Binary, w: int) -> List[int]:
        op = e.op
        if op in ("=", "!=") and (isinstance(e.lhs, Number) or isinstance(e.rhs, Number)):
            lit, other = (e.lhs, e.rhs) if isinstance(e.lhs, Number) else (e.rhs, e.lhs)
            k = self.number(ctx, lit.value)
            x = self.operand(ctx, sc, other, w)
            r = self.acquire(sc, 1)[0]
            if k >> w:
                flips = []  # value cannot be represented: never equal
            else:
                flips = [line for i, line in enumerate(x) if not k >> i & 1]
                for line in flips:
                    self.log(sc, toffoli(line))
                self.log(sc, toffoli(r, *x))
                for line in flips:
                    self.log(sc, toffoli(line))
            if op == "!=":
                self.log(sc, toffoli(r))
            return [r]
        a = self.operand(ctx, sc, e.lhs, w)
        b = self.distinct(sc, a, self.operand(ctx, sc, e.rhs, w))
        if op in ("=", "!="):
            if w == 1:
                r = self.bitwise(sc, "^", a, b)[0]
                if op == "=":
                    self.log(sc, toffoli(r))
                return [r]
            t = self.bitwise(sc, "^", a, b)
            for line in t:
                self.log(sc, toffoli(line))
            r = self.acquire(sc, 1)[0]
            self.log(sc, toffoli(r, *t))
            if op == "!=":
                self.log(sc, toffoli(r))
            return [r]
        # a < b, a > b = b < a, a <= b = !(b < a), a >= b = !(a < b)
        swap = op in (">", "<=")
        lo, hi = (b, a) if swap else (a, b)
        r = self.less_than(sc, lo, hi)
        if op in ("<=", ">="):
            self.log(sc, toffoli(r))
        return [r]

    def less_than(self, sc: _Scratch, a, b) -> int:
        if len(a) == 1:
            r = self.acquire(sc, 1)[0]
            self.log(sc, toffoli(a[0]))
            self.log(sc, toffoli(r, a[0], b[0]))
            self.log(sc, toffoli(a[0]))
            return r
        # The borrow of an (n+1)-bit subtraction a - b is set iff a < b.
        n = len(a)
        t = self.copy(sc, a) + self.acquire(sc, 1)
        ext = list(b) + self.acquire(sc, 1)
        carry = self.acquire(sc, 1)[0]
        for g in reversed(adder_gates(t, ext, carry)):
            self.log(sc, g)
        return t[n]

    # -- statements ---------------------------------------------------------------

    def block(self, ctx: _Ctx, stmts) -> None:
        for s in reversed(stmts) if ctx.inverse else stmts:
            self.statement(ctx, s)

    def statement(self, ctx: _Ctx, s) -> None:
        self.pos = s.pos
        if isinstance(s, Skip):
            return
        if isinstance(s, (Assign, UnaryStmt, Swap)):
            targets = [s.lhs, s.rhs] if isinstance(s, Swap) else [s.lhs if isinstance(s, Assign) else s.target]
            dynamic = [a for a in targets if self.static_path(ctx, a) is None]
            if dynamic:
                self.case_split(ctx, s, dynamic)
            else:
                self.effect(ctx, s)
        elif isinstance(s, If):
            self.conditional(ctx, s)
        elif isinstance(s, For):
            self.loop(ctx, s)
        elif isinstance(s, Call):
            self.call(ctx, s)
        else:
            raise TypeError(s)

    def case_split(self, ctx: _Ctx, s, dynamic: List[SignalAccess]) -> None:
        """Run ``s`` once per value of its dynamic write indices, each guarded."""
        sc = _Scratch()
        cases = [list(self.index_cases(ctx, sc, a)) for a in dynamic]
        for combo in itertools.product(*cases):
            flags = [g for _, g in combo]
            if len(flags) == 1:
                guard = flags[0]
            else:
                guard = self.acquire(sc, 1)[0]
                self.log(sc, toffoli(guard, *flags))
            fixed = {a: _with_path(a, path) for a, (path, _) in zip(dynamic, combo)}
            self.stack.append(guard)
            self.effect(ctx, _substitute(s, fixed))
            self.stack.pop()
        self.release(sc)

    def effect(self, ctx: _Ctx, s) -> None:
        sc = _Scratch()
        if isinstance(s, Swap):
            x, y = self.static_lines(ctx, s.lhs), self.static_lines(ctx, s.rhs)
            wx, wy = self.access_width(ctx, s.lhs), self.access_width(ctx, s.rhs)
            if wx != wy:
                raise _err("WidthMismatch", "swap operands differ in width", s.pos)
            if x is not None and y is not None:
                if set(x) & set(y):
                    raise _err("WidthMismatch", "swap operands overlap", s.pos)
                for p, q in zip(x, y):
                    self.emit(fredkin(p, q))
            return
        if isinstance(s, UnaryStmt):
            t = self.static_lines(ctx, s.target)
            if t is None:
                return
            op = s.op
            if ctx.inverse and op != "~":
                op = "++" if op == "--" else "--"
            if op == "~":
                gates = [toffoli(line) for line in t]
            else:
                gates = increment_gates(t)
                if op == "--":
                    gates.reverse()
            for g in gates:
                self.emit(g)
            return
        t = self.static_lines(ctx, s.lhs)
        w = self.access_width(ctx, s.lhs)
        rw = self.width_of(ctx, s.rhs)
        if rw is not None and rw != w:
            raise _err("WidthMismatch", f"assigning {rw} bits to {w}", s.pos)
        if t is None:
            return
        op = s.op
        if ctx.inverse and op != "^":
            op = "+" if op == "-" else "-"
        if isinstance(s.rhs, Number):
            k = self.number(ctx, s.rhs.value) % (1 << w)
            if op == "^":
                gates = [toffoli(line) for i, line in enumerate(t) if k >> i & 1]
            else:
                gates = add_constant_gates(t, k)
        else:
            src = self.operand(ctx, sc, s.rhs, w)
            if set(src) & set(t):
                raise _err("LhsInRhs", f"'{s.lhs.name}' appears on both sides", s.pos)
            if op == "^":
                gates = [toffoli(x, y) for x, y in zip(t, src)]
            else:
                gates = adder_gates(t, src, self.acquire(sc, 1)[0])
        if op == "-":
            gates = list(reversed(gates))
        for g in gates:
            self.emit(g)
        self.release(sc)

    def conditional(self, ctx: _Ctx, s: If) -> None:
        cond, fi = (s.fi_cond, s.cond) if ctx.inverse else (s.cond, s.fi_cond)
        w = self.width_of(ctx, cond)
        if w not in (None, 1):
            raise _err("CondNotBoolean", "condition must be 1 bit wide", s.pos)
        sc = _Scratch()
        then_body, else_body = s.then_body, s.else_body
        written = written_names(tuple(then_body) + tuple(else_body), self.program)
        r = self.operand(ctx, sc, cond, 1)[0]
        # A bare signal can steer the branches itself when they never touch it;
        # otherwise the branches would see the flipped value.
        reuse = r in sc.lines or not read_names(cond) & _mentioned(tuple(then_body) + tuple(else_body))
        e = r if reuse else self.copy(sc, [r])[0]
        if self.options.cond_strategy == "duplication":
            self.duplicate(ctx, e, then_body, else_body, written)
        else:
            self.stack.append(e)
            self.block(ctx, then_body)
            self.stack.pop()
            self.raw(toffoli(e))
            self.stack.append(e)
            self.block(ctx, else_body)
            self.stack.pop()
            self.raw(toffoli(e))
        self.pos = s.pos
        if fi == cond and not read_names(cond) & written:
            self.release(sc)
        else:
            # The condition cannot be recomputed; its lines stay as garbage.
            log.warning("condition at %s cannot be uncomputed; keeping its lines as garbage", s.pos)

    def duplicate(self, ctx: _Ctx, e: int, then_body, else_body, written) -> None:
        copies: Dict[str, Binding] = {}
        for name in sorted(written & set(ctx.bindings)):
            b = ctx.bindings[name]
            elements = []
            for elem in b.elements:
                fresh = self.fresh(len(elem))
                for x, y in zip(elem, fresh):
                    self.raw(toffoli(y, x))
                elements.append(fresh)
            copies[name] = Binding(b.dims, b.width, elements)
        self.block(ctx, then_body)
        self.block(ctx.derive(bindings={**ctx.bindings, **copies}), else_body)
        self.raw(toffoli(e))
        for name, cb in copies.items():
            for elem, celem in zip(ctx.bindings[name].elements, cb.elements):
                for x, y in zip(elem, celem):
                    self.emit(fredkin(x, y, e))
        self.raw(toffoli(e))

    def loop(self, ctx: _Ctx, s: For) -> None:
        if not isinstance(s.stop, Number):
            raise _err("NonStaticBound", "loop end must be static", s.pos)
        stop = self.number(ctx, s.stop.value)
        step = self.number(ctx, s.step) if s.step is not None else 1
        try:
            if s.start is None:
                values = list(loop_values(1, stop, step, False))
            elif isinstance(s.start, Number):
                values = list(loop_values(self.number(ctx, s.start.value), stop, step, s.step_negative))
            else:
                return self.dynamic_loop(ctx, s, stop, step)
        except EvalError as exc:
            raise _err(exc.kind, exc.message, s.pos) from None
        for v in reversed(values) if ctx.inverse else values:
            inner = ctx.derive(env={**ctx.env, s.var: v} if s.var else ctx.env)
            self.block(inner, s.body)

    def dynamic_loop(self, ctx: _Ctx, s: For, stop: int, step: int) -> None:
        """Unroll over every possible start value, guarding each iteration."""
        if step != 1:
            raise _err("NonStaticBound", "a run-time loop start needs step 1", s.pos)
        if read_names(s.start) & written_names(s.body, self.program):
            raise _err("DynamicBoundModified", "loop body modifies its start", s.pos)
        w = self.width_of(ctx, s.start)
        top = (1 << w) - 1
        if s.step_negative:
            hull = [(k, Binary(">=", s.start, Number(Lit(k)))) for k in range(top, stop - 1, -1)]
        else:
            hull = [(k, Binary("<=", s.start, Number(Lit(k))) if k <= top else None) for k in range(0, stop + 1)]
        for k, guard in reversed(hull) if ctx.inverse else hull:
            inner = ctx.derive(env={**ctx.env, s.var: k} if s.var else ctx.env)
            if guard is None:
                self.block(inner, s.body)
                continue
            sc = _Scratch()
            g = self.operand(ctx, sc, guard, 1)[0]
            self.stack.append(g)
            self.block(inner, s.body)
            self.stack.pop()
            self.pos = s.pos
            self.release(sc)

    def call(self, ctx: _Ctx, s: Call) -> None:
        callee = self.program.module(s.name)
        if callee is None:
            raise _err("UnknownModule", f"unknown module '{s.name}'", s.pos)
        if s.name in ctx.chain:
            raise _err("RecursionDetected", f"recursive call of '{s.name}'", s.pos)
        if len(callee.params) != len(s.args):
            raise _err(
                "ArityMismatch", f"'{s.name}' takes {len(callee.params)} argument(s), got {len(s.args)}", s.pos
            )
        bindings: Dict[str, Binding] = {}
        for decl, arg in zip(callee.params, s.args):
            b = ctx.bindings.get(arg)
            if b is None:
                raise _err("UnknownSignal", f"unknown signal '{arg}'", s.pos)
            if tuple(b.dims) != tuple(decl.dims) or b.width != decl.width:
                raise _err("WidthMismatch", f"argument '{arg}' does not fit '{decl.name}'", s.pos)
            bindings[decl.name] = b
        forward = (s.kind == "call") != ctx.inverse
        key = (s.name,) + tuple(tuple(map(tuple, bindings[d.name].elements)) for d in callee.params)
        if not forward and ctx.calls.get(key):
            self.replay_inverse(ctx.calls[key].pop())
            return
        for decl in callee.locals:
            bindings[decl.name] = self.declare(decl, prefix=f"{callee.name}/")
        start, depth = len(self.gates), len(self.stack)
        inner = _Ctx(callee, bindings, inverse=not forward, chain=ctx.chain + (s.name,))
        self.block(inner, callee.body)
        if forward:
            ops = []
            for g, base in zip(self.gates[start:], self.bases[start:]):
                if base is None:
                    ops.append((g, False))
                else:
                    # keep the callee's own controls, drop those of the call site
                    ops.append((base[0].with_controls([Control(c) for c in base[1][depth:]]), True))
            touched = {line for g, _ in ops for line in g.lines}
            ctx.calls.setdefault(key, []).append(_CallRecord(ops, sorted(touched & set(self.free))))

    def replay_inverse(self, rec: _CallRecord) -> None:
        """Undo a recorded call by its reversed gate list.

        The call's scratch lines may be busy by now, so they are mapped onto
        lines that are free at this point.
        """
        sc = _Scratch()
        fresh = dict(zip(rec.transient, self.acquire(sc, len(rec.transient))))
        for g, effect in reversed(rec.ops):
            g = _remap(g, fresh)
            if effect:
                self.emit(g)
            else:
                self.raw(g)
        self.free.extend(sc.lines)

    def declare(self, decl, prefix: str = "") -> Binding:
        if decl.modifier == "state":
            raise _err("SequentialUnsupported", f"state signal '{decl.name}' needs sequential synthesis", decl.pos)
        elements = []
        for names in bit_names(prefix + decl.name, decl.dims, decl.width):
            elements.append([self.new_line(n, decl.modifier) for n in names])
        return Binding(tuple(decl.dims), decl.width, elements)


def _remap(g: Gate, m: Dict[int, int]) -> Gate:
    if not m:
        return g
    controls = tuple(Control(m.get(c.line, c.line), c.positive) for c in g.controls)
    return Gate(g.kind, controls, tuple(m.get(t, t) for t in g.targets))


def _mentioned(stmts) -> set:
    """Every signal name a statement list reads, writes or passes to a call."""
    out = set()
    for s in stmts:
        if isinstance(s, Assign):
            out |= read_names(s.lhs) | read_names(s.rhs)
        elif isinstance(s, UnaryStmt):
            out |= read_names(s.target)
        elif isinstance(s, Swap):
            out |= read_names(s.lhs) | read_names(s.rhs)
        elif isinstance(s, If):
            out |= read_names(s.cond) | read_names(s.fi_cond) | _mentioned(s.then_body) | _mentioned(s.else_body)
        elif isinstance(s, For):
            out |= _mentioned(s.body)
            if s.start is not None:
                out |= read_names(s.start)
        elif isinstance(s, Call):
            out.update(s.args)
    return out


def _compare(op: str, a: int, b: int) -> bool:
    return {"<": a < b, ">": a > b, "=": a == b, "!=": a != b, "<=": a <= b, ">=": a >= b}[op]


def _with_path(a: SignalAccess, path) -> SignalAccess:
    return replace(a, indices=tuple(Number(Lit(k)) for k in path))


def _substitute(s, fixed: Dict[SignalAccess, SignalAccess]):
    if isinstance(s, Assign):
        return replace(s, lhs=fixed.get(s.lhs, s.lhs))
    if isinstance(s, UnaryStmt):
        return replace(s, target=fixed.get(s.target, s.target))
    return replace(s, lhs=fixed.get(s.lhs, s.lhs), rhs=fixed.get(s.rhs, s.rhs))


def synthesize(module, program: Program, options: Optional[SynthOptions] = None) -> Circuit:
    """Synthesize ``module`` (a :class:`Module` or its name) of ``program``.

    Raises:
        SynthesisError: for constructs without a combinational realization
            (``state`` signals, division), ill-formed programs, or when
            ``options.max_lines`` is exceeded.
    """
    options = options or SynthOptions()
    if options.cond_strategy not in COND_STRATEGIES:
        raise ValueError(f"unknown condition strategy {options.cond_strategy!r}")
    name = module if isinstance(module, str) else module.name
    program = with_widths(program, options.default_width, options.width_overrides, module=name)
    top = program.module(name)
    if top is None:
        raise _err("UnknownModule", f"unknown module '{name}'")
    builder = Builder(program, options)
    bindings = {d.name: builder.declare(d) for d in top.signals}
    builder.block(_Ctx(top, bindings, chain=(name,)), top.body)
    signals = {n: b.elements for n, b in bindings.items()}
    return Circuit(builder.lines, builder.gates, builder.annotations, signals)
