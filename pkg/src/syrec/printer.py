"""Pretty-printer: renders a syntax tree back to parseable SyReC source."""

from __future__ import annotations

from typing import List, Sequence

from .nodes import (
    Assign,
    Binary,
    Call,
    For,
    If,
    Lit,
    LoopVar,
    Module,
    Number,
    NumBinary,
    Program,
    Shift,
    SignalAccess,
    SignalDecl,
    Skip,
    Swap,
    Unary,
    UnaryStmt,
    WidthOf,
)

INDENT = "  "


def format_number(n) -> str:
    if isinstance(n, Lit):
        return str(n.value)
    if isinstance(n, WidthOf):
        return f"#{n.name}"
    if isinstance(n, LoopVar):
        return f"${n.name}"
    if isinstance(n, NumBinary):
        return f"({format_number(n.lhs)} {n.op} {format_number(n.rhs)})"
    raise TypeError(f"not a number expression: {n!r}")


def format_signal(s: SignalAccess) -> str:
    out = s.name + "".join(f"[{format_expr(i)}]" for i in s.indices)
    if s.bit_lo is not None:
        out += "." + format_number(s.bit_lo)
        if s.bit_hi != s.bit_lo:
            out += ":" + format_number(s.bit_hi)
    return out


def format_expr(e) -> str:
    if isinstance(e, Number):
        return format_number(e.value)
    if isinstance(e, SignalAccess):
        return format_signal(e)
    if isinstance(e, Binary):
        return f"({format_expr(e.lhs)} {e.op} {format_expr(e.rhs)})"
    if isinstance(e, Unary):
        return f"{e.op}{format_expr(e.operand)}"
    if isinstance(e, Shift):
        return f"({format_expr(e.operand)} {e.op} {format_number(e.amount)})"
    raise TypeError(f"not an expression: {e!r}")


def format_decl(d: SignalDecl) -> str:
    out = d.name + "".join(f"[{n}]" for n in d.dims)
    if d.width is not None:
        out += f"({d.width})"
    return out


def _statements(stmts: Sequence, depth: int) -> List[str]:
    lines: List[str] = []
    for k, stmt in enumerate(stmts):
        block = _statement(stmt, depth)
        if k < len(stmts) - 1:
            block[-1] += ";"
        lines.extend(block)
    return lines


def _statement(s, depth: int) -> List[str]:
    pad = INDENT * depth
    if isinstance(s, Skip):
        return [pad + "skip"]
    if isinstance(s, Assign):
        return [f"{pad}{format_signal(s.lhs)} {s.op}= {format_expr(s.rhs)}"]
    if isinstance(s, UnaryStmt):
        return [f"{pad}{s.op}= {format_signal(s.target)}"]
    if isinstance(s, Swap):
        return [f"{pad}{format_signal(s.lhs)} <=> {format_signal(s.rhs)}"]
    if isinstance(s, Call):
        return [f"{pad}{s.kind} {s.name}({', '.join(s.args)})"]
    if isinstance(s, If):
        return (
            [f"{pad}if {format_expr(s.cond)} then"]
            + _statements(s.then_body, depth + 1)
            + [f"{pad}else"]
            + _statements(s.else_body, depth + 1)
            + [f"{pad}fi {format_expr(s.fi_cond)}"]
        )
    if isinstance(s, For):
        head = "for "
        if s.var is not None:
            head += f"${s.var} = "
        if s.start is not None:
            head += f"{format_expr(s.start)} to "
        head += format_expr(s.stop)
        if s.step is not None:
            head += " step " + ("-" if s.step_negative else "") + format_number(s.step)
        return [pad + head + " do"] + _statements(s.body, depth + 1) + [pad + "rof"]
    raise TypeError(f"not a statement: {s!r}")


def format_module(m: Module) -> str:
    params = ", ".join(f"{d.modifier} {format_decl(d)}" for d in m.params)
    lines = [f"module {m.name}({params})"]
    group: List[SignalDecl] = []
    for d in m.locals:
        if group and group[0].modifier != d.modifier:
            lines.append(INDENT + group[0].modifier + " " + ", ".join(map(format_decl, group)))
            group = []
        group.append(d)
    if group:
        lines.append(INDENT + group[0].modifier + " " + ", ".join(map(format_decl, group)))
    lines.extend(_statements(m.body, 1))
    return "\n".join(lines)


def format_program(p: Program) -> str:
    return "\n\n".join(format_module(m) for m in p.modules) + "\n"
