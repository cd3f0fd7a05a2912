import pytest

from syrec.errors import ParseError
from syrec.nodes import (
    Assign,
    Binary,
    Call,
    For,
    If,
    Lit,
    LoopVar,
    Number,
    NumBinary,
    SignalAccess,
    Skip,
    Swap,
    Unary,
    UnaryStmt,
    WidthOf,
)
from syrec.parser import parse


def body(src):
    return parse(src).modules[-1].body


def test_module_header():
    m = parse("module adder(in a(16), in b, out c[4](2)) wire t(3) skip").modules[0]
    assert [(d.name, d.modifier, d.dims, d.width) for d in m.params] == [
        ("a", "in", (), 16),
        ("b", "in", (), None),
        ("c", "out", (4,), 2),
    ]
    assert [(d.name, d.modifier) for d in m.locals] == [("t", "wire")]
    assert m.body == (Skip(),)


def test_assignments_and_split_operators():
    stmts = body("module m(inout a(2), in b(2)) a ^ = b; a += (a + b); a - = 1")
    assert stmts[0] == Assign(SignalAccess("a"), "^", SignalAccess("b"))
    assert stmts[1].op == "+" and isinstance(stmts[1].rhs, Binary)
    assert stmts[2] == Assign(SignalAccess("a"), "-", Number(Lit(1)))


def test_unary_statements():
    stmts = body("module m(inout a(2)) ~= a; ++= a; --= a")
    assert [s.op for s in stmts] == ["~", "++", "--"]
    assert all(isinstance(s, UnaryStmt) for s in stmts)


def test_bit_access_forms():
    (s,) = body("module m(inout x(8), in y(8)) x.$i ^= y.2:#y")
    assert s.lhs.bit_lo == LoopVar("i") and s.lhs.bit_hi == LoopVar("i")
    assert s.rhs.bit_lo == Lit(2) and s.rhs.bit_hi == WidthOf("y")


def test_number_fold():
    (s,) = body("module m(inout x(8)) x += (#x - 1)")
    assert s.rhs == Number(NumBinary("-", WidthOf("x"), Lit(1)))


def test_expressions_need_parentheses():
    (s,) = body("module m(out x(1), in a(1), in b(1)) x ^= ((a & b) || !a)")
    assert s.rhs.op == "||"
    assert s.rhs.rhs == Unary("!", SignalAccess("a"))
    with pytest.raises(ParseError):
        parse("module m(out x(1), in a(1), in b(1)) x ^= a & b")


def test_if_and_for():
    (s, f) = body(
        "module m(inout a(4), in b(4)) if (a = 5) then a += b else a -= b fi (a = 5); "
        "for $i = 1 to 10 step 2 do skip rof"
    )
    assert isinstance(s, If) and s.cond == s.fi_cond
    assert isinstance(f, For) and f.var == "i" and f.step == Lit(2) and not f.step_negative


def test_short_loop_and_negative_step():
    a, b = body("module m(inout a(1)) for 4 skip rof; for $k = 3 to 0 step -1 do skip rof")
    assert a.start is None and a.stop == Number(Lit(4))
    assert b.step_negative


def test_call_and_swap():
    stmts = body("module f(inout x(2), inout y(2)) x <=> y\nmodule m(inout p(2), inout q(2)) call f(p, q); uncall f(p, q)")
    assert stmts == (Call("call", "f", ("p", "q")), Call("uncall", "f", ("p", "q")))
    assert parse("module f(inout x(2), inout y(2)) x <=> y").modules[0].body == (
        Swap(SignalAccess("x"), SignalAccess("y")),
    )


def test_optional_semicolons():
    a = body("module m(inout a(2), in b(2)) a += b; a -= b;")
    b = body("module m(inout a(2), in b(2)) a += b a -= b")
    assert a == b


def test_error_position_and_expectation():
    with pytest.raises(ParseError) as exc:
        parse("module m(inout a(2))\n  a += ")
    assert exc.value.pos[0] == 2
    assert exc.value.kind == "SyntaxError"


def test_empty_input_is_an_error():
    with pytest.raises(ParseError):
        parse("")
