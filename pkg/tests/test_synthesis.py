import itertools
import logging

import pytest

from helpers import build, simulate
from syrec.circuit import circuit_cost
from syrec.errors import SynthesisError
from syrec.interpreter import interpret
from syrec.nodes import with_widths
from syrec.parser import parse
from syrec.simulator import check_reversible
from syrec.synthesis import SynthOptions, synthesize

STRATEGIES = ("control", "duplication")


def exhaust(src, oracle, strategy="control", **opts):
    """Check every input combination of ``src`` against ``oracle(inputs) -> outputs``."""
    program, name, c = build(src, strategy, **opts)
    top = with_widths(program, 16, module=name).module(name)
    ins = [d for d in top.params if d.modifier in ("in", "inout")]
    ranges = []
    for d in ins:
        count = 1
        for n in d.dims:
            count *= n
        ranges += [range(2**d.width)] * count
    for values in itertools.product(*ranges):
        it = iter(values)
        inputs = {d.name: ([next(it) for _ in range(d.dims[0])] if d.dims else next(it)) for d in ins}
        got = simulate(c, **inputs)
        for sig, want in oracle(dict(inputs)).items():
            assert got[sig] == want, (inputs, sig, got[sig], want)
        for d in ins:
            if d.modifier == "in":
                assert got[d.name] == inputs[d.name], "inputs must be preserved"
    return c


# -- assignment tables --------------------------------------------------------------


def test_add_table_2bit():
    # rows b1 b0 a1 a0 -> a' ; spot rows
    c = exhaust("module m(inout a(2), in b(2)) a += b", lambda v: {"a": (v["a"] + v["b"]) % 4})
    assert simulate(c, a=0b01, b=0b01)["a"] == 0b10


def test_sub_table_2bit():
    c = exhaust("module m(inout a(2), in b(2)) a -= b", lambda v: {"a": (v["a"] - v["b"]) % 4})
    assert simulate(c, a=0b00, b=0b01)["a"] == 0b11


@pytest.mark.parametrize("width", [1, 2, 3, 4])
def test_add_sub_xor_widths(width):
    m = 1 << width
    for op, f in (("+", lambda a, b: (a + b) % m), ("-", lambda a, b: (a - b) % m), ("^", lambda a, b: a ^ b)):
        src = f"module m(inout a({width}), in b({width})) a {op}= b"
        exhaust(src, lambda v: {"a": f(v["a"], v["b"])})


def test_adder_uses_one_carry_line():
    _, _, c = build("module m(inout a(4), in b(4)) a += b")
    assert circuit_cost(c).lines == 9


@pytest.mark.parametrize("k", range(8))
def test_constant_rhs(k):
    exhaust(f"module m(inout a(3)) a += {k}", lambda v: {"a": (v["a"] + k) % 8})
    exhaust(f"module m(inout a(3)) a -= {k}", lambda v: {"a": (v["a"] - k) % 8})
    exhaust(f"module m(inout a(3)) a ^= {k}", lambda v: {"a": v["a"] ^ k})


def test_constant_increment_needs_no_extra_lines():
    _, _, c = build("module m(inout a(3)) a += 5")
    assert c.num_lines == 3


def test_unary_statements():
    exhaust("module m(inout a(3)) ~= a", lambda v: {"a": v["a"] ^ 7})
    exhaust("module m(inout a(3)) ++= a", lambda v: {"a": (v["a"] + 1) % 8})
    exhaust("module m(inout a(3)) --= a", lambda v: {"a": (v["a"] - 1) % 8})


def test_swap():
    exhaust("module m(inout a(2), inout b(2)) a <=> b", lambda v: {"a": v["b"], "b": v["a"]})
    exhaust("module m(inout a(4)) a.0:1 <=> a.2:3", lambda v: {"a": (v["a"] >> 2) | ((v["a"] & 3) << 2)})


# -- expressions ------------------------------------------------------------------------

BINARY = {
    "+": lambda a, b, m: (a + b) % m,
    "-": lambda a, b, m: (a - b) % m,
    "*": lambda a, b, m: (a * b) % m,
    "&": lambda a, b, m: a & b,
    "|": lambda a, b, m: a | b,
    "^": lambda a, b, m: a ^ b,
}
COMPARE = {
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}


@pytest.mark.parametrize("width", [1, 2, 3])
@pytest.mark.parametrize("op", sorted(BINARY))
def test_binary_expressions(op, width):
    m = 1 << width
    src = f"module m(in a({width}), in b({width}), out c({width})) c ^= (a {op} b)"
    exhaust(src, lambda v: {"c": BINARY[op](v["a"], v["b"], m)})


@pytest.mark.parametrize("width", [1, 2, 3])
@pytest.mark.parametrize("op", sorted(COMPARE))
def test_comparisons(op, width):
    src = f"module m(in a({width}), in b({width}), out c(1)) c ^= (a {op} b)"
    exhaust(src, lambda v: {"c": int(COMPARE[op](v["a"], v["b"]))})


def test_and_truth_table_1bit():
    _, _, c = build("module m(in a(1), in b(1), out c(1)) c ^= (a & b)")
    rows = [(a, b, simulate(c, a=a, b=b)["c"]) for a in (0, 1) for b in (0, 1)]
    assert rows == [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)]


def test_less_than_1bit_row():
    _, _, c = build("module m(in a(1), in b(1), out c(1)) c ^= (a < b)")
    assert simulate(c, a=0, b=1)["c"] == 1
    assert simulate(c, a=1, b=0)["c"] == 0


def test_multiplication_2bit_all_pairs():
    exhaust("module m(in a(2), in b(2), out c(2)) c ^= (a * b)", lambda v: {"c": v["a"] * v["b"] % 4})


def test_operand_used_twice():
    exhaust("module m(in a(3), out c(3)) c ^= (a * a)", lambda v: {"c": v["a"] ** 2 % 8})
    exhaust("module m(in a(3), out c(1)) c ^= (a < a)", lambda v: {"c": 0})


def test_literal_operands_adopt_width():
    exhaust("module m(in a(3), out c(3)) c ^= (a + 7)", lambda v: {"c": (v["a"] + 7) % 8})
    exhaust("module m(in a(3), out c(3)) c ^= (5 - a)", lambda v: {"c": (5 - v["a"]) % 8})
    exhaust("module m(in a(3), out c(1)) c ^= (a = 5)", lambda v: {"c": int(v["a"] == 5)})
    exhaust("module m(in a(3), out c(1)) c ^= (a != 9)", lambda v: {"c": 1})


def test_unary_and_shift_expressions():
    exhaust("module m(in a(3), out c(3)) c ^= ~a", lambda v: {"c": v["a"] ^ 7})
    exhaust("module m(in a(3), out c(3)) c ^= (a << 1)", lambda v: {"c": (v["a"] << 1) % 8})
    exhaust("module m(in a(3), out c(3)) c ^= (a >> 2)", lambda v: {"c": v["a"] >> 2})


def test_logical_operators():
    exhaust(
        "module m(in a(1), in b(1), out c(1), out d(1), out e(1)) c ^= (a && b); d ^= (a || b); e ^= !a",
        lambda v: {"c": v["a"] & v["b"], "d": v["a"] | v["b"], "e": 1 - v["a"]},
    )


def test_nested_expression():
    exhaust(
        "module m(in a(2), in b(2), inout c(2)) c += ((a & b) + (a ^ 3))",
        lambda v: {"c": (v["c"] + (v["a"] & v["b"]) + (v["a"] ^ 3)) % 4},
    )


def test_scratch_lines_are_reused():
    _, _, once = build("module m(in a(2), in b(2), inout c(2)) c ^= (a & b)")
    _, _, twice = build("module m(in a(2), in b(2), inout c(2)) c ^= (a & b); c ^= (a | b)")
    assert twice.num_lines == once.num_lines


# -- control flow ---------------------------------------------------------------------


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_if_else(strategy):
    src = "module m(in x(2), inout a(2), in b(2)) if (x = 2) then a += b else a -= b fi (x = 2)"
    exhaust(src, lambda v: {"a": (v["a"] + v["b"] if v["x"] == 2 else v["a"] - v["b"]) % 4}, strategy)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_conditional_adders(strategy):
    src = "module m(in e(1), inout a(2), in b(2), inout c(2), in d(2)) if e then a += b else c += d fi e"
    c = exhaust(
        src,
        lambda v: {"a": (v["a"] + v["b"]) % 4 if v["e"] else v["a"], "c": v["c"] if v["e"] else (v["c"] + v["d"]) % 4},
        strategy,
    )
    assert simulate(c, e=1, a=1, b=1, c=1, d=1)["c"] == 1


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_nested_if(strategy):
    src = """module m(in x(2), inout a(2))
    if (x < 2) then
      if (x = 0) then ++= a else --= a fi (x = 0)
    else
      ~= a
    fi (x < 2)"""
    f = lambda v: {"a": [(v["a"] + 1) % 4, (v["a"] - 1) % 4, v["a"] ^ 3, v["a"] ^ 3][v["x"]]}
    exhaust(src, f, strategy)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_branch_reading_condition_signal(strategy):
    src = "module m(in e(1), inout a(1)) if e then a ^= e else a ^= e fi e"
    exhaust(src, lambda v: {"a": v["a"] ^ v["e"]}, strategy)


def test_strategies_trade_lines_for_cost():
    lu = """module lu (in op(2), out x0(2), inout x1(2), inout x2(2))
    if (op = 0) then x0 ^= (x1 & x2) else
    if (op = 1) then x0 ^= (x1 | x2) else
    if (op = 2) then x0 ^= (x1 ^ x2) else x0 ^= x1; ~= x0
    fi (op = 2) fi (op = 1) fi (op = 0)"""
    costs = {s: circuit_cost(build(lu, s)[2]) for s in STRATEGIES}
    assert costs["duplication"].lines > costs["control"].lines
    assert costs["duplication"] != costs["control"]


def test_modified_condition_keeps_garbage(caplog):
    src = "module m(inout a(2)) if (a = 0) then ++= a else skip fi (a = 1)"
    with caplog.at_level(logging.WARNING, logger="syrec.synthesis"):
        c = exhaust(src, lambda v: {"a": 1 if v["a"] == 0 else v["a"]})
    assert "garbage" in caplog.text
    assert check_reversible(c)


def test_empty_branches_are_identity():
    _, _, c = build("module m(in x(2), inout a(2)) if (x = 1) then skip else skip fi (x = 1)")
    for x in range(4):
        assert simulate(c, x=x, a=2)["a"] == 2


def test_loops_unroll():
    exhaust("module m(inout a(4)) for $i = 1 to 10 step 2 do a += $i rof", lambda v: {"a": (v["a"] + 25) % 16})
    exhaust("module m(inout a(4)) for $i = 3 to 0 step -1 do ++= a rof", lambda v: {"a": (v["a"] + 4) % 16})
    exhaust("module m(inout a(4)) for $i = 1 to 0 do ++= a rof", lambda v: {"a": v["a"]})
    exhaust("module m(inout a(4)) for 3 do ++= a rof", lambda v: {"a": (v["a"] + 3) % 16})


def test_bitwise_loop():
    exhaust(
        "module m(inout x(4), in y(4)) for $i = 0 to (#x - 1) do x.$i ^= y.$i rof",
        lambda v: {"x": v["x"] ^ v["y"]},
    )


def test_zero_step_is_rejected():
    with pytest.raises(SynthesisError) as exc:
        build("module m(inout a(2)) for $i = 0 to 2 step 0 do skip rof")
    assert exc.value.kind == "ZeroStep"


# -- calls ----------------------------------------------------------------------------

ADDER = "module adder(in a(2), in b(2), inout c(2)) c += (a + b)\n"


def test_call_inlines_on_argument_lines():
    c = exhaust(ADDER + "module main(in x(2), in y(2), inout z(2)) call adder(x, y, z)",
                lambda v: {"z": (v["z"] + v["x"] + v["y"]) % 4})
    assert [line.name for line in c.lines[:6]] == ["x.0", "x.1", "y.0", "y.1", "z.0", "z.1"]


def test_uncall_inverts():
    exhaust(ADDER + "module main(in x(2), in y(2), inout z(2)) uncall adder(x, y, z)",
            lambda v: {"z": (v["z"] - v["x"] - v["y"]) % 4})
    exhaust("module inc(inout a(2), in b(2)) a += b\nmodule main(inout p(2), in q(2)) uncall inc(p, q)",
            lambda v: {"p": (v["p"] - v["q"]) % 4})


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_call_then_uncall_is_identity(strategy):
    pc = """module pc(in reset(1), in inc(1), in jump(2), inout pc(2)) wire zero(2)
    if (reset = 1) then pc <=> zero else
      if (inc = 1) then pc += 1 else pc <=> jump fi (inc = 1)
    fi (reset = 1)
    module main(in r(1), in i(1), in j(2), inout p(2)) call pc(r, i, j, p); uncall pc(r, i, j, p)"""
    exhaust(pc, lambda v: {"p": v["p"]}, strategy)


def test_uncall_inside_condition_replays_on_free_lines():
    src = ADDER + """module main(in x(2), in y(2), inout z(2), in e(1))
    call adder(x, y, z);
    if (e = 1) then uncall adder(x, y, z) else skip fi (e = 1)"""
    exhaust(src, lambda v: {"z": v["z"] if v["e"] else (v["z"] + v["x"] + v["y"]) % 4})


def test_callee_wires_get_prefixed_names():
    _, _, c = build("module f(inout a(1)) wire t(1) t ^= a; a ^= t\nmodule main(inout x(1)) call f(x)")
    assert "f/t" in [line.name for line in c.lines]


@pytest.mark.parametrize(
    "src, kind",
    [
        ("module f(inout a(1)) call f(a)", "RecursionDetected"),
        ("module f(inout a(1)) skip\nmodule main(inout x(1)) call f(x, x)", "ArityMismatch"),
        ("module f(inout a(2)) skip\nmodule main(inout x(1)) call f(x)", "WidthMismatch"),
        ("module main(inout x(1)) call g(x)", "UnknownModule"),
        ("module main(inout x(2)) state s(2) x ^= s", "SequentialUnsupported"),
        ("module main(inout x(2), in y(2)) x ^= (y / 1)", "DivisionUnsupported"),
        ("module main(inout x(2), in y(3)) x ^= y", "WidthMismatch"),
        ("module main(inout x(2)) if x then skip else skip fi x", "CondNotBoolean"),
    ],
)
def test_synthesis_errors(src, kind):
    with pytest.raises(SynthesisError) as exc:
        build(src)
    assert exc.value.kind == kind


def test_line_budget():
    with pytest.raises(SynthesisError) as exc:
        build("module m(in a(4), in b(4), out c(4)) c ^= (a * b)", max_lines=14)
    assert exc.value.kind == "AncillaOverflow"


# -- arrays and run-time indices -------------------------------------------------------


def test_static_array_access():
    exhaust(
        "module m(inout v[3](2)) v[0] += v[2]; for $i = 1 to 2 do ++= v[$i] rof",
        lambda x: {"v": [(x["v"][0] + x["v"][2]) % 4, (x["v"][1] + 1) % 4, (x["v"][2] + 1) % 4]},
    )


def test_dynamic_index_read_and_write():
    def oracle(v):
        arr, i = list(v["arr"]), v["i"]
        r = arr[i] if i < 3 else 0
        if i < 3:
            arr[i] = (arr[i] + 1) % 4
        return {"r": r, "arr": arr}

    exhaust("module m(in i(2), inout arr[3](2), out r(2)) r ^= arr[i]; ++= arr[i]", oracle)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_dynamic_loop_start(strategy):
    def oracle(v):
        x = v["x"]
        for k in range((v["s"] + 1) % 4, 4):
            x ^= 1 << k
        return {"x": x}

    exhaust("module m(in s(2), inout x(4)) for $k = (s + 1) to 3 do x.$k ^= 1 rof", oracle, strategy)

    def down(v):
        x = v["x"]
        for k in range(v["s"], -1, -1):
            x ^= 1 << k
        return {"x": x}

    exhaust("module m(in s(2), inout x(4)) for $k = s to 0 step -1 do x.$k ^= 1 rof", down, strategy)


# -- misc ----------------------------------------------------------------------------


def test_width_overrides_and_default():
    program = parse("module m(inout a, in b) a += b")
    c = synthesize("m", program, SynthOptions(default_width=3))
    assert c.num_lines == 7
    c = synthesize("m", program, SynthOptions(default_width=3, width_overrides={"a": 3, "b": 3}))
    assert c.num_lines == 7
    assert synthesize("m", program, SynthOptions(width_overrides={"a": 2, "b": 2})).num_lines == 5


def test_line_roles_and_names():
    _, _, c = build("module m(in a(2), out b(2), inout c(2)) wire w(1) b ^= (a + c); w ^= a.0")
    roles = {line.name: (line.role, line.constant, line.garbage) for line in c.lines}
    assert roles["a.0"] == ("in", None, True)
    assert roles["b.1"] == ("out", 0, False)
    assert roles["c.1"] == ("inout", None, False)
    assert roles["w"] == ("wire", 0, True)


def test_gates_are_annotated_with_source_lines():
    _, _, c = build("module m(inout a(2), in b(2))\n  a += b;\n  a ^= b")
    assert {pos[0] for pos in c.annotations.values()} == {2, 3}


def test_synthesis_matches_interpreter_on_random_program():
    src = """module m(in s(2), inout a(3), inout b(3))
      for $i = 0 to 1 do
        if ((a < b) && (s != $i)) then a += (b - 1) else b ^= (a | 2) fi ((a < b) && (s != $i))
      rof"""
    program, name, c = build(src)
    for s, a, b in itertools.product(range(4), range(8), range(8)):
        want = interpret(name, program, {"s": s, "a": a, "b": b})
        got = simulate(c, s=s, a=a, b=b)
        assert (got["a"], got["b"]) == (want["a"], want["b"])


@pytest.mark.parametrize(
    "src",
    [
        "module m(in a(2), in b(2), inout c(2)) c += ((a * b) - (a | b))",
        "module m(in a(2), in b(2), inout c(1)) c ^= ((a < b) || (a = 3))",
        "module m(in i(2), in v[3](2), inout c(2)) c ^= v[i]",
    ],
)
def test_clean_ancillas_return_to_constants(src):
    from syrec.simulator import free_lines, run

    _, _, c = build(src)
    free = free_lines(c)
    for x in range(2 ** len(free)):
        state = sum((x >> k & 1) << line for k, line in enumerate(free))
        state |= sum((line.constant or 0) << i for i, line in enumerate(c.lines))
        out = run(c, state)
        for i, line in enumerate(c.lines):
            if line.role == "ancilla" and not line.garbage:
                assert out >> i & 1 == line.constant


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("name", __import__("syrec.corpus", fromlist=["names"]).names())
def test_corpus_matches_interpreter(name, strategy):
    from syrec import corpus
    from syrec.semantics import resolve_main
    from syrec.verify import check_equivalence

    program = corpus.load(name)
    top = resolve_main(program).name
    opts = SynthOptions(cond_strategy=strategy)
    result = check_equivalence(synthesize(top, program, opts), top, program, opts, samples=300)
    assert result.ok, result.mismatches[:3]
