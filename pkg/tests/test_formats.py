import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import build
from syrec import corpus
from syrec.circuit import FREDKIN, TOFFOLI, Circuit, Control, CostReport, Gate, Line
from syrec.errors import RealFormatError
from syrec.formats import export_real, import_real, render_ascii, report_json, report_rows, truth_table_csv
from syrec.semantics import resolve_main
from syrec.synthesis import synthesize

ROLES = ("in", "out", "inout", "wire", "ancilla")


@st.composite
def circuits(draw):
    n = draw(st.integers(2, 6))
    lines = [Line.for_role(f"l{i}", draw(st.sampled_from(ROLES))) for i in range(n)]
    gates = []
    for _ in range(draw(st.integers(0, 12))):
        kind = draw(st.sampled_from((TOFFOLI, FREDKIN)))
        used = draw(st.permutations(range(n)))
        k = draw(st.integers(1 if kind == TOFFOLI else 2, n))
        picked = used[:k]
        nt = 1 if kind == TOFFOLI else 2
        controls = tuple(Control(line, draw(st.booleans())) for line in picked[:-nt])
        gates.append(Gate(kind, controls, tuple(picked[-nt:])))
    return Circuit(lines, gates)


@given(circuits())
@settings(max_examples=200)
def test_real_roundtrip_property(c):
    back = import_real(export_real(c))
    assert back.lines == c.lines
    assert back.gates == c.gates
    assert export_real(back) == export_real(c)


@pytest.mark.parametrize("name", corpus.names())
def test_real_roundtrip_corpus(name):
    program = corpus.load(name)
    c = synthesize(resolve_main(program).name, program)
    text = export_real(c)
    assert export_real(import_real(text)) == text


def test_minimal_documents():
    doc = ".version 2.0\n.numvars 2\n.variables a b\n.begin\nt1 a\nt2 a b\n.end\n"
    c = import_real(doc)
    assert c.gates == [Gate(TOFFOLI, (), (0,)), Gate(TOFFOLI, (Control(0),), (1,))]
    assert [line.role for line in c.lines] == ["inout", "inout"]
    empty = import_real(".version 2.0\n.numvars 1\n.variables a\n.begin\n.end\n")
    assert empty.gates == []


def test_negative_controls_and_fredkin():
    doc = ".numvars 3\n.variables a b c\n.begin\nf3 -a b c\n.end\n"
    c = import_real(doc)
    assert c.gates == [Gate(FREDKIN, (Control(0, False),), (1, 2))]
    assert "f3 -a b c" in export_real(c)


def test_roles_without_comment_follow_flags():
    doc = ".numvars 4\n.variables a b c d\n.constants --00\n.garbage 1--1\n.begin\n.end\n"
    assert [line.role for line in import_real(doc).lines] == ["in", "inout", "out", "ancilla"]


@pytest.mark.parametrize(
    "doc, lineno",
    [
        (".numvars 1\n.variables a\n.begin\nq1 a\n.end\n", 4),
        (".numvars 1\n.variables a\n.begin\nt1 z\n.end\n", 4),
        (".numvars 1\n.variables a\n.begin\nt2 a\n.end\n", 4),
        (".numvars 2\n.variables a\n.begin\n.end\n", 1),
        (".numvars 1\n.variables a\n.constants 2\n.begin\n.end\n", 3),
        (".numvars 1\n.variables a\n.begin\nt1 a\n", 5),
        (".numvars 2\n.variables a b\n.begin\nt2 a a\n.end\n", 4),
    ],
)
def test_malformed_real_reports_line(doc, lineno):
    with pytest.raises(RealFormatError) as exc:
        import_real(doc)
    assert exc.value.kind == "ParseError"
    assert f"line {lineno}" in str(exc.value)


def test_ascii_rows():
    c = Circuit(
        [Line("a", "in"), Line("b", "in"), Line("cc", "out", 0)],
        [Gate(TOFFOLI, (Control(0), Control(1, False)), (2,)), Gate(FREDKIN, (), (0, 2))],
    )
    assert render_ascii(c) == "a  ●×\nb  ○┼\ncc ⊕×\n"
    assert render_ascii(c) == render_ascii(c.copy())


def test_ascii_has_one_row_per_line():
    _, _, c = build("module m(inout a(2), in b(2)) a += b")
    rows = render_ascii(c).splitlines()
    assert len(rows) == c.num_lines
    assert {len(r) for r in rows} == {len(rows[0])}


def test_report_deltas_and_reference():
    costs = [("w2", CostReport(10, 14, 70)), ("w3", CostReport(13, 17, 121))]
    rows = report_rows(costs, [CostReport(10, 10, 70), None])
    assert rows[0]["delta_lines"] == 0 and rows[1]["delta_lines"] == 3
    assert rows[1]["delta_qc"] == 51
    assert rows[0]["ref_gates"] == 10 and "ref_gates" not in rows[1]
    assert json.loads(report_json(costs)) == report_rows(costs)
    with pytest.raises(ValueError):
        report_json([])


def test_truth_table_csv():
    _, _, c = build("module m(in a(1), in b(1), out c(1)) c ^= (a & b)")
    rows = truth_table_csv(c).splitlines()
    assert rows[0] == "a,b,a',b',c',const_0'"
    # first column is the most significant; the scratch line returns to 0
    assert rows[1:] == ["0,0,0,0,0,0", "0,1,0,1,0,0", "1,0,1,0,0,0", "1,1,1,1,1,0"]


def _canonical(c):
    # control order and Fredkin target order do not change a gate
    return [(g.kind, frozenset(g.controls), frozenset(g.targets)) for g in c.gates]


@given(circuits(), circuits())
@settings(max_examples=100)
def test_ascii_distinguishes_gate_lists(c1, c2):
    if [line.name for line in c1.lines] == [line.name for line in c2.lines] and _canonical(c1) != _canonical(c2):
        assert render_ascii(c1) != render_ascii(c2)
