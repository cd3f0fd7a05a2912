import json

import pytest

from syrec.cli import main
from syrec.formats import import_real

AND = "module m(in a(1), in b(1), out c(1)) c ^= (a & b)\n"
ADD = "module m(inout a, in b) a += b\n"


@pytest.fixture
def src(tmp_path):
    def write(text, name="prog.src"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def test_parse_ok_and_pretty(src, capsys):
    assert main(["parse", src(AND)]) == 0
    assert "module m(in a, in b, out c)" in capsys.readouterr().out
    assert main(["parse", "--pretty", src(AND)]) == 0
    assert capsys.readouterr().out.startswith("module m")


def test_parse_empty_file_fails(src, capsys):
    assert main(["parse", src("")]) == 1
    assert "SyntaxError" in capsys.readouterr().err


def test_semantic_error_exits_1(src, capsys):
    assert main(["parse", src("module m(inout a(1), in b(2)) a ^= b")]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_file_exits_1(capsys):
    assert main(["synth", "/nonexistent/x.src"]) == 1


def test_usage_errors_exit_2(src):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["synth", src(AND), "--cond-strategy", "magic"])
    assert exc.value.code == 2


def test_sim_all_csv(src, capsys):
    assert main(["sim", src(AND), "--all"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    assert [row.split(",")[4] for row in lines[1:]] == ["0", "0", "0", "1"]


def test_sim_single_vector(src, capsys):
    assert main(["sim", src(AND), "--input", "a=1", "--input", "b=1"]) == 0
    assert capsys.readouterr().out.split() == ["a=1", "b=1", "c=1"]


def test_sim_unknown_signal(src):
    with pytest.raises(SystemExit):
        main(["sim", src(AND), "--input", "zz=1"])


def test_width_default_and_override(src, capsys, monkeypatch):
    assert main(["cost", src(ADD), "--width-default", "3"]) == 0
    assert capsys.readouterr().out.startswith("lines=7 ")
    assert main(["cost", src(ADD), "--override", "a=2", "--override", "b=2"]) == 0
    assert capsys.readouterr().out.startswith("lines=5 ")
    monkeypatch.setenv("SYREC_DEFAULT_WIDTH", "4")
    assert main(["cost", src(ADD)]) == 0
    assert capsys.readouterr().out.startswith("lines=9 ")


def test_synth_writes_real_and_ascii(src, tmp_path, capsys):
    out = tmp_path / "c.real"
    assert main(["synth", src(AND), "-o", str(out)]) == 0
    c = import_real(out.read_text())
    assert c.num_lines == 4
    assert "⊕" in capsys.readouterr().out


def test_synth_is_deterministic(src, capsys):
    path = src(ADD)
    main(["synth", path, "--width-default", "4"])
    first = capsys.readouterr().out
    main(["synth", path, "--width-default", "4"])
    assert capsys.readouterr().out == first


def test_cost_json(src, capsys):
    assert main(["cost", src(AND), "--format", "json"]) == 0
    (row,) = json.loads(capsys.readouterr().out)
    assert (row["lines"], row["gates"], row["quantum_cost"]) == (4, 3, 11)


def test_expand_template_reports_reference(capsys):
    assert main(["expand", "--template", "program_counter", "2", "3", "4"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["lines"] for r in rows] == [10, 13, 16]
    assert [r["ref_lines"] for r in rows] == [10, 13, 16]
    assert rows[1]["delta_lines"] == rows[2]["delta_lines"] == 3


def test_expand_file_scales_unsized_signals(src, capsys):
    assert main(["expand", "--file", src(ADD), "2", "3"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["lines"] for r in rows] == [5, 7]


def test_export_roundtrip(src, tmp_path, capsys):
    real = tmp_path / "c.real"
    assert main(["export", src(AND), "-o", str(real)]) == 0
    assert main(["export", str(real), "--format", "csv"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 5
    assert main(["sim", str(real), "--all"]) == 0


def test_bad_real_file_exits_1(src, capsys):
    assert main(["export", src(".begin\nt1 q\n.end\n", "bad.real")]) == 1
    assert "line" in capsys.readouterr().err


def test_template_command(capsys):
    assert main(["template", "elevator", "2"]) == 0
    assert "module elevator" in capsys.readouterr().out
    assert main(["template", "elevator", "1"]) == 1


def test_module_selection(src, capsys):
    text = "module f(inout x(2)) ++= x\nmodule g(inout y(2)) --= y\n"
    assert main(["cost", src(text), "--module", "f"]) == 0
    assert main(["cost", src(text), "--module", "nope"]) == 1


@pytest.mark.parametrize("name", ["program_counter", "au", "lu", "elevator"])
@pytest.mark.parametrize("strategy", ["control", "duplication"])
def test_expand_templates_pass_equivalence_gate(name, strategy, capsys):
    assert main(["expand", "--template", name, "--cond-strategy", strategy, "2", "3", "4"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["label"] for r in rows] == [f"{name}@{p}" for p in (2, 3, 4)]
