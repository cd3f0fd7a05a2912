"""Small utilities shared by the test modules."""

from syrec.parser import parse
from syrec.semantics import resolve_main
from syrec.simulator import run
from syrec.synthesis import SynthOptions, synthesize
from syrec.verify import decode, encode


def build(src, strategy="control", **opts):
    """Parse ``src`` and synthesize its top module; returns (program, name, circuit)."""
    program = parse(src)
    name = resolve_main(program).name
    options = SynthOptions(cond_strategy=strategy, **opts)
    return program, name, synthesize(name, program, options)


def simulate(circuit, **inputs):
    """Run ``circuit`` on signal values and return every signal's final value."""
    out = run(circuit, encode(circuit, inputs))
    values = {}
    for name in circuit.signals:
        vals = decode(circuit, out, name)
        values[name] = vals[0] if len(vals) == 1 and "[" not in circuit_line_name(circuit, name) else vals
    return values


def circuit_line_name(circuit, name):
    return circuit.lines[circuit.signals[name][0][0]].name


# One "criterion N: PASS/FAIL ..." line per acceptance criterion, echoed by conftest.
ACCEPTANCE = []


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line
