"""Text formats: RevLib ``.real`` files, ASCII schematics, JSON and CSV reports."""

from __future__ import annotations

import csv
import io
import json
from typing import List, Optional, Sequence, Tuple

from .circuit import FREDKIN, TOFFOLI, Circuit, CostReport, Control, Gate, Line
from .errors import RealFormatError
from .simulator import DEFAULT_MAX_LINES, truth_table

# -- .real ------------------------------------------------------------------------


def export_real(c: Circuit) -> str:
    """Serialize ``c`` as a ``.real`` (version 2.0) document.

    Line roles have no ``.real`` directive, so they travel in a ``# roles:``
    comment that :func:`import_real` understands.
    """
    names = [line.name for line in c.lines]
    out = [
        ".version 2.0",
        f".numvars {len(names)}",
        ".variables " + " ".join(names),
        ".inputs " + " ".join(names),
        ".outputs " + " ".join(names),
        ".constants " + "".join("-" if line.constant is None else str(line.constant) for line in c.lines),
        ".garbage " + "".join("1" if line.garbage else "-" for line in c.lines),
        "# roles: " + " ".join(line.role for line in c.lines),
        ".begin",
    ]
    for g in c.gates:
        ctrls = [("" if ctl.positive else "-") + names[ctl.line] for ctl in g.controls]
        tag = "t" if g.kind == TOFFOLI else "f"
        out.append(f"{tag}{g.size} " + " ".join(ctrls + [names[t] for t in g.targets]))
    out.append(".end")
    return "\n".join(out) + "\n"


def _fail(msg: str, lineno: int) -> RealFormatError:
    return RealFormatError(f"line {lineno}: {msg}", (lineno, 1))


def import_real(text: str) -> Circuit:
    """Parse a ``.real`` document produced by :func:`export_real` or RevLib.

    Raises:
        RealFormatError: on malformed input; the message carries the line number.
    """
    header = {}
    roles: Optional[List[str]] = None
    gates_text: List[Tuple[int, str]] = []
    in_body = done = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("# roles:"):
            roles = line[len("# roles:") :].split()
            continue
        if not line or line.startswith("#"):
            continue
        if done:
            raise _fail("text after .end", lineno)
        if line == ".begin":
            in_body = True
        elif line == ".end":
            if not in_body:
                raise _fail(".end without .begin", lineno)
            done = True
        elif in_body:
            gates_text.append((lineno, line))
        elif line.startswith("."):
            key, _, value = line.partition(" ")
            header[key] = (lineno, value.strip())
        else:
            raise _fail(f"unexpected text {line!r}", lineno)
    if not done:
        raise _fail("missing .end", len(text.splitlines()) + 1)
    if ".variables" not in header:
        raise _fail("missing .variables", 1)
    names = header[".variables"][1].split()
    n = len(names)
    if ".numvars" in header:
        lineno, value = header[".numvars"]
        if not value.isdigit() or int(value) != n:
            raise _fail(f".numvars {value} does not match {n} variables", lineno)
    constants = _flags(header, ".constants", n, "-01")
    garbage = _flags(header, ".garbage", n, "-1")
    if roles is not None and len(roles) != n:
        raise _fail("roles comment does not match the variables", 1)
    lines = []
    for i, name in enumerate(names):
        const = None if constants[i] == "-" else int(constants[i])
        junk = garbage[i] == "1"
        if roles is not None:
            role = roles[i]
        elif const is None:
            role = "in" if junk else "inout"
        else:
            role = "ancilla" if junk else "out"
        lines.append(Line(name, role, const, junk))
    index = {name: i for i, name in enumerate(names)}
    gates = [_gate(line, lineno, index) for lineno, line in gates_text]
    return Circuit(lines, gates)


def _flags(header, key: str, n: int, alphabet: str) -> str:
    if key not in header:
        return "-" * n
    lineno, value = header[key]
    if len(value) != n or any(ch not in alphabet for ch in value):
        raise _fail(f"{key} must have one of {alphabet!r} per variable", lineno)
    return value


def _gate(line: str, lineno: int, index) -> Gate:
    mnemonic, *operands = line.split()
    kind = {"t": TOFFOLI, "f": FREDKIN}.get(mnemonic[:1])
    if kind is None or not mnemonic[1:].isdigit():
        raise _fail(f"unknown gate {mnemonic!r}", lineno)
    if int(mnemonic[1:]) != len(operands):
        raise _fail(f"{mnemonic} expects {mnemonic[1:]} operands, got {len(operands)}", lineno)
    ntargets = 1 if kind == TOFFOLI else 2
    if len(operands) < ntargets:
        raise _fail(f"{mnemonic} needs {ntargets} target(s)", lineno)

    def lookup(name: str) -> int:
        if name not in index:
            raise _fail(f"unknown variable {name!r}", lineno)
        return index[name]

    controls = []
    for op in operands[:-ntargets]:
        positive = not op.startswith("-")
        controls.append(Control(lookup(op.lstrip("-")), positive))
    try:
        return Gate(kind, tuple(controls), tuple(lookup(op) for op in operands[-ntargets:]))
    except ValueError as exc:
        raise _fail(str(exc), lineno) from None


# -- ASCII schematic --------------------------------------------------------------

WIRE, POS, NEG, XOR, SWAP, CROSS = "-", "●", "○", "⊕", "×", "┼"


def render_ascii(c: Circuit) -> str:
    """One row per line, one column per gate; deterministic."""
    width = max((len(line.name) for line in c.lines), default=0)
    rows = [[WIRE] * len(c.gates) for _ in c.lines]
    for col, g in enumerate(c.gates):
        span = g.lines
        for r in range(min(span), max(span) + 1):
            rows[r][col] = CROSS
        for ctl in g.controls:
            rows[ctl.line][col] = POS if ctl.positive else NEG
        for t in g.targets:
            rows[t][col] = XOR if g.kind == TOFFOLI else SWAP
    return "\n".join(f"{line.name.ljust(width)} {''.join(row)}" for line, row in zip(c.lines, rows)) + "\n"


# -- reports ------------------------------------------------------------------------


def report_rows(costs: Sequence[Tuple[str, CostReport]], reference: Optional[Sequence[Optional[CostReport]]] = None):
    """Cost rows with deltas against the previous row (zero for the first)."""
    rows = []
    prev = None
    for k, (label, cost) in enumerate(costs):
        row = {
            "label": label,
            "lines": cost.lines,
            "gates": cost.gates,
            "quantum_cost": cost.quantum_cost,
            "delta_lines": cost.lines - prev.lines if prev else 0,
            "delta_gates": cost.gates - prev.gates if prev else 0,
            "delta_qc": cost.quantum_cost - prev.quantum_cost if prev else 0,
        }
        ref = reference[k] if reference is not None else None
        if ref is not None:
            row.update(ref_lines=ref.lines, ref_gates=ref.gates, ref_quantum_cost=ref.quantum_cost)
        rows.append(row)
        prev = cost
    return rows


def report_json(costs: Sequence[Tuple[str, CostReport]], reference=None) -> str:
    """JSON list of :func:`report_rows`; ``reference`` adds published values side by side."""
    if not costs:
        raise ValueError("report needs at least one entry")
    return json.dumps(report_rows(costs, reference), indent=2) + "\n"


def truth_table_csv(c: Circuit, max_lines: int = DEFAULT_MAX_LINES) -> str:
    """CSV truth table: free input lines, then every output line (primed)."""
    free = [line.name for line in c.lines if not line.is_constant]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(free + [line.name + "'" for line in c.lines])
    for ins, outs in truth_table(c, max_lines):
        writer.writerow(list(ins) + list(outs))
    return buf.getvalue()
