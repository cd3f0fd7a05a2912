"""SyReC toolchain: parse, check, synthesize, simulate and verify reversible circuits."""

from .circuit import Circuit, CostReport, Gate, Line, circuit_cost, fredkin, gate_quantum_cost, reverse, toffoli
from .errors import Diagnostic, SyrecError
from .formats import export_real, import_real, render_ascii, report_json, truth_table_csv
from .interpreter import interpret
from .parser import parse
from .printer import format_program
from .semantics import check
from .simulator import check_reversible, run, truth_table
from .synthesis import SynthOptions, synthesize
from .templates import generate_template

__all__ = [
    "Circuit",
    "CostReport",
    "Diagnostic",
    "Gate",
    "Line",
    "SynthOptions",
    "SyrecError",
    "check",
    "check_reversible",
    "circuit_cost",
    "export_real",
    "format_program",
    "fredkin",
    "gate_quantum_cost",
    "generate_template",
    "import_real",
    "interpret",
    "parse",
    "render_ascii",
    "report_json",
    "reverse",
    "run",
    "synthesize",
    "toffoli",
    "truth_table",
    "truth_table_csv",
]
