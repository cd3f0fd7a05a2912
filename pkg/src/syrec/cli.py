"""Command-line driver: ``syrec <command> ...``.

Exit status is 0 on success, 1 when diagnostics were reported and 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import formats
from .circuit import circuit_cost
from .errors import SyrecError
from .interpreter import interpret
from .nodes import Program
from .parser import parse
from .printer import format_program
from .semantics import DEFAULT_WIDTH, check, errors_only, resolve_main
from .simulator import run
from .synthesis import COND_STRATEGIES, SynthOptions, synthesize
from .templates import REFERENCE_COSTS, TEMPLATES, generate_template
from .verify import check_equivalence, decode, encode

ELEVATOR_NOTE = (
    "The elevator template clears 'dir' when moving down (the published "
    "listings set it in both directions) and omits the non-reversible "
    "request resets."
)


class _Failure(Exception):
    """Diagnostics were printed; exit with status 1."""


def _default_width() -> int:
    env = os.environ.get("SYREC_DEFAULT_WIDTH")
    if env is None:
        return DEFAULT_WIDTH
    if not env.isdigit() or int(env) < 1:
        raise SystemExit(f"syrec: SYREC_DEFAULT_WIDTH must be a positive integer, got {env!r}")
    return int(env)


def _override(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name or not value.isdigit() or int(value) < 1:
        raise argparse.ArgumentTypeError(f"expected sig=N with N >= 1, got {text!r}")
    return name, int(value)


def _options(args) -> SynthOptions:
    return SynthOptions(
        cond_strategy=args.cond_strategy,
        default_width=args.width_default,
        width_overrides=dict(args.override or ()),
    )


def _report(err: SyrecError, filename: str) -> None:
    where = f"{err.pos[0]}:{err.pos[1]}:" if err.pos else ""
    print(f"{filename}:{where} error: {err.message} [{err.kind}]", file=sys.stderr)


def _load_source(text: str, filename: str, width: int) -> Program:
    try:
        program = parse(text)
    except SyrecError as err:
        _report(err, filename)
        raise _Failure from None
    diags = check(program, width)
    for d in diags:
        print(d.format(filename), file=sys.stderr)
    if errors_only(diags):
        raise _Failure
    return program


def _load(path: str, width: int) -> Program:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"syrec: cannot read {path}: {exc.strerror}", file=sys.stderr)
        raise _Failure from None
    return _load_source(text, path, width)


def _module_name(program: Program, args) -> str:
    if args.module:
        if program.module(args.module) is None:
            print(f"syrec: no module named {args.module!r}", file=sys.stderr)
            raise _Failure
        return args.module
    return resolve_main(program).name


def _synth(program: Program, args):
    name = _module_name(program, args)
    opts = _options(args)
    return name, opts, synthesize(name, program, opts)


# -- commands --------------------------------------------------------------------


def cmd_parse(args) -> None:
    program = _load(args.file, args.width_default)
    if args.pretty:
        sys.stdout.write(format_program(program))
        return
    for m in program.modules:
        params = ", ".join(f"{d.modifier} {d.name}" for d in m.params)
        print(f"module {m.name}({params}): {len(m.locals)} local(s), {len(m.body)} statement(s)")


def cmd_synth(args) -> None:
    program = _load(args.file, args.width_default)
    _, _, c = _synth(program, args)
    if args.output:
        Path(args.output).write_text(formats.export_real(c), encoding="utf-8")
        sys.stdout.write(formats.render_ascii(c))
        return
    _emit(c, args.format)


def _emit(c, fmt: str) -> None:
    if fmt == "real":
        sys.stdout.write(formats.export_real(c))
    elif fmt == "ascii":
        sys.stdout.write(formats.render_ascii(c))
    elif fmt == "json":
        sys.stdout.write(formats.report_json([("circuit", circuit_cost(c))]))
    else:
        sys.stdout.write(formats.truth_table_csv(c))


def _parse_inputs(pairs: List[str]) -> Dict[str, object]:
    values: Dict[str, object] = {}
    for pair in pairs:
        name, sep, text = pair.partition("=")
        try:
            if not sep:
                raise ValueError
            parts = [int(v, 0) for v in text.split(",")]
        except ValueError:
            raise SystemExit(f"syrec: expected sig=value or sig=v0,v1,..., got {pair!r}") from None
        values[name] = parts if len(parts) > 1 else parts[0]
    return values


def cmd_sim(args) -> None:
    if args.file.endswith(".real"):
        c = formats.import_real(Path(args.file).read_text(encoding="utf-8"))
        if not args.all:
            raise SystemExit("syrec: .real files can only be simulated with --all")
        sys.stdout.write(formats.truth_table_csv(c, args.max_lines))
        return
    program = _load(args.file, args.width_default)
    name, opts, c = _synth(program, args)
    if args.all:
        sys.stdout.write(formats.truth_table_csv(c, args.max_lines))
        return
    inputs = _parse_inputs(args.input or [])
    unknown = set(inputs) - set(c.signals)
    if unknown:
        raise SystemExit(f"syrec: unknown signal(s): {', '.join(sorted(unknown))}")
    out = run(c, encode(c, inputs))
    top = program.module(name)
    expected = interpret(name, program, inputs, opts.default_width, opts.width_overrides)
    for d in top.params:
        got = decode(c, out, d.name)
        print(f"{d.name}={','.join(map(str, got))}")
        if (got if d.dims else got[0]) != expected[d.name] and d.modifier != "in":
            print(f"syrec: {d.name} differs from the interpreter ({expected[d.name]})", file=sys.stderr)
            raise _Failure


def cmd_cost(args) -> None:
    program = _load(args.file, args.width_default)
    _, _, c = _synth(program, args)
    cost = circuit_cost(c)
    if args.format == "json":
        sys.stdout.write(formats.report_json([(args.file, cost)]))
    else:
        print(f"lines={cost.lines} gates={cost.gates} quantum_cost={cost.quantum_cost}")


def cmd_expand(args) -> None:
    rows, refs, failed = [], [], False
    for param in args.params:
        if args.template:
            program = _load_source(generate_template(args.template, param), f"<{args.template}>", args.width_default)
            overrides = dict(args.override or ())
            label, ref = f"{args.template}@{param}", REFERENCE_COSTS.get((args.template, param))
        else:
            program = _load(args.file, args.width_default)
            top = program.module(_module_name(program, args))
            scaled = args.scale or [d.name for d in top.signals if d.width is None]
            overrides = {**dict(args.override or ()), **{s: param for s in scaled}}
            label, ref = f"{Path(args.file).stem}@{param}", None
        name = _module_name(program, args) if not args.template else resolve_main(program).name
        opts = SynthOptions(args.cond_strategy, args.width_default, overrides)
        c = synthesize(name, program, opts)
        result = check_equivalence(c, name, program, opts, limit=min(args.max_lines, 14))
        if not result.ok:
            vec, sig, got, want = result.mismatches[0]
            print(f"syrec: {label}: {sig} is {got}, interpreter gives {want} for {vec}", file=sys.stderr)
            failed = True
        rows.append((label, circuit_cost(c)))
        refs.append(ref)
    sys.stdout.write(formats.report_json(rows, refs if any(refs) else None))
    if failed:
        raise _Failure


def cmd_export(args) -> None:
    if args.file.endswith(".real"):
        c = formats.import_real(Path(args.file).read_text(encoding="utf-8"))
    else:
        program = _load(args.file, args.width_default)
        _, _, c = _synth(program, args)
    text = {
        "real": formats.export_real,
        "ascii": formats.render_ascii,
        "json": lambda c: formats.report_json([(Path(args.file).stem, circuit_cost(c))]),
        "csv": lambda c: formats.truth_table_csv(c, args.max_lines),
    }[args.format](c)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_template(args) -> None:
    sys.stdout.write(generate_template(args.name, args.param))


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syrec", description="SyReC parser, synthesizer and simulator.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log synthesis warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--width-default", type=int, default=_default_width(), metavar="N")
    common.add_argument("--override", type=_override, action="append", metavar="SIG=N")
    common.add_argument("--cond-strategy", choices=COND_STRATEGIES, default="control")
    common.add_argument("--max-lines", type=int, default=24, metavar="N", help="cap for exhaustive checks")
    common.add_argument("--module", help="module to synthesize (default: main or the last one)")

    p = sub.add_parser("parse", parents=[common], help="parse and check a program")
    p.add_argument("file")
    p.add_argument("--pretty", action="store_true", help="print the normalised source")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("synth", parents=[common], help="synthesize a circuit")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="write .real here and print the schematic")
    p.add_argument("--format", choices=("real", "ascii", "json", "csv"), default="real")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sim", parents=[common], help="simulate one input vector or the full truth table")
    p.add_argument("file")
    p.add_argument("--input", action="append", metavar="SIG=V", help="input value; arrays as v0,v1,...")
    p.add_argument("--all", action="store_true", help="dump the truth table as CSV")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("cost", parents=[common], help="print lines, gates and quantum cost")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser(
        "expand",
        parents=[common],
        help="synthesize at several sizes and report cost growth",
        description="Re-synthesize at each parameter, verify against the interpreter and report costs. "
        + ELEVATOR_NOTE,
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--template", choices=TEMPLATES)
    src.add_argument("--file")
    p.add_argument("--scale", action="append", metavar="SIG", help="signals whose width follows the parameter")
    p.add_argument("params", type=int, nargs="+")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("export", parents=[common], help="convert between formats")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("real", "ascii", "json", "csv"), default="real")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("template", help="print a parameterised example program", description=ELEVATOR_NOTE)
    p.add_argument("name", choices=TEMPLATES)
    p.add_argument("param", type=int)
    p.set_defaults(func=cmd_template)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="syrec: %(message)s")
    try:
        args.func(args)
    except _Failure:
        return 1
    except SyrecError as err:
        _report(err, getattr(args, "file", None) or "<input>")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
