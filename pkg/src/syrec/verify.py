"""Equivalence checking of synthesized circuits against the interpreter."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .circuit import Circuit
from .interpreter import interpret
from .nodes import Program, with_widths
from .simulator import run_batch, run_raw
from .synthesis import SynthOptions

EXHAUSTIVE_LIMIT = 14
RANDOM_VECTORS = 1000


@dataclass
class VerifyResult:
    checked: int
    exhaustive: bool
    mismatches: List[Tuple[Dict, str, object, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def encode(c: Circuit, values: Dict[str, object]) -> int:
    """Circuit input state for signal values (lists for arrays)."""
    state = 0
    for name, value in values.items():
        elems = c.signals[name]
        vals = value if isinstance(value, list) else [value]
        for lines, v in zip(elems, vals):
            for k, line in enumerate(lines):
                state |= (v >> k & 1) << line
    return state


def decode(c: Circuit, state: int, name: str) -> List[int]:
    """Per-element values of signal ``name`` in ``state``."""
    return [sum((state >> line & 1) << k for k, line in enumerate(lines)) for lines in c.signals[name]]


def _input_vectors(decls, limit: int, samples: int, seed: int) -> Tuple[Iterator[Dict], bool]:
    slots = []  # (name, element count, width)
    for d in decls:
        count = 1
        for n in d.dims:
            count *= n
        slots.append((d.name, count, d.width, bool(d.dims)))
    bits = sum(count * width for _, count, width, _ in slots)
    exhaustive = bits <= limit

    def split(x: int) -> Dict:
        out = {}
        for name, count, width, is_array in slots:
            vals = []
            for _ in range(count):
                vals.append(x & ((1 << width) - 1))
                x >>= width
            out[name] = vals if is_array else vals[0]
        return out

    if exhaustive:
        return (split(x) for x in range(2**bits)), True
    rng = random.Random(seed)
    return (split(rng.getrandbits(bits)) for _ in range(samples)), False


def check_equivalence(
    c: Circuit,
    module: str,
    program: Program,
    options: Optional[SynthOptions] = None,
    limit: int = EXHAUSTIVE_LIMIT,
    samples: int = RANDOM_VECTORS,
    seed: int = 0,
) -> VerifyResult:
    """Compare simulation of ``c`` with the interpreter on ``out``/``inout`` signals.

    Inputs are enumerated exhaustively when they span at most ``limit``
    bits, otherwise ``samples`` random vectors are drawn.
    """
    options = options or SynthOptions()
    top = with_widths(program, options.default_width, options.width_overrides, module=module).module(module)
    inputs = [d for d in top.params if d.modifier in ("in", "inout")]
    observed = [d for d in top.params if d.modifier in ("out", "inout")]
    vectors, exhaustive = _input_vectors(inputs, limit, samples, seed)
    vectors = list(vectors)
    states = [encode(c, v) for v in vectors]
    if c.num_lines <= 64:
        outs = run_batch(c, np.array(states, dtype=np.uint64)).tolist()
    else:
        outs = [run_raw(c, s) for s in states]
    result = VerifyResult(len(vectors), exhaustive)
    for vec, out in zip(vectors, outs):
        expected = interpret(module, program, vec, options.default_width, options.width_overrides)
        for d in observed:
            got = decode(c, out, d.name)
            got = got if d.dims else got[0]
            if got != expected[d.name]:
                result.mismatches.append((vec, d.name, got, expected[d.name]))
    return result
