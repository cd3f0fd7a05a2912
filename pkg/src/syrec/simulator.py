"""Bit-level evaluation of circuits, truth tables and reversibility checks.

A state is an ``int`` whose bit ``i`` holds the value of line ``i``.  Batch
routines evaluate many states at once on numpy ``uint64`` arrays.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .circuit import TOFFOLI, Circuit, Gate
from .errors import SimulationError

DEFAULT_MAX_LINES = 20


def _masks(g: Gate) -> Tuple[int, int]:
    pos = neg = 0
    for c in g.controls:
        if c.positive:
            pos |= 1 << c.line
        else:
            neg |= 1 << c.line
    return pos, neg


def step(g: Gate, state: int) -> int:
    pos, neg = _masks(g)
    if state & pos != pos or state & neg:
        return state
    if g.kind == TOFFOLI:
        return state ^ (1 << g.targets[0])
    a, b = g.targets
    if (state >> a ^ state >> b) & 1:
        state ^= (1 << a) | (1 << b)
    return state


def run_raw(c: Circuit, state: int) -> int:
    for g in c.gates:
        state = step(g, state)
    return state


def run(c: Circuit, inputs: int) -> int:
    """Apply the cascade to ``inputs``; constant lines must hold their value."""
    for i, line in enumerate(c.lines):
        if line.is_constant and (inputs >> i & 1) != line.constant:
            raise SimulationError(f"constant line {line.name} supplied {inputs >> i & 1}", kind="ConstantViolated")
    return run_raw(c, inputs)


def bits_to_state(bits: Sequence[int]) -> int:
    return sum((b & 1) << i for i, b in enumerate(bits))


def state_to_bits(state: int, n: int) -> List[int]:
    return [state >> i & 1 for i in range(n)]


def run_batch(c: Circuit, states: np.ndarray) -> np.ndarray:
    """Vectorised :func:`run_raw` over an array of states (<= 64 lines)."""
    if c.num_lines > 64:
        raise SimulationError("batch simulation supports at most 64 lines", kind="TooManyLines")
    s = np.array(states, dtype=np.uint64, copy=True)
    one = np.uint64(1)
    for g in c.gates:
        pos, neg = (np.uint64(m) for m in _masks(g))
        fire = ((s & pos) == pos) & ((s & neg) == 0)
        if g.kind == TOFFOLI:
            s ^= fire.astype(np.uint64) << np.uint64(g.targets[0])
        else:
            a, b = (np.uint64(t) for t in g.targets)
            differ = ((s >> a) ^ (s >> b)) & one
            flip = (fire.astype(np.uint64) & differ)
            s ^= (flip << a) | (flip << b)
    return s


def free_lines(c: Circuit) -> List[int]:
    return [i for i, line in enumerate(c.lines) if not line.is_constant]


def input_states(c: Circuit, max_lines: int = DEFAULT_MAX_LINES) -> np.ndarray:
    """Every legal input state, in ascending order of the free-line bits.

    The first free line is the most significant bit of the row counter.
    """
    free = free_lines(c)
    if len(free) > max_lines:
        raise SimulationError(f"{len(free)} free lines exceed the cap of {max_lines}", kind="TooManyLines")
    base = sum(line.constant << i for i, line in enumerate(c.lines) if line.is_constant)
    rows = np.arange(2 ** len(free), dtype=np.uint64)
    states = np.full(rows.shape, base, dtype=np.uint64)
    for k, line in enumerate(free):
        bit = (rows >> np.uint64(len(free) - 1 - k)) & np.uint64(1)
        states |= bit << np.uint64(line)
    return states


def truth_table(c: Circuit, max_lines: int = DEFAULT_MAX_LINES) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Rows of (free-line input bits, all-line output bits), line order as declared."""
    free = free_lines(c)
    ins = input_states(c, max_lines)
    outs = run_batch(c, ins)
    table = []
    for i, o in zip(ins.tolist(), outs.tolist()):
        table.append((tuple(i >> k & 1 for k in free), tuple(o >> k & 1 for k in range(c.num_lines))))
    return table


def check_reversible(c: Circuit, max_lines: int = DEFAULT_MAX_LINES) -> bool:
    """Exhaustively verify that the full state map is injective."""
    n = c.num_lines
    if n > max_lines:
        raise SimulationError(f"{n} lines exceed the cap of {max_lines}", kind="TooManyLines")
    outs = run_batch(c, np.arange(2**n, dtype=np.uint64))
    return is_injective(outs)


def is_injective(outputs: Iterable[int]) -> bool:
    arr = np.asarray(list(outputs) if not isinstance(outputs, np.ndarray) else outputs)
    return len(np.unique(arr)) == len(arr)
