"""Parameterised example circuits used for bit-width expansion.

``generate_template(name, param)`` instantiates one of four programs:
``program_counter``, ``au`` and ``lu`` take a bit width, ``elevator`` takes
a floor count ``n >= 2``.

The elevator controller clears ``dir`` (``dir ^= 0``) when travelling down
instead of setting it; with ``0`` meaning "down" this is the only reading
under which the output agrees with the intended behaviour.  The request
resets of the small listings are left out because assigning a constant is
not a reversible statement.
"""

from __future__ import annotations

import math
from typing import Dict, Tuple

from .circuit import CostReport
from .errors import SyrecError

TEMPLATES = ("program_counter", "au", "lu", "elevator")

# Published (lines, gates, quantum cost) for each template and parameter.
REFERENCE_COSTS: Dict[Tuple[str, int], CostReport] = {
    ("program_counter", 2): CostReport(10, 10, 70),
    ("program_counter", 3): CostReport(13, 13, 121),
    ("program_counter", 4): CostReport(16, 16, 204),
    ("program_counter", 5): CostReport(19, 19, 351),
    ("lu", 2): CostReport(23, 52, 588),
    ("lu", 3): CostReport(29, 63, 803),
    ("lu", 4): CostReport(35, 74, 1018),
    ("lu", 5): CostReport(41, 85, 1233),
    ("elevator", 2): CostReport(36, 55, 543),
    ("elevator", 4): CostReport(71, 185, 3365),
}


class ParamOutOfRange(SyrecError):
    kind = "ParamOutOfRange"


_PROGRAM_COUNTER = """\
module program_counter (in reset(1), in inc(1), in jump({w}), inout pc({w})) wire zero({w})
if (reset = 1) then
    pc <=> zero
else
    if (inc = 1) then
        pc += 1
    else
        pc <=> jump
    fi (inc = 1)
fi (reset = 1)
"""

_AU = """\
module au (in op(2), in a({w}), in b({w}), out c({w}))
if ( op = 0 ) then
    c ^ = ( a + b )
else
    if ( op = 1 ) then
        c ^ = ( a - b )
    else
        if ( op = 2 ) then
            c ^ = ( a * b )
        else
            c ^ = a
        fi ( op = 2 )
    fi ( op = 1 )
fi ( op = 0 )
"""

_LU = """\
module lu (in op(2), out x0({w}), inout x1({w}), inout x2({w}))
if (op = 0) then
  x0 ^ = (x1&x2)
else
  if (op = 1) then
    x0 ^ = (x1 | x2)
  else
    if (op = 2) then
      x0 ^ = (x1 ^ x2)
    else
      x0 ^ = x1 ; ~ = x0
  fi (op = 2)
fi (op = 1)
fi (op = 0)
"""

_ELEVATOR = """\
module elevator (inout c_f({w}), inout fb[{n}](1), inout cb[{n}](1), out door(1), out move(1), out
dir(1))
  if ((fb[c_f] = 1) || (cb[c_f] = 1)) then
      door^ = 1; move^ = 0
  else
      door^ = 0; move^ = 1
  fi ((fb[c_f] = 1) || (cb[c_f] = 1))

  if (c_f < {top}) then
      for$i = (c_f + 1) to {top} do
          if ((fb[$i] = 1) || (cb[$i] = 1)) then
              door^ = 0; move^ = 1; dir^ = 1
          else
              move^ = 0
          fi((fb[$i] = 1) || (cb[$i] = 1))
      rof

  else if (c_f > 0) then
      for$i = (c_f - 1) to 0 step -1 do
          if ((fb[$i] = 1) || (cb[$i] = 1)) then
              door^ = 0; move^ = 1; dir^ = 0
          else
              move^ = 0
          fi((fb[$i] = 1) || (cb[$i] = 1))
      rof

  else
      move^ = 0
      fi(c_f > 0)
  fi (c_f < {top})
"""


def floor_width(n: int) -> int:
    """Bits needed to address ``n`` floors."""
    return max(1, math.ceil(math.log2(n)))


def generate_template(name: str, param: int) -> str:
    """SyReC source of template ``name`` instantiated at ``param``.

    Raises:
        ParamOutOfRange: width below 1, or fewer than two floors.
        KeyError: unknown template name.
    """
    if name == "elevator":
        if param < 2:
            raise ParamOutOfRange(f"an elevator needs at least 2 floors, got {param}")
        return _ELEVATOR.format(w=floor_width(param), n=param, top=param - 1)
    if name not in TEMPLATES:
        raise KeyError(f"unknown template {name!r}; choose from {', '.join(TEMPLATES)}")
    if param < 1:
        raise ParamOutOfRange(f"width must be positive, got {param}")
    text = {"program_counter": _PROGRAM_COUNTER, "au": _AU, "lu": _LU}[name]
    return text.format(w=param)
