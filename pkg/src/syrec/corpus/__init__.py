"""Example SyReC programs shipped with the package.

Listings were transcribed from published examples. Stray line numbers and
a few header or body slips are normalised so every file parses and checks
clean.
"""

from __future__ import annotations

from importlib import resources
from typing import Dict, List

from ..nodes import Program
from ..parser import parse


def names() -> List[str]:
    """Names of the bundled programs, without the ``.src`` suffix."""
    files = resources.files(__name__).iterdir()
    return sorted(f.name[:-4] for f in files if f.name.endswith(".src"))


def source(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.src").read_text(encoding="utf-8")


def load(name: str) -> Program:
    return parse(source(name))


def load_all() -> Dict[str, Program]:
    return {n: load(n) for n in names()}
