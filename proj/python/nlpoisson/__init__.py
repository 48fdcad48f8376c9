"""Python access to the nlpoisson local solver.

Configs use the same text grammar as the command-line tool.
"""

from ._nlpoisson import (
    DivergenceError,
    ParseError,
    RefusedError,
    certify,
    preset_names,
    run,
    solve,
)

__all__ = [
    "DivergenceError",
    "ParseError",
    "RefusedError",
    "certify",
    "preset_names",
    "run",
    "solve",
]
