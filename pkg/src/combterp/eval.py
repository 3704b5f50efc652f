"""The minimal evaluator: constants and one kind of application.

No environments, no substitution; reducing an application is a single
host-language call, so the only recursion here is structural.
"""
from __future__ import annotations

from .runtime import apply_value
from .syntax import MApp, MConst, MExpr, Value


def eval(e: MExpr) -> Value:
    match e:
        case MConst(v):
            return v
        case MApp(e1, e2):
            f = eval(e1)
            v = eval(e2)
            return apply_value(f, v)
    raise TypeError(f"not an MExpr: {e!r}")
