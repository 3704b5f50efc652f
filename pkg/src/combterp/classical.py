"""The classical environment/closure interpreter, used as the differential oracle.

Functions come in two kinds here (closures and native functions), each
with its own reduction mechanism dispatched in `happ`.  Application is
operator-then-operand, matching the formal Left/Right rules, so store
traces are comparable across all interpreters in this package.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import externs
from .errors import EvalTypeError, UnboundVarError
from .runtime import apply_value, spend
from .store import Store
from .syntax import (CombMeta, EAbs, EApp, EConst, EGet, EIf, ESet, EVar,
                     Expr, VBool, VFun, VList, Value)


@dataclass(frozen=True)
class Closure:
    param: str
    body: Expr
    env: "Env"


class Env:
    """Persistent environment: extension never mutates the parent."""

    __slots__ = ("name", "value", "parent")

    def __init__(self, name=None, value=None, parent=None):
        self.name = name
        self.value = value
        self.parent = parent

    def add(self, name: str, value) -> "Env":
        return Env(name, value, self)

    def lookup(self, name: str):
        env = self
        while env is not None and env.name is not None:
            if env.name == name:
                return env.value
            env = env.parent
        raise UnboundVarError(name)


EMPTY_ENV = Env()


def happ(f, v, s: Optional[Store] = None):
    """Dual application dispatch: native call or environment extension."""
    if isinstance(f, VFun):
        spend()
        return f.fn(v)
    if isinstance(f, Closure):
        spend()
        return ceval(f.env.add(f.param, v), s, f.body)
    raise EvalTypeError(f"cannot apply non-function value {f!r}")


def ceval(env: Env, s: Store, e: Expr):
    match e:
        case EConst(v):
            return v
        case EVar(name):
            return env.lookup(name)
        case EAbs(param, body):
            return Closure(param, body, env)
        case EApp(e1, e2):
            f = ceval(env, s, e1)
            v = ceval(env, s, e2)
            return happ(f, v, s)
        case EIf(c, t, o):
            cond = ceval(env, s, c)
            if not isinstance(cond, VBool):
                raise EvalTypeError("condition of if must be a boolean")
            return ceval(env, s, t if cond.b else o)
        case EGet(tag):
            return s.get(tag)
        case ESet(tag, inner):
            v = ceval(env, s, inner)
            s.set(tag, v)
            return v
    raise TypeError(f"not an Expr: {e!r}")


def run_classical(e: Expr, s: Optional[Store] = None):
    return ceval(EMPTY_ENV, s if s is not None else Store(), e)


# --------------------------------------------------------------- externs

def _want_fun_like(v):
    if not isinstance(v, (VFun, Closure)):
        raise EvalTypeError(f"expected a function, got {v!r}")
    return v


def _compose_classical(s: Store) -> Value:
    """The happ-based wrapper the classical scheme needs for higher-order externs."""
    def outer(f):
        _want_fun_like(f)

        def middle(g):
            _want_fun_like(g)
            return VFun(lambda x: happ(f, happ(g, x, s), s))

        return VFun(middle)

    return VFun(outer, CombMeta("compose", 3, 0, True))


def _filter_classical(s: Store) -> Value:
    def outer(pred):
        _want_fun_like(pred)

        def inner(l):
            if not isinstance(l, VList):
                raise EvalTypeError(f"expected a list, got {l!r}")
            kept = []
            for item in l.items:
                keep = happ(pred, item, s)
                if not isinstance(keep, VBool):
                    raise EvalTypeError("filter predicate must return a boolean")
                if keep.b:
                    kept.append(item)
            return VList(tuple(kept))

        return VFun(inner)

    return VFun(outer, CombMeta("filter", 2, 0, True))


def classical_registry(s: Store) -> dict[str, externs.ExternDef]:
    """The shared registry with higher-order externs replaced by happ-based wrappers."""
    reg = externs.registry()
    reg["compose"] = externs.ExternDef("compose", _compose_classical(s), 3, True)
    reg["filter"] = externs.ExternDef("filter", _filter_classical(s), 2, True)
    return reg


def retarget_externs(e: Expr, registry: dict[str, externs.ExternDef]) -> Expr:
    """Rebind extern constants (identified by their CombMeta name) to a registry."""
    def walk(x):
        match x:
            case EConst(v):
                if isinstance(v, VFun) and v.meta and v.meta.comb_id in registry:
                    return EConst(registry[v.meta.comb_id].value)
                return x
            case EAbs(p, b):
                return EAbs(p, walk(b))
            case EApp(f, a):
                return EApp(walk(f), walk(a))
            case EIf(c, t, o):
                return EIf(walk(c), walk(t), walk(o))
            case ESet(tag, inner):
                return ESet(tag, walk(inner))
            case _:
                return x

    return walk(e)
