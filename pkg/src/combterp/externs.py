"""External (library) functions exposed to the interpreted language.

All wrappers are purely structural: they unwrap and rewrap Value
constructors and never dispatch on closure-vs-native function kinds.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import EvalTypeError
from .runtime import apply_value
from .syntax import CombMeta, VBool, VFun, VInt, VList, Value, is_ground, value_ground_eq


@dataclass(frozen=True)
class ExternDef:
    name: str
    value: Value
    arity: int
    pure: bool


def _want_int(v) -> int:
    if not isinstance(v, VInt):
        raise EvalTypeError(f"expected an integer, got {v!r}")
    return v.n


def _want_list(v) -> VList:
    if not isinstance(v, VList):
        raise EvalTypeError(f"expected a list, got {v!r}")
    return v


def _int2(name, op):
    def outer(a):
        x = _want_int(a)
        return VFun(lambda b: VInt(op(x, _want_int(b))))
    return VFun(outer, CombMeta(name, 2, 0, True))


def _cmp2(name, op):
    def outer(a):
        x = _want_int(a)
        return VFun(lambda b: VBool(op(x, _want_int(b))))
    return VFun(outer, CombMeta(name, 2, 0, True))


def _eq_fn(a):
    if not is_ground(a):
        raise EvalTypeError("= compares ground values only")

    def inner(b):
        if not is_ground(b):
            raise EvalTypeError("= compares ground values only")
        return VBool(value_ground_eq(a, b))

    return VFun(inner)


def _cons_fn(v):
    return VFun(lambda l: VList.cons(v, _want_list(l)))


def _head_fn(l):
    lst = _want_list(l)
    if lst.is_empty:
        raise EvalTypeError("head of the empty list")
    return lst.first


def _tail_fn(l):
    lst = _want_list(l)
    if lst.is_empty:
        raise EvalTypeError("tail of the empty list")
    return lst.rest


def _isnil_fn(l):
    return VBool(_want_list(l).is_empty)


def _want_fun(v) -> VFun:
    if not isinstance(v, VFun):
        raise EvalTypeError(f"expected a function, got {v!r}")
    return v


def compose_embed() -> Value:
    """f . g as a native closure: only unwraps its two function arguments."""
    def outer(f):
        _want_fun(f)

        def middle(g):
            _want_fun(g)
            return VFun(lambda x: apply_value(f, apply_value(g, x)))

        return VFun(middle)

    return VFun(outer, CombMeta("compose", 3, 0, True))


def _filter_value() -> Value:
    def outer(pred):
        _want_fun(pred)

        def inner(l):
            kept = []
            for item in _want_list(l):
                keep = apply_value(pred, item)
                if not isinstance(keep, VBool):
                    raise EvalTypeError("filter predicate must return a boolean")
                if keep.b:
                    kept.append(item)
            return VList(tuple(kept))

        return VFun(inner)

    return VFun(outer, CombMeta("filter", 2, 0, True))


def _make_registry() -> dict[str, ExternDef]:
    defs = [
        ExternDef("plus", _int2("plus", lambda a, b: a + b), 2, True),
        ExternDef("minus", _int2("minus", lambda a, b: a - b), 2, True),
        ExternDef("times", _int2("times", lambda a, b: a * b), 2, True),
        ExternDef("leq", _cmp2("leq", lambda a, b: a <= b), 2, True),
        ExternDef("lt", _cmp2("lt", lambda a, b: a < b), 2, True),
        ExternDef("eq", VFun(_eq_fn, CombMeta("eq", 2, 0, True)), 2, True),
        ExternDef("cons", VFun(_cons_fn, CombMeta("cons", 2, 0, True)), 2, True),
        ExternDef("head", VFun(_head_fn, CombMeta("head", 1, 0, True)), 1, True),
        ExternDef("tail", VFun(_tail_fn, CombMeta("tail", 1, 0, True)), 1, True),
        ExternDef("isnil", VFun(_isnil_fn, CombMeta("isnil", 1, 0, True)), 1, True),
        ExternDef("nil", VList(()), 0, True),
        ExternDef("compose", compose_embed(), 3, True),
        ExternDef("filter", _filter_value(), 2, True),
    ]
    return {d.name: d for d in defs}


_REGISTRY = _make_registry()


def registry() -> dict[str, ExternDef]:
    return dict(_REGISTRY)
