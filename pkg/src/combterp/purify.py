"""Non-strictness elimination: conditionals and get/set become applications.

Conditional branches are suspended in dummy-parameter thunks and chosen
at run time by the IF function constant; reference reads and writes
become applications of per-tag effectful function constants that capture
the evaluation store handle.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EvalTypeError
from .runtime import apply_value
from .store import Store
from .syntax import (CombMeta, DUMMY_IDENT, DUMMY_VAL, EAbs, EApp, EConst,
                     EGet, EIf, ESet, EVar, Expr, PAbs, PApp, PConst, PVar,
                     PExpr, VBool, VFun, Value)


def _fun_if_impl(cond):
    def with_then(th):
        if not isinstance(th, VFun):
            raise EvalTypeError("IF branch must be a function")

        def with_else(el):
            if not isinstance(el, VFun):
                raise EvalTypeError("IF branch must be a function")
            if not isinstance(cond, VBool):
                raise EvalTypeError("condition of IF must be a boolean")
            chosen = th if cond.b else el
            return apply_value(chosen, DUMMY_VAL)

        return VFun(with_else)

    return VFun(with_then)


# The one distinguished IF constant; variable elimination recognizes it
# by identity.  Marked impure so pre-evaluation never folds it.
FUN_IF = VFun(_fun_if_impl, CombMeta("IF", 3, 0, False))


@dataclass
class PurifyCtx:
    store: Store
    if_const: VFun = FUN_IF
    _getfuns: dict = field(default_factory=dict)
    _setfuns: dict = field(default_factory=dict)


def make_get(tag: str, ctx: PurifyCtx) -> VFun:
    if tag not in ctx._getfuns:
        store = ctx.store
        ctx._getfuns[tag] = VFun(
            lambda _: store.get(tag), CombMeta(f"get!{tag}", 1, 0, False)
        )
    return ctx._getfuns[tag]


def make_set(tag: str, ctx: PurifyCtx) -> VFun:
    if tag not in ctx._setfuns:
        store = ctx.store
        ctx._setfuns[tag] = VFun(
            lambda v: store.set(tag, v), CombMeta(f"set!{tag}", 1, 0, False)
        )
    return ctx._setfuns[tag]


def purify(e: Expr, ctx: PurifyCtx) -> PExpr:
    match e:
        case EConst(v):
            return PConst(v)
        case EVar(name):
            return PVar(name)
        case EAbs(param, body):
            return PAbs(param, purify(body, ctx))
        case EApp(f, a):
            return PApp(purify(f, ctx), purify(a, ctx))
        case EIf(c, t, o):
            pc = purify(c, ctx)
            pt = PAbs(DUMMY_IDENT, purify(t, ctx))
            po = PAbs(DUMMY_IDENT, purify(o, ctx))
            return PApp(PApp(PApp(PConst(ctx.if_const), pc), pt), po)
        case EGet(tag):
            return PApp(PConst(make_get(tag, ctx)), PConst(DUMMY_VAL))
        case ESet(tag, inner):
            return PApp(PConst(make_set(tag, ctx)), purify(inner, ctx))
    raise TypeError(f"not an Expr: {e!r}")


def fun_if_apply(cond: Value, then_branch: Value, else_branch: Value) -> Value:
    """Apply the IF constant to its three arguments (convenience for tests)."""
    return apply_value(apply_value(apply_value(FUN_IF, cond), then_branch), else_branch)
