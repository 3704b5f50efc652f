"""The three term languages of the pipeline and the runtime value type.

Surface programs are `Expr` trees.  Non-strictness elimination produces
`PExpr` (purely functional: no conditional, no get/set).  Variable
elimination produces `MExpr` (constants and applications only).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

RESERVED_PREFIX = "%"
DUMMY_IDENT = "%d"  # binder of the thunks introduced by non-strictness elimination


# ---------------------------------------------------------------- values

@dataclass(frozen=True)
class VInt:
    n: int


@dataclass(frozen=True)
class VBool:
    b: bool


class VList:
    """Persistent list value: O(1) cons/head/tail through structure sharing."""

    __slots__ = ("_head", "_rest", "length")
    __match_args__ = ("items",)

    def __init__(self, items=()):
        items = tuple(items)
        if not items:
            self._head = None
            self._rest = None
            self.length = 0
            return
        rest = VList()
        for v in reversed(items[1:]):
            rest = VList.cons(v, rest)
        self._head = items[0]
        self._rest = rest
        self.length = len(items)

    @staticmethod
    def cons(v, rest: "VList") -> "VList":
        cell = object.__new__(VList)
        cell._head = v
        cell._rest = rest
        cell.length = rest.length + 1
        return cell

    @property
    def is_empty(self) -> bool:
        return self.length == 0

    @property
    def first(self):
        return self._head

    @property
    def rest(self) -> "VList":
        return self._rest

    def __iter__(self):
        node = self
        while node.length:
            yield node._head
            node = node._rest

    @property
    def items(self) -> tuple:
        return tuple(self)

    def __eq__(self, other):
        if not isinstance(other, VList):
            return NotImplemented
        return self.length == other.length and all(
            a == b for a, b in zip(self, other))

    def __hash__(self):
        return hash(self.items)

    def __repr__(self):
        return f"VList({self.items!r})"


@dataclass(frozen=True)
class VDummy:
    pass


DUMMY_VAL = VDummy()


@dataclass(frozen=True)
class CombMeta:
    """Arity/purity bookkeeping attached to known native functions.

    `pure` means the function applies nothing before it has received all
    of its `total_arity` arguments, so its partial applications may be
    folded at transform time.
    """
    comb_id: str
    total_arity: int
    args_seen: int = 0
    pure: bool = True


class VFun:
    """A function value realized as a native closure.

    Compared by identity only; the closure cannot be inspected.
    """

    __slots__ = ("fn", "meta")

    def __init__(self, fn: Callable, meta: Optional[CombMeta] = None):
        self.fn = fn
        self.meta = meta

    def __repr__(self):
        if self.meta is None:
            return "<fun>"
        m = self.meta
        if m.args_seen:
            return f"<{m.comb_id}+{m.args_seen}>"
        return f"<{m.comb_id}>"


Value = Union[VInt, VBool, VList, VDummy, VFun]


def is_ground(v: Value) -> bool:
    if isinstance(v, (VInt, VBool, VDummy)):
        return True
    if isinstance(v, VList):
        return all(is_ground(x) for x in v)
    return False


def value_ground_eq(a: Value, b: Value) -> bool:
    """Observational equality: structural on ground values, identity on functions."""
    if isinstance(a, VFun) and isinstance(b, VFun):
        return a is b
    if isinstance(a, VFun) or isinstance(b, VFun):
        return False
    if isinstance(a, VList) and isinstance(b, VList):
        return (a.length == b.length
                and all(value_ground_eq(x, y) for x, y in zip(a, b)))
    return type(a) is type(b) and a == b and is_ground(a)


def format_value(v: Value) -> str:
    match v:
        case VInt(n):
            return str(n)
        case VBool(b):
            return "true" if b else "false"
        case VList(items):
            return "[" + ", ".join(format_value(x) for x in items) + "]"
        case VDummy():
            return "dummy"
        case VFun():
            return repr(v)
    raise TypeError(f"not a value: {v!r}")


# ---------------------------------------------------------------- surface syntax

@dataclass(frozen=True)
class EConst:
    value: Value


@dataclass(frozen=True)
class EVar:
    name: str


@dataclass(frozen=True)
class EAbs:
    param: str
    body: "Expr"


@dataclass(frozen=True)
class EApp:
    fn: "Expr"
    arg: "Expr"


@dataclass(frozen=True)
class EIf:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


@dataclass(frozen=True)
class EGet:
    tag: str


@dataclass(frozen=True)
class ESet:
    tag: str
    expr: "Expr"


Expr = Union[EConst, EVar, EAbs, EApp, EIf, EGet, ESet]


# ---------------------------------------------------------------- purely functional syntax

@dataclass(frozen=True)
class PConst:
    value: Value


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PAbs:
    param: str
    body: "PExpr"


@dataclass(frozen=True)
class PApp:
    fn: "PExpr"
    arg: "PExpr"


PExpr = Union[PConst, PVar, PAbs, PApp]


# ---------------------------------------------------------------- minimal syntax

@dataclass(frozen=True)
class MConst:
    value: Value


@dataclass(frozen=True)
class MApp:
    fn: "MExpr"
    arg: "MExpr"


MExpr = Union[MConst, MApp]


# ---------------------------------------------------------------- structural metrics

def count_apps(e) -> int:
    """Number of application nodes in a PExpr or MExpr tree."""
    match e:
        case PApp(f, a) | MApp(f, a):
            return 1 + count_apps(f) + count_apps(a)
        case _:
            return 0


def free_vars(e) -> frozenset:
    """Free variables of an Expr or PExpr under the usual binding of Abs."""
    match e:
        case EVar(name) | PVar(name):
            return frozenset({name})
        case EAbs(param, body) | PAbs(param, body):
            return free_vars(body) - {param}
        case EApp(f, a) | PApp(f, a):
            return free_vars(f) | free_vars(a)
        case EIf(c, t, o):
            return free_vars(c) | free_vars(t) | free_vars(o)
        case ESet(_, inner):
            return free_vars(inner)
        case _:
            return frozenset()


def format_mexpr(e: MExpr) -> str:
    """Textual combinator notation, e.g. ((S I) I)."""
    match e:
        case MConst(v):
            if isinstance(v, VFun):
                if v.meta is None:
                    return "<fun>"
                if v.meta.args_seen:
                    return f"<{v.meta.comb_id}+{v.meta.args_seen}>"
                return v.meta.comb_id
            return format_value(v)
        case MApp(f, a):
            return f"({format_mexpr(f)} {format_mexpr(a)})"
    raise TypeError(f"not an MExpr: {e!r}")
