"""Variable elimination: bracket abstraction into native-closure combinators.

Three rule sets are available:

  FAB  the textbook S/K/I rules;
  C1   adds the selective B/C/N combinators, the conditional combinator
       S_IF, and automatic pre-evaluation of partial applications;
  C2   additionally uses multi-arity combinators (two abstractions over
       an application, one abstraction over a double application, and
       their mask-generated selective-distribution variants).

Rule priority within an abstraction node is most-specific-first:
conditional patterns, multi-arity patterns, selective constant patterns,
then the basic S/K/I rules.  Selective rules pass a branch as a constant
only when it is a constant or a variable, never an application (the
call-by-value soundness condition).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, replace
from typing import Optional

from . import refsem
from . import runtime as _rt
from .errors import (EvalTypeError, InterpError, StepLimitExceeded,
                     UnexpectedNodeError)
from .refsem import RAbs, RApp, RFunConst, RTerm, RVar
from .runtime import apply_value
from .syntax import (CombMeta, MApp, MConst, MExpr, PAbs, PApp, PConst, PVar,
                     PExpr, VBool, VFun, Value, format_value)


class ElimAlgo(enum.Enum):
    FAB = "fab"
    C1 = "c1"
    C2 = "c2"


# ---------------------------------------------------------------- combinators

@dataclass(frozen=True)
class CombinatorDef:
    comb_id: str
    total_arity: int
    pure: bool
    value: VFun
    defining_term: RTerm
    n_abs: Optional[int] = None      # mask combinators only
    mask: Optional[tuple] = None     # True = branch receives the bound variables


def _curry(arity: int, final, meta: CombMeta) -> VFun:
    """Nest `final` under single-argument closure stages."""
    if arity == 1:
        fn = final
    elif arity == 2:
        fn = lambda a: VFun(lambda b: final(a, b))
    elif arity == 3:
        fn = lambda a: VFun(lambda b: VFun(lambda c: final(a, b, c)))
    elif arity == 4:
        fn = lambda a: VFun(lambda b: VFun(
            lambda c: VFun(lambda d: final(a, b, c, d))))
    elif arity == 5:
        fn = lambda a: VFun(lambda b: VFun(lambda c: VFun(
            lambda d: VFun(lambda e: final(a, b, c, d, e)))))
    else:
        raise ValueError(f"unsupported combinator arity {arity}")
    return VFun(fn, meta)


def _type_err(v):
    raise EvalTypeError(f"cannot apply non-function value {format_value(v)}")


def _spend_bulk(cost: int) -> None:
    r = _rt._remaining
    if r is not None:
        if r < cost:
            raise StepLimitExceeded("application step budget exhausted")
        _rt._remaining = r - cost


def _mask_final(n_abs: int, mask: tuple):
    """The full-arity behavior: distribute the bound variables per the mask.

    Branch applications are interleaved with the spine applications so the
    effect order matches plain call-by-value reduction of the spine.  This
    is the hottest code in every evaluation, so the type and fuel checks
    of apply_value are inlined, with fuel spent in bulk per firing.
    """
    k = len(mask)
    cost = (k - 1) + n_abs * sum(mask)
    if n_abs == 1:
        if k == 1:
            return lambda a, x: a  # never distributed: the K shape
        if k == 2:
            m0, m1 = mask

            def final2(a, b, x):
                _spend_bulk(cost)
                if m0:
                    if type(a) is not VFun:
                        _type_err(a)
                    a = a.fn(x)
                if m1:
                    if type(b) is not VFun:
                        _type_err(b)
                    b = b.fn(x)
                if type(a) is not VFun:
                    _type_err(a)
                return a.fn(b)

            return final2
        m0, m1, m2 = mask

        def final3(a, b, c, x):
            _spend_bulk(cost)
            if m0:
                if type(a) is not VFun:
                    _type_err(a)
                a = a.fn(x)
            if m1:
                if type(b) is not VFun:
                    _type_err(b)
                b = b.fn(x)
            if type(a) is not VFun:
                _type_err(a)
            a = a.fn(b)
            if m2:
                if type(c) is not VFun:
                    _type_err(c)
                c = c.fn(x)
            if type(a) is not VFun:
                _type_err(a)
            return a.fn(c)

        return final3
    if k == 1:
        return lambda a, x, y: a
    if k == 2:
        m0, m1 = mask

        def final22(a, b, x, y):
            _spend_bulk(cost)
            if m0:
                if type(a) is not VFun:
                    _type_err(a)
                a = a.fn(x)
                if type(a) is not VFun:
                    _type_err(a)
                a = a.fn(y)
            if m1:
                if type(b) is not VFun:
                    _type_err(b)
                b = b.fn(x)
                if type(b) is not VFun:
                    _type_err(b)
                b = b.fn(y)
            if type(a) is not VFun:
                _type_err(a)
            return a.fn(b)

        return final22
    m0, m1, m2 = mask

    def final32(a, b, c, x, y):
        _spend_bulk(cost)
        if m0:
            if type(a) is not VFun:
                _type_err(a)
            a = a.fn(x)
            if type(a) is not VFun:
                _type_err(a)
            a = a.fn(y)
        if m1:
            if type(b) is not VFun:
                _type_err(b)
            b = b.fn(x)
            if type(b) is not VFun:
                _type_err(b)
            b = b.fn(y)
        if type(a) is not VFun:
            _type_err(a)
        a = a.fn(b)
        if m2:
            if type(c) is not VFun:
                _type_err(c)
            c = c.fn(x)
            if type(c) is not VFun:
                _type_err(c)
            c = c.fn(y)
        if type(a) is not VFun:
            _type_err(a)
        return a.fn(c)

    return final32


def _mask_value(comb_id: str, n_abs: int, mask: tuple) -> VFun:
    arity = len(mask) + n_abs
    return _curry(arity, _mask_final(n_abs, mask),
                  CombMeta(comb_id, arity, 0, True))


def _mask_term(n_abs: int, mask: tuple) -> RTerm:
    k = len(mask)
    branch_vars = [f"a{i}" for i in range(k)]
    abs_vars = [f"x{j}" for j in range(n_abs)]

    def dist(name):
        t: RTerm = RVar(name)
        for x in abs_vars:
            t = RApp(t, RVar(x))
        return t

    body = dist(branch_vars[0]) if mask[0] else RVar(branch_vars[0])
    for name, m in zip(branch_vars[1:], mask[1:]):
        body = RApp(body, dist(name) if m else RVar(name))
    for v in reversed(branch_vars + abs_vars):
        body = RAbs(v, body)
    return body


def _proj_value(comb_id: str, arity: int) -> VFun:
    return _curry(arity, lambda first, *_: first, CombMeta(comb_id, arity, 0, True))


def _identity_value() -> VFun:
    return VFun(lambda x: x, CombMeta("I", 1, 0, True))


def _sif_value(comb_id: str, n_abs: int) -> VFun:
    if n_abs == 1:
        def final(e1, e2, e3, x):
            cond = apply_value(e1, x)
            if not isinstance(cond, VBool):
                raise EvalTypeError("condition of IF must be a boolean")
            return apply_value(e2 if cond.b else e3, x)
    else:
        def final(e1, e2, e3, x, y):
            cond = apply_value(apply_value(e1, x), y)
            if not isinstance(cond, VBool):
                raise EvalTypeError("condition of IF must be a boolean")
            chosen = e2 if cond.b else e3
            return apply_value(apply_value(chosen, x), y)

    arity = 3 + n_abs
    return _curry(arity, final, CombMeta(comb_id, arity, 0, True))


def _sif_term(n_abs: int) -> RTerm:
    # uses the `if`/`sel:` constants of the standard delta table; branches
    # are suspended in thunks so only the chosen one is applied
    branch_vars = ["f", "g", "h"]
    abs_vars = [f"x{j}" for j in range(n_abs)]

    def dist(name):
        t: RTerm = RVar(name)
        for x in abs_vars:
            t = RApp(t, RVar(x))
        return t

    thunk_t = RAbs("%t", dist("g"))
    thunk_e = RAbs("%e", dist("h"))
    body = RApp(RApp(RApp(RFunConst("if"), dist("f")), thunk_t), thunk_e)
    body = RApp(body, RFunConst("dummy"))
    for v in reversed(branch_vars + abs_vars):
        body = RAbs(v, body)
    return body


def _mask_bits(mask: tuple) -> str:
    return "".join("1" if m else "0" for m in mask)


_SINGLE_MASK_NAMES = {(True, True): "S", (False, True): "B",
                      (True, False): "C", (False, False): "N"}


def _mask_name(n_abs: int, mask: tuple) -> str:
    if n_abs == 1 and len(mask) == 2:
        return _SINGLE_MASK_NAMES[mask]
    k = len(mask)
    name = f"S_{k - 1}" if k > 2 else "S"
    if n_abs > 1:
        name += f"^{n_abs}"
    if not all(mask):
        name += f"[{_mask_bits(mask)}]"
    return name


def _mask_def(n_abs: int, mask: tuple) -> CombinatorDef:
    name = _mask_name(n_abs, mask)
    return CombinatorDef(name, len(mask) + n_abs, True,
                         _mask_value(name, n_abs, mask), _mask_term(n_abs, mask),
                         n_abs=n_abs, mask=mask)


def _basic_defs() -> dict[str, CombinatorDef]:
    i_def = CombinatorDef("I", 1, True, _identity_value(), refsem.COMB_I)
    # K is the single-branch all-constant mask combinator
    k_def = CombinatorDef("K", 2, True, _mask_value("K", 1, (False,)),
                          _mask_term(1, (False,)), n_abs=1, mask=(False,))
    s_def = _mask_def(1, (True, True))
    return {"I": i_def, "K": k_def, "S": s_def}


def make_combinators(algo: ElimAlgo) -> dict[str, CombinatorDef]:
    defs = _basic_defs()
    if algo is ElimAlgo.FAB:
        return defs
    for mask in ((False, True), (True, False), (False, False)):
        d = _mask_def(1, mask)
        defs[d.comb_id] = d
    sif = CombinatorDef("S_IF", 4, True, _sif_value("S_IF", 1), _sif_term(1))
    defs["S_IF"] = sif
    if algo is ElimAlgo.C1:
        return defs
    # C2: multi-arity combinators and their selective-distribution families
    for mask in itertools.product((True, False), repeat=3):
        d = _mask_def(1, mask)  # one abstraction over a double application
        defs[d.comb_id] = d
    for mask in itertools.product((True, False), repeat=2):
        d = _mask_def(2, mask)  # two abstractions over an application
        defs[d.comb_id] = d
    d = _mask_def(2, (True, True, True))  # two abstractions, double application
    defs[d.comb_id] = d
    defs["K^2"] = CombinatorDef("K^2", 3, True, _mask_value("K^2", 2, (False,)),
                                _mask_term(2, (False,)), n_abs=2, mask=(False,))
    defs["I^2"] = CombinatorDef("I^2", 2, True, _proj_value("I^2", 2),
                                RAbs("x", RAbs("y", RVar("x"))))
    defs["S_IF^2"] = CombinatorDef("S_IF^2", 5, True, _sif_value("S_IF^2", 2),
                                   _sif_term(2))
    return defs


# ---------------------------------------------------------------- hand-made combinators

def hand_combinator(kind: str, *consts: Value) -> PExpr:
    """Transform-time specialized combinators (K_c, B_c, C_c, N_c1c2)."""
    if kind == "K_c":
        (c,) = consts
        return PConst(VFun(lambda _: c))
    if kind == "B_c":
        (c,) = consts
        return PConst(VFun(
            lambda g: VFun(lambda x: apply_value(c, apply_value(g, x)))))
    if kind == "C_c":
        (c,) = consts
        return PConst(VFun(
            lambda f: VFun(lambda x: apply_value(apply_value(f, x), c))))
    if kind == "N_c1c2":
        c1, c2 = consts
        return PConst(VFun(lambda _: apply_value(c1, c2)))
    raise ValueError(f"unknown hand combinator kind: {kind}")


# ---------------------------------------------------------------- pre-evaluation

def _fold_app(e: PExpr) -> PExpr:
    """Fold one application node if it is a safe partial combinator application."""
    match e:
        case PApp(PConst(VFun() as f), PConst(v)):
            meta = f.meta
            if (meta is not None and meta.pure
                    and meta.args_seen + 1 < meta.total_arity):
                try:
                    folded = f.fn(v)
                except InterpError:
                    # a wrapper rejected the argument; surface it at run time
                    # in its proper place in the effect order instead
                    return e
                new_meta = replace(meta, args_seen=meta.args_seen + 1)
                return PConst(VFun(folded.fn, new_meta))
    return e


def pre_eval_app(e: PExpr) -> PExpr:
    """Bottom-up folding of safe partial applications of pure combinators."""
    match e:
        case PApp(f, a):
            return _fold_app(PApp(pre_eval_app(f), pre_eval_app(a)))
        case _:
            return e


# ---------------------------------------------------------------- the algorithm

@dataclass(frozen=True)
class _Config:
    algo: ElimAlgo
    defs: dict
    selective: bool
    multi: bool
    s_if: bool
    auto_pre_eval: bool


def _config(algo: ElimAlgo, pre_eval: Optional[bool], hand: bool) -> _Config:
    defs = make_combinators(algo)
    if pre_eval is None:
        pre_eval = algo is not ElimAlgo.FAB
    return _Config(algo, defs, selective=algo is not ElimAlgo.FAB,
                   multi=algo is ElimAlgo.C2,
                   s_if=algo is not ElimAlgo.FAB,
                   auto_pre_eval=pre_eval), hand


def _is_constant(e: PExpr, bound: frozenset) -> bool:
    """Constant in the rule sense: a constant, extern, or variable not in `bound`."""
    match e:
        case PConst():
            return True
        case PVar(name):
            return name not in bound
        case _:
            return False


def _match_if_shape(e: PExpr):
    """((IF c) \\z.t) \\z.e with the thunk binders not free in their bodies."""
    from .syntax import free_vars

    match e:
        case PApp(PApp(PApp(PConst(VFun() as v), cond), PAbs(zt, tb)), PAbs(ze, eb)):
            if (v.meta is not None and v.meta.comb_id == "IF"
                    and zt not in free_vars(tb) and ze not in free_vars(eb)):
                return cond, tb, eb
    return None


class _Eliminator:
    def __init__(self, cfg: _Config, hand: bool):
        self.cfg = cfg
        self.hand = hand

    def const(self, comb_id: str) -> PExpr:
        return PConst(self.cfg.defs[comb_id].value)

    def emit(self, e: PExpr) -> PExpr:
        return _fold_app(e) if self.cfg.auto_pre_eval else e

    def app(self, f: PExpr, a: PExpr) -> PExpr:
        return self.emit(PApp(f, a))

    def elim(self, e: PExpr) -> PExpr:
        match e:
            case PConst() | PVar():
                return e
            case PApp(f, a):
                return self.app(self.elim(f), self.elim(a))
            case PAbs(x, body):
                return self.elim_abs(x, body)
        raise TypeError(f"not a PExpr: {e!r}")

    def bracket1(self, x: str, e: PExpr) -> PExpr:
        return self.elim(PAbs(x, e))

    def bracket2(self, x: str, y: str, e: PExpr) -> PExpr:
        return self.elim(PAbs(x, PAbs(y, e)))

    def spine_apply(self, comb_id: str, brackets: list[PExpr]) -> PExpr:
        out = self.const(comb_id)
        for b in brackets:
            out = self.app(out, b)
        return out

    def mask_apply(self, n_abs: int, branches: list, bound: frozenset,
                   wrap) -> Optional[PExpr]:
        """Distribute `bound` over an application spine with a mask combinator."""
        mask = tuple(not _is_constant(b, bound) for b in branches)
        name = _mask_name(n_abs, mask)
        if name not in self.cfg.defs:
            return None
        args = [wrap(b) if m else b for b, m in zip(branches, mask)]
        if self.hand and n_abs == 1 and len(branches) == 2 and not all(mask):
            made = self._hand_selective(mask, branches, args)
            if made is not None:
                return made
        return self.spine_apply(name, args)

    def _hand_selective(self, mask, branches, args) -> Optional[PExpr]:
        # hand-made B_c / C_c / N_c1c2: only when the constants are PConst
        b1, b2 = branches
        if mask == (False, True) and isinstance(b1, PConst):
            return self.app(hand_combinator("B_c", b1.value), args[1])
        if mask == (True, False) and isinstance(b2, PConst):
            return self.app(hand_combinator("C_c", b2.value), args[0])
        if (mask == (False, False) and isinstance(b1, PConst)
                and isinstance(b2, PConst)):
            return hand_combinator("N_c1c2", b1.value, b2.value)
        return None

    def elim_abs(self, x: str, body: PExpr) -> PExpr:
        cfg = self.cfg

        # conditional pattern: drop the dummy thunks
        if cfg.s_if:
            shape = _match_if_shape(body)
            if shape is not None:
                c, t, o = shape
                return self.spine_apply(
                    "S_IF",
                    [self.bracket1(x, c), self.bracket1(x, t), self.bracket1(x, o)])

        # multi-arity patterns over two distinct binders
        if cfg.multi and isinstance(body, PAbs) and body.param != x:
            y, inner = body.param, body.body
            two = self._elim_abs2(x, y, inner)
            if two is not None:
                return two

        match body:
            case PVar(name) if name == x:
                return self.const("I")
            case _ if _is_constant(body, frozenset({x})):
                if self.hand and isinstance(body, PConst):
                    return hand_combinator("K_c", body.value)
                return self.app(self.const("K"), body)
            case PApp(PApp(e1, e2), e3) if cfg.multi:
                made = self.mask_apply(1, [e1, e2, e3], frozenset({x}),
                                       lambda b: self.bracket1(x, b))
                if made is not None:
                    return made
            case _:
                pass

        match body:
            case PApp(e1, e2):
                if cfg.selective:
                    made = self.mask_apply(1, [e1, e2], frozenset({x}),
                                           lambda b: self.bracket1(x, b))
                    if made is not None:
                        return made
                return self.spine_apply(
                    "S", [self.bracket1(x, e1), self.bracket1(x, e2)])
            case PAbs():
                return self.elim(PAbs(x, self.elim(body)))
        raise AssertionError(f"unhandled abstraction body: {body!r}")

    def _elim_abs2(self, x: str, y: str, inner: PExpr) -> Optional[PExpr]:
        """Rules over the pattern \\x.\\y.inner; None when nothing matches."""
        bound = frozenset({x, y})
        shape = _match_if_shape(inner)
        if shape is not None:
            c, t, o = shape
            return self.spine_apply(
                "S_IF^2",
                [self.bracket2(x, y, c), self.bracket2(x, y, t),
                 self.bracket2(x, y, o)])
        match inner:
            case PVar(name) if name == x:
                return self.const("I^2")
            case _ if _is_constant(inner, bound):
                return self.app(self.const("K^2"), inner)
            case PApp(PApp(e1, e2), e3):
                # the double-application form exists only fully distributed
                return self.spine_apply(
                    "S_2^2",
                    [self.bracket2(x, y, e1), self.bracket2(x, y, e2),
                     self.bracket2(x, y, e3)])
            case PApp(e1, e2):
                return self.mask_apply(2, [e1, e2], bound,
                                       lambda b: self.bracket2(x, y, b))
            case _:
                return None


def elim(e: PExpr, algo: ElimAlgo, *, pre_eval: Optional[bool] = None,
         hand: bool = False) -> PExpr:
    cfg, hand = _config(algo, pre_eval, hand)
    return _Eliminator(cfg, hand).elim(e)


def check_no_var(e: PExpr) -> MExpr:
    match e:
        case PConst(v):
            return MConst(v)
        case PApp(f, a):
            return MApp(check_no_var(f), check_no_var(a))
        case PVar(name):
            raise UnexpectedNodeError(f"variable {name!r} survived elimination")
        case PAbs(param, _):
            raise UnexpectedNodeError(
                f"abstraction over {param!r} survived elimination")
    raise TypeError(f"not a PExpr: {e!r}")


def transform(e: PExpr, algo: ElimAlgo, *, pre_eval: Optional[bool] = None,
              hand: bool = False) -> MExpr:
    return check_no_var(elim(e, algo, pre_eval=pre_eval, hand=hand))


# ---------------------------------------------------------------- static discipline check

@dataclass(frozen=True)
class CbvViolation:
    comb_id: str
    position: int
    offender: object  # the application found in a constant-only position


def _spine(e):
    args = []
    while isinstance(e, (PApp, MApp)):
        args.append(e.arg)
        e = e.fn
    return e, list(reversed(args))


def find_cbv_violations(e, defs: Optional[dict] = None) -> list[CbvViolation]:
    """Scan a PExpr/MExpr for applications in constant-only combinator positions.

    Selective combinators may only receive a constant or variable in a
    branch position they do not distribute over; an application there
    would be evaluated eagerly even though the source protected it under
    a binder.  A clean transform output yields no violations.
    """
    if defs is None:
        defs = make_combinators(ElimAlgo.C2)
    by_id = {d.comb_id: d for d in defs.values()}
    found: list[CbvViolation] = []

    def is_app(t) -> bool:
        return isinstance(t, (PApp, MApp))

    def walk(t) -> None:
        head, args = _spine(t)
        for a in args:
            walk(a)
        if isinstance(head, (PConst, MConst)) and isinstance(head.value, VFun):
            meta = head.value.meta
            if meta is None or meta.args_seen:
                return
            d = by_id.get(meta.comb_id)
            if d is None or d.mask is None:
                return
            for i, m in enumerate(d.mask):
                if i < len(args) and not m and is_app(args[i]):
                    found.append(CbvViolation(meta.comb_id, i, args[i]))

    walk(e)
    return found
