"""Differential harness: classical interpreter vs the combinator pipeline.

Every program is observed as an outcome class (ground value, function,
type error, unbound tag, step-limit), a normalized store trace, and the
final store bindings.  Two runs agree when all three coincide; runs that
exhaust their step budget on either side are excluded rather than
counted as disagreements.
"""
from __future__ import annotations

import gc
from dataclasses import dataclass
from typing import Optional

from .classical import Closure, classical_registry, retarget_externs, run_classical
from .elim import ElimAlgo, transform
from .errors import (EvalTypeError, StepLimitExceeded, UnboundTagError,
                     UnboundVarError)
from .eval import eval as meval
from .purify import PurifyCtx, purify
from .runtime import call_deep, fuel
from .store import Store
from .syntax import (Expr, VFun, VList, Value, format_value, is_ground,
                     value_ground_eq)

DEFAULT_BUDGET = 200_000


def normalize_value(v):
    """Collapse functions to an opaque token so traces compare across schemes."""
    if isinstance(v, (VFun, Closure)):
        return "fun"
    if isinstance(v, VList) and not is_ground(v):
        return tuple(normalize_value(x) for x in v.items)
    return v


@dataclass(frozen=True)
class Observation:
    kind: str  # "value", "type_error", "unbound_tag", "limit", "recursion"
    value: Optional[Value] = None
    trace: tuple = ()
    bindings: tuple = ()

    @property
    def excluded(self) -> bool:
        return self.kind in ("limit", "recursion")


def _snapshot(s: Store) -> tuple:
    trace = tuple((ev.kind, ev.tag, normalize_value(ev.value)) for ev in s.trace)
    bindings = tuple(sorted(
        (tag, normalize_value(v)) for tag, v in s.bindings.items()))
    return trace, bindings


def _observe(body, s: Store, budget: int) -> Observation:
    kind, value = "value", None
    gc_was_on = gc.isenabled()
    gc.disable()  # budget-bounded runs allocate heavily; collect afterwards
    try:
        with fuel(budget):
            value = call_deep(body)
    except EvalTypeError:
        kind = "type_error"
    except (UnboundTagError, UnboundVarError):
        kind = "unbound_tag"
    except StepLimitExceeded:
        kind = "limit"
    except (RecursionError, MemoryError):
        kind = "recursion"
    finally:
        if gc_was_on:
            gc.enable()
    trace, bindings = _snapshot(s)
    return Observation(kind, value, trace, bindings)


def observe_classical(e: Expr, initial=None, budget: int = DEFAULT_BUDGET) -> Observation:
    s = Store(initial)
    e2 = retarget_externs(e, classical_registry(s))
    return _observe(lambda: run_classical(e2, s), s, budget)


def observe_combinator(e: Expr, algo: ElimAlgo, initial=None,
                       budget: int = DEFAULT_BUDGET,
                       pre_eval: Optional[bool] = None) -> Observation:
    s = Store(initial)
    ctx = PurifyCtx(s)
    m = call_deep(transform, purify(e, ctx), algo, pre_eval=pre_eval)
    assert not s.trace, "transforming must not touch the store"
    return _observe(lambda: meval(m), s, budget)


@dataclass(frozen=True)
class CompareResult:
    agree: bool
    excluded: bool
    detail: str = ""


def _values_agree(a: Observation, b: Observation) -> bool:
    fa = isinstance(a.value, (VFun, Closure))
    fb = isinstance(b.value, (VFun, Closure))
    if fa or fb:
        return fa and fb  # same outcome class: some function
    return value_ground_eq(a.value, b.value)


def compare_observations(a: Observation, b: Observation) -> CompareResult:
    if a.excluded or b.excluded:
        return CompareResult(True, True, "budget exhausted")
    if a.kind != b.kind:
        return CompareResult(False, False, f"outcome {a.kind} vs {b.kind}")
    if a.trace != b.trace:
        return CompareResult(False, False, "store traces differ")
    if a.bindings != b.bindings:
        return CompareResult(False, False, "final store bindings differ")
    if a.kind == "value" and not _values_agree(a, b):
        return CompareResult(
            False, False,
            f"values {format_value(a.value)} vs {format_value(b.value)}")
    return CompareResult(True, False)


def compare_expr(e: Expr, algos, initial=None,
                 budget: int = DEFAULT_BUDGET) -> dict[ElimAlgo, CompareResult]:
    """Compare each combinator scheme against the classical interpreter.

    The classical side gets a tighter budget: it burns a Python stack
    frame per application, so divergent programs are cut off sooner.
    Combinator terms legitimately spend far more applications per source
    reduction and keep the full budget.
    """
    baseline = observe_classical(e, initial, min(budget, 10_000))
    out = {}
    for algo in algos:
        if baseline.excluded:
            # one exhausted side already excludes the comparison
            out[algo] = CompareResult(True, True, "budget exhausted")
            continue
        got = observe_combinator(e, algo, initial, budget)
        out[algo] = compare_observations(baseline, got)
    return out
