from __future__ import annotations

import pytest

from combterp.classical import Closure, Env
from combterp.compare import (CompareResult, Observation, compare_expr,
                              compare_observations, normalize_value,
                              observe_classical, observe_combinator)
from combterp.elim import ElimAlgo
from combterp.frontend import parse
from combterp.syntax import EVar, VBool, VFun, VInt, VList

ALGOS = list(ElimAlgo)


def check(src, initial=None, budget=200_000):
    return compare_expr(parse(src), ALGOS, initial=initial, budget=budget)


class TestNormalize:
    def test_functions_collapse_to_a_token(self):
        assert normalize_value(VFun(lambda x: x)) == "fun"
        assert normalize_value(Closure("x", EVar("x"), Env())) == "fun"

    def test_ground_values_pass_through(self):
        assert normalize_value(VInt(3)) == VInt(3)
        l = VList((VInt(1), VBool(True)))
        assert normalize_value(l) is l

    def test_lists_holding_functions_normalize_elementwise(self):
        got = normalize_value(VList((VInt(1), VFun(lambda x: x))))
        assert got == (VInt(1), "fun")


class TestObserve:
    def test_classical_value(self):
        obs = observe_classical(parse("1 + 2"))
        assert (obs.kind, obs.value) == ("value", VInt(3))

    def test_combinator_effects_are_observed(self):
        obs = observe_combinator(parse("(t := 4) + !t"), ElimAlgo.C1)
        assert obs.value == VInt(8)
        assert obs.trace == (("set", "t", VInt(4)), ("get", "t", VInt(4)))
        assert obs.bindings == (("t", VInt(4)),)

    def test_outcome_classes(self):
        assert observe_classical(parse("1 2")).kind == "type_error"
        assert observe_classical(parse("!nope")).kind == "unbound_tag"
        omega = parse("(\\w. w w) (\\w. w w)")
        limited = observe_classical(omega, budget=5_000)
        assert limited.kind == "limit" and limited.excluded


class TestCompareObservations:
    def test_agreement(self):
        a = Observation("value", VInt(1))
        assert compare_observations(a, Observation("value", VInt(1))).agree

    def test_kind_mismatch(self):
        r = compare_observations(Observation("value", VInt(1)),
                                 Observation("type_error"))
        assert not r.agree and "outcome" in r.detail

    def test_trace_mismatch(self):
        r = compare_observations(Observation("value", VInt(1),
                                             trace=(("set", "t", VInt(1)),)),
                                 Observation("value", VInt(1)))
        assert not r.agree and "trace" in r.detail

    def test_binding_mismatch(self):
        r = compare_observations(Observation("value", VInt(1),
                                             bindings=(("t", VInt(1)),)),
                                 Observation("value", VInt(1)))
        assert not r.agree and "bindings" in r.detail

    def test_value_mismatch(self):
        r = compare_observations(Observation("value", VInt(1)),
                                 Observation("value", VInt(2)))
        assert not r.agree and "values" in r.detail

    def test_functions_agree_as_a_class(self):
        a = Observation("value", VFun(lambda x: x))
        b = Observation("value", Closure("x", EVar("x"), Env()))
        assert compare_observations(a, b).agree

    def test_excluded_sides_never_disagree(self):
        r = compare_observations(Observation("limit"),
                                 Observation("value", VInt(1)))
        assert r.agree and r.excluded


class TestCompareExpr:
    @pytest.mark.parametrize("src,initial", [
        ("((\\x. x + 1) 41)", None),
        ("((\\d. !t) (t := 4)) + !t", {"t": VInt(0)}),
        ("if 1 then 2 else 3 fi", None),          # type error on both sides
        ("1 + !missing", None),                   # unbound tag on both sides
        ("\\x. x", None),                         # function-valued result
        ("((filter (\\x. 2 <= x)) [1, 2, 3])", None),
    ])
    def test_hand_programs_agree(self, src, initial):
        for algo, r in check(src, initial).items():
            assert r.agree and not r.excluded, (algo, r.detail)

    def test_divergence_is_excluded(self):
        for r in check("(\\w. w w) (\\w. w w)", budget=20_000).values():
            assert r.excluded and r.agree
