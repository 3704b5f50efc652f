from __future__ import annotations

import functools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combterp import externs
from combterp.elim import (CbvViolation, ElimAlgo, check_no_var, elim,
                           find_cbv_violations, hand_combinator,
                           make_combinators, pre_eval_app, transform)
from combterp.errors import UnexpectedNodeError
from combterp.eval import eval as meval
from combterp.frontend import parse
from combterp.purify import FUN_IF, PurifyCtx, purify
from combterp.quickgen import GenConfig, gen_expr
from combterp.runtime import apply_value
from combterp.store import Store
from combterp.syntax import (MApp, MConst, PAbs, PApp, PConst, PVar, VBool,
                             VFun, VInt, count_apps)

REG = externs.registry()
PLUS = REG["plus"].value
MINUS = REG["minus"].value
TIMES = REG["times"].value
LEQ = REG["leq"].value
EQ = REG["eq"].value


def app(*vs):
    return functools.reduce(apply_value, vs)


def defs_for(algo):
    return make_combinators(algo)


class TestRosters:
    def test_fab(self):
        assert set(defs_for(ElimAlgo.FAB)) == {"I", "K", "S"}

    def test_c1_adds_selectives_and_conditional(self):
        assert set(defs_for(ElimAlgo.C1)) == {"I", "K", "S", "B", "C", "N", "S_IF"}

    def test_c2_adds_multi_arity_families(self):
        names = set(defs_for(ElimAlgo.C2))
        assert {"S_2", "S^2", "S_2^2", "K^2", "I^2", "S_IF^2"} <= names
        assert {"S_2[110]", "S_2[000]", "S^2[01]", "S^2[00]"} <= names
        assert len(names) == 23

    def test_metadata_is_consistent(self):
        for d in defs_for(ElimAlgo.C2).values():
            meta = d.value.meta
            assert meta.comb_id == d.comb_id
            assert meta.total_arity == d.total_arity
            assert meta.args_seen == 0 and meta.pure
            if d.mask is not None:
                assert d.total_arity == len(d.mask) + d.n_abs


class TestCombinatorBehavior:
    def setup_method(self):
        self.d = defs_for(ElimAlgo.C2)

    def v(self, name):
        return self.d[name].value

    def test_identity(self):
        assert app(self.v("I"), VInt(3)) == VInt(3)

    def test_projection(self):
        assert app(self.v("K"), VInt(1), VInt(2)) == VInt(1)
        assert app(self.v("K^2"), VInt(1), VInt(2), VInt(3)) == VInt(1)
        assert app(self.v("I^2"), VInt(1), VInt(2)) == VInt(1)

    def test_s_distributes_to_both_branches(self):
        # S f g x = (f x) (g x)
        assert app(self.v("S"), PLUS, self.v("I"), VInt(3)) == VInt(6)

    def test_b_composes(self):
        inc = app(PLUS, VInt(1))
        double = app(TIMES, VInt(2))
        assert app(self.v("B"), inc, double, VInt(5)) == VInt(11)

    def test_c_flips(self):
        assert app(self.v("C"), MINUS, VInt(1), VInt(10)) == VInt(9)

    def test_n_ignores_the_argument(self):
        assert app(self.v("N"), app(PLUS, VInt(2)), VInt(3), VBool(True)) == VInt(5)

    def test_s_if_selects_a_branch(self):
        small = app(self.v("C"), LEQ, VInt(5))  # x <= 5
        inc = app(PLUS, VInt(1))
        double = app(TIMES, VInt(2))
        assert app(self.v("S_IF"), small, inc, double, VInt(3)) == VInt(4)
        assert app(self.v("S_IF"), small, inc, double, VInt(10)) == VInt(20)

    def test_s_2_distributes_over_a_double_application(self):
        # S_2 a b c x = ((a x) (b x)) (c x)
        const_plus = app(self.v("K"), PLUS)
        i = self.v("I")
        assert app(self.v("S_2"), const_plus, i, i, VInt(7)) == VInt(14)

    def test_two_abstraction_spine(self):
        # S_2^2 a b c x y = ((a x y) (b x y)) (c x y)
        const_plus = app(self.v("K^2"), PLUS)
        first = self.v("I^2")
        second = app(self.v("K"), self.v("I"))
        assert app(self.v("S_2^2"), const_plus, first, second,
                   VInt(3), VInt(4)) == VInt(7)

    def test_selective_two_abstraction(self):
        # S^2[01] a b x y = a (b x y); a is never distributed over
        inc = app(PLUS, VInt(1))
        assert app(self.v("S^2[01]"), inc, self.v("I^2"), VInt(6), VInt(0)) == VInt(7)


def run_surface(src, algo, **kw):
    ctx = PurifyCtx(Store())
    return meval(transform(purify(parse(src), ctx), algo, **kw))


class TestTransform:
    @pytest.mark.parametrize("algo", list(ElimAlgo))
    def test_identity_function(self, algo):
        m = transform(PAbs("x", PVar("x")), algo)
        assert meval(MApp(m, MConst(VInt(7)))) == VInt(7)

    @pytest.mark.parametrize("algo", list(ElimAlgo))
    def test_two_argument_projection(self, algo):
        m = transform(PAbs("x", PAbs("y", PVar("x"))), algo)
        assert meval(MApp(MApp(m, MConst(VInt(1))), MConst(VInt(2)))) == VInt(1)

    @pytest.mark.parametrize("algo", list(ElimAlgo))
    def test_surface_program(self, algo):
        assert run_surface("((\\x. x + 1) 41)", algo) == VInt(42)
        assert run_surface("((\\x. \\y. x - y) 10) 3", algo) == VInt(7)
        assert run_surface("(\\x. if x <= 2 then x else 0 fi) 2", algo) == VInt(2)

    def test_check_no_var_rejects_leftovers(self):
        with pytest.raises(UnexpectedNodeError):
            check_no_var(PVar("x"))
        with pytest.raises(UnexpectedNodeError):
            check_no_var(PApp(PConst(VInt(1)), PAbs("x", PVar("x"))))

    @settings(deadline=None)
    @given(st.integers(0, 1_000), st.sampled_from(list(ElimAlgo)))
    def test_random_programs_fully_eliminate(self, seed, algo):
        p = purify(gen_expr(GenConfig(seed=seed)), PurifyCtx(Store()))
        transform(p, algo)  # raises if a variable or binder survives


class TestPreEval:
    def test_folds_a_partial_pure_application(self):
        out = pre_eval_app(PApp(PConst(PLUS), PConst(VInt(2))))
        match out:
            case PConst(VFun() as f):
                assert f.meta.comb_id == "plus"
                assert f.meta.args_seen == 1
            case _:
                pytest.fail(f"not folded: {out!r}")

    def test_never_folds_the_last_argument(self):
        out = pre_eval_app(PApp(PApp(PConst(PLUS), PConst(VInt(1))),
                                PConst(VInt(2))))
        match out:
            case PApp(PConst(VFun() as f), PConst(VInt(2))):
                assert f.meta.args_seen == 1
            case _:
                pytest.fail(f"unexpected shape: {out!r}")

    def test_never_folds_impure_functions(self):
        e = PApp(PConst(FUN_IF), PConst(VBool(True)))
        assert pre_eval_app(e) == e

    def test_never_folds_unannotated_functions(self):
        e = PApp(PConst(VFun(lambda x: x)), PConst(VInt(1)))
        assert pre_eval_app(e) == e

    def test_declines_when_the_wrapper_rejects(self):
        # = on a function argument is an error; it must fire at run time
        e = PApp(PConst(EQ), PConst(VFun(lambda x: x)))
        assert pre_eval_app(e) == e

    def test_default_on_for_c1_off_for_fab(self):
        p = PAbs("x", PAbs("y", PVar("x")))
        assert count_apps(elim(p, ElimAlgo.C1)) == 0
        assert count_apps(elim(p, ElimAlgo.FAB)) > 0
        assert count_apps(elim(p, ElimAlgo.C1, pre_eval=False)) > 0


class TestHandCombinators:
    def test_k_c(self):
        m = check_no_var(hand_combinator("K_c", VInt(3)))
        assert meval(MApp(m, MConst(VBool(False)))) == VInt(3)

    def test_b_c(self):
        inc = app(PLUS, VInt(1))
        v = app(hand_combinator("B_c", inc).value, app(TIMES, VInt(2)), VInt(5))
        assert v == VInt(11)

    def test_c_c(self):
        v = app(hand_combinator("C_c", VInt(1)).value, MINUS, VInt(10))
        assert v == VInt(9)

    def test_n_c1c2(self):
        v = app(hand_combinator("N_c1c2", app(PLUS, VInt(2)), VInt(3)).value,
                VBool(True))
        assert v == VInt(5)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            hand_combinator("X_c", VInt(1))

    @pytest.mark.parametrize("src,arg,want", [
        ("\\x. 3", VInt(0), VInt(3)),                  # K_c
        ("\\x. 1 + x", VInt(5), VInt(6)),              # B_c
        ("\\x. x - 1", VInt(5), VInt(4)),              # C_c
    ])
    def test_hand_elimination_agrees_with_plain(self, src, arg, want):
        p = purify(parse(src), PurifyCtx(Store()))
        for pre in (False, True):
            plain = transform(p, ElimAlgo.C1, pre_eval=pre, hand=False)
            handy = transform(p, ElimAlgo.C1, pre_eval=pre, hand=True)
            assert meval(MApp(plain, MConst(arg))) == want
            assert meval(MApp(handy, MConst(arg))) == want


class TestCbvDiscipline:
    @settings(deadline=None, max_examples=60)
    @given(st.integers(0, 2_000), st.sampled_from(list(ElimAlgo)),
           st.booleans())
    def test_transform_output_is_clean(self, seed, algo, pre):
        p = purify(gen_expr(GenConfig(seed=seed)), PurifyCtx(Store()))
        assert find_cbv_violations(elim(p, algo, pre_eval=pre)) == []

    def test_detects_a_planted_violation(self):
        k = defs_for(ElimAlgo.FAB)["K"].value
        bad_arg = MApp(MConst(PLUS), MConst(VInt(1)))
        found = find_cbv_violations(MApp(MApp(MConst(k), bad_arg),
                                         MConst(VInt(0))))
        assert [(v.comb_id, v.position) for v in found] == [("K", 0)]

    def test_distributed_positions_may_hold_applications(self):
        s = defs_for(ElimAlgo.FAB)["S"].value
        arg = MApp(MConst(PLUS), MConst(VInt(1)))
        assert find_cbv_violations(MApp(MApp(MConst(s), arg), arg)) == []

    def test_partially_applied_heads_are_skipped(self):
        k1 = app(defs_for(ElimAlgo.FAB)["K"].value, VInt(0))
        arg = MApp(MConst(PLUS), MConst(VInt(1)))
        assert find_cbv_violations(MApp(MConst(k1), arg)) == []
