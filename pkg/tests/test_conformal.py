from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from fieldalg.conformal import (
    check_conformal_identity,
    classify_presentation,
    derived_bracket,
    jacobi_defect,
    lambda_bracket,
    mode_bracket,
    ModeSum,
    skew_defect,
)
from fieldalg.elements import LambdaPoly, ModuleElement, lambda_integrate
from fieldalg.presets import (
    abelian_presentation,
    corrupted_virasoro_presentation,
    free_boson_presentation,
    virasoro_presentation,
)

BOSON = free_boson_presentation()
VIR = virasoro_presentation(Q(1, 2))


def el(pres, sym, k=0):
    return pres.gen_element(sym, k)


class TestLambdaBracket:
    def test_free_boson_bracket(self):
        p = lambda_bracket(BOSON, el(BOSON, "a"), el(BOSON, "a"))
        assert p == LambdaPoly(BOSON.gens, {1: el(BOSON, "K")})

    def test_sesquilinearity_left(self):
        # (Ta)_lam a = -lam^2 K
        p = lambda_bracket(BOSON, el(BOSON, "a", 1), el(BOSON, "a"))
        assert p == LambdaPoly(BOSON.gens, {2: el(BOSON, "K").scale(-1)})

    def test_central_brackets_vanish(self):
        assert lambda_bracket(BOSON, el(BOSON, "K"), el(BOSON, "a")).is_zero()
        assert lambda_bracket(BOSON, el(BOSON, "a"), el(BOSON, "K")).is_zero()

    def test_undeclared_symbol_rejected(self):
        with pytest.raises(ValueError):
            ModuleElement.gen(BOSON.gens, "w")

    @given(st.integers(0, 3), st.integers(0, 3))
    @settings(max_examples=16, deadline=None)
    def test_translation_rules_on_decorated_elements(self, p, q):
        x = el(VIR, "L", p)
        y = el(VIR, "L", q)
        b = lambda_bracket(VIR, x, y)
        left = lambda_bracket(VIR, x.apply_T(), y)
        assert left == b.shift_lambda(1).scale(-1)
        right = lambda_bracket(VIR, x, y.apply_T())
        assert right == b.shift_lambda(1) + b.map_coeffs(lambda m: m.apply_T())

    @given(st.builds(Q, st.integers(-9, 9), st.integers(1, 4)))
    @settings(max_examples=12, deadline=None)
    def test_bilinearity(self, c):
        x = el(VIR, "L", 1).scale(c) + el(VIR, "L")
        y = el(VIR, "L")
        lhs = lambda_bracket(VIR, x, y)
        rhs = lambda_bracket(VIR, el(VIR, "L", 1), y).scale(c) + lambda_bracket(
            VIR, el(VIR, "L"), y
        )
        assert lhs == rhs


class TestIdentitySweeps:
    def test_virasoro_passes_all(self):
        for kind in ("jacobi", "skewsymmetry", "translation"):
            assert check_conformal_identity(VIR, kind).ok, kind

    def test_free_boson_passes_all(self):
        for kind in ("jacobi", "skewsymmetry", "translation"):
            assert check_conformal_identity(BOSON, kind).ok, kind

    def test_corrupted_virasoro_fails_jacobi_with_witness(self):
        rep = check_conformal_identity(corrupted_virasoro_presentation(), "jacobi")
        assert rep.verdict == "fail"
        assert rep.witness["triple"] == ["L", "L", "L"]

    def test_abelian_passes_all(self):
        pres = abelian_presentation()
        for kind in ("jacobi", "skewsymmetry", "translation"):
            assert check_conformal_identity(pres, kind).ok, kind

    def test_classification(self):
        assert classify_presentation(VIR)[0] == "lie"
        assert classify_presentation(corrupted_virasoro_presentation())[0] == "not-conformal"

    @given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
    @settings(max_examples=10, deadline=None)
    def test_jacobi_on_T_decorated_triples(self, p, q, r):
        # bilinearity extends the generator-triple verdict; spot-check it
        d = jacobi_defect(VIR, el(VIR, "L", p), el(VIR, "L", q), el(VIR, "L", r))
        assert d.is_zero()


class TestDerivedBracket:
    def test_boson_self_bracket_zero(self):
        assert derived_bracket(BOSON, el(BOSON, "a"), el(BOSON, "a")).is_zero()

    def test_virasoro_self_bracket_zero(self):
        assert derived_bracket(VIR, el(VIR, "L"), el(VIR, "L")).is_zero()

    def test_central_zero(self):
        assert derived_bracket(BOSON, el(BOSON, "K"), el(BOSON, "a")).is_zero()

    def test_antisymmetry_on_decorated_pairs(self):
        for p in range(3):
            for q in range(3):
                x, y = el(VIR, "L", p), el(VIR, "L", q)
                assert derived_bracket(VIR, x, y) == -derived_bracket(VIR, y, x)


class TestModeBracket:
    def test_boson_level_one(self):
        ms = mode_bracket(BOSON, "a", 1, "a", -1)
        assert ms == ModeSum({("K", -1): Q(1)})

    def test_zero_mode_commutes(self):
        for n in range(-4, 5):
            assert mode_bracket(BOSON, "a", 0, "a", n).is_zero()

    def test_central_mode_zero(self):
        for m in range(-3, 4):
            assert mode_bracket(BOSON, "K", m, "a", 0).is_zero()

    def test_antisymmetry_within_window(self):
        for pres in (BOSON, VIR):
            sym = pres.gens.free[0]
            for m in range(-4, 5):
                for n in range(-4, 5):
                    lhs = mode_bracket(pres, sym, m, sym, n)
                    rhs = mode_bracket(pres, sym, n, sym, m).scale(-1)
                    assert lhs == rhs, (m, n)

    def test_virasoro_commutation_relations(self):
        # [L_[m], L_[n]] = (m-n) L_[m+n-1] + 6*alpha*C(m,3) C_[-1] delta_{m+n,2}:
        # the T L term gives -(m+n) L_[m+n-1], the 2 lam L term gives 2m L_[m+n-1],
        # and the alpha lam^3 C term contributes C(m,3) * 3! * alpha at mode m+n-3.
        from fieldalg.elements import binom

        for m in range(-3, 4):
            for n in range(-3, 4):
                ms = mode_bracket(VIR, "L", m, "L", n)
                expect = ModeSum()
                expect.add_term("L", m + n - 1, Q(m - n))
                if m + n == 2:
                    expect.add_term("C", -1, Q(binom(m, 3) * 6) * Q(1, 2))
                assert ms == expect, (m, n)


class TestGrading:
    def test_graded_presentations(self):
        assert BOSON.is_graded()
        assert VIR.is_graded()

    def test_weight_rule_violated_by_wrong_weight(self):
        from fieldalg.conformal import ConformalPresentation
        from fieldalg.elements import GeneratorSet

        gens = GeneratorSet(free=("a",), central=("K",), weights={"a": Q(2)})
        table = {("a", "a"): LambdaPoly(gens, {1: ModuleElement.gen(gens, "K")})}
        pres = ConformalPresentation(gens, table, skew=True)
        assert not pres.is_graded()
