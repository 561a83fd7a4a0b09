from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from fieldalg.series import (
    Rect,
    TruncSeries1,
    TruncSeries2,
    Window,
    delta_series,
    delta_z_derivative,
    expand_binomial,
)

R = Rect(Window(-8, 8), Window(-8, 8))


def test_geometric_expansion_of_inverse():
    # i_{x,z} (x-z)^{-1} = sum_{j>=0} x^{-1-j} z^j
    s = expand_binomial(-1, "x>z", R)
    for j in range(0, 8):
        assert s.coeff(-1 - j, j) == 1
    assert s.coeff(0, 0) == 0
    assert s.coeff(2, 1) == 0


def test_delta_is_difference_of_expansions():
    a = expand_binomial(-1, "x>z", R)
    b = expand_binomial(-1, "z>x", R)
    d = delta_series(R)
    for i, j in R.cells():
        assert a.coeff(i, j) - b.coeff(i, j) == d.coeff(i, j)


def test_polynomial_case_is_domain_independent():
    a = expand_binomial(2, "x>z", R)
    b = expand_binomial(2, "z>x", R)
    # x^2 - 2xz + z^2 in both domains
    for i, j in R.cells():
        assert a.coeff(i, j) == b.coeff(i, j)
    assert a.coeff(2, 0) == 1 and a.coeff(1, 1) == -2 and a.coeff(0, 2) == 1


@pytest.mark.parametrize("n", [-1, -2, -3, -4, -5])
def test_expansion_difference_is_delta_derivative(n):
    # i_{x,z}(x-z)^n - i_{z,x}(x-z)^n = d_z^{-n-1} delta(x-z) / (-n-1)!
    a = expand_binomial(n, "x>z", R)
    b = expand_binomial(n, "z>x", R)
    d = delta_z_derivative(-n - 1, R)
    for i, j in R.cells():
        assert a.coeff(i, j) - b.coeff(i, j) == d.coeff(i, j)


def test_domain_mismatch_rejected():
    a = expand_binomial(-1, "x>z", R)
    b = expand_binomial(-1, "z>x", R)
    with pytest.raises(ValueError):
        _ = a + b


@given(st.integers(-4, 4))
@settings(max_examples=20)
def test_window_soundness_under_enlargement(n):
    # recomputing on a strictly larger window agrees on the smaller one
    small = Rect(Window(-4, 4), Window(-4, 4))
    big = Rect(Window(-9, 9), Window(-9, 9))
    s1 = expand_binomial(n, "x>z", small)
    s2 = expand_binomial(n, "x>z", big)
    for i, j in small.cells():
        assert s1.coeff(i, j) == s2.coeff(i, j)


def test_series1_product_exact_window():
    w = Window(-6, 6)
    # f = sum_{j >= 0} z^{-1-j}  (expansion of (z-w)^{-1}-style tail), true
    # support bounded above by -1
    f = TruncSeries1("z", w, {-1 - j: Q(1) for j in range(0, 7)}, support_hi=-1, support_lo=None)
    g = TruncSeries1("z", w, {0: Q(1), 1: Q(-1)}, support_lo=0, support_hi=1)
    prod = f * g
    # (sum_{j>=0} z^{-1-j}) * (1 - z) telescopes to -1
    assert prod.coeff(0) == -1
    assert prod.coeff(-1) == 0
    assert prod.coeff(1) == 0
    # entries too close to the unknown tail of f are not certified
    with pytest.raises(KeyError):
        prod.coeff(-8)


def test_series1_product_against_larger_window():
    w1 = Window(-5, 5)
    w2 = Window(-9, 9)
    fa = TruncSeries1("z", w1, {-1 - j: Q(j + 1) for j in range(0, 6)}, support_hi=-1)
    fb = TruncSeries1("z", w2, {-1 - j: Q(j + 1) for j in range(0, 10)}, support_hi=-1)
    g = TruncSeries1("z", w1, {1: Q(2), 2: Q(3)}, support_lo=1, support_hi=2)
    p1 = fa * g
    p2 = fb * g
    for e in p1.window.range():
        assert p1.coeff(e) == p2.coeff(e)
