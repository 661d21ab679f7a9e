from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from muinv.errors import DomainError
from muinv.forms import compose, discriminant, form_order, form_power, identity_form, reduce_form, reduce_with_matrix
from muinv.numberfield import reduced_forms

DISCS = [-23, -47, -56, -84, -104, -231, -971, -3299]


def evaluate(form, x, y):
    a, b, c = form
    return a * x * x + b * x * y + c * y * y


def represented(form, bound=60):
    return {evaluate(form, x, y) for x, y in product(range(-bound, bound + 1), repeat=2)} - {0}


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 200), st.integers(-200, 200), st.integers(1, 200))
def test_reduction_preserves_the_form(a, b, c):
    if b * b - 4 * a * c >= 0:
        with pytest.raises(DomainError):
            reduce_with_matrix((a, b, c))
        return
    (A, B, C), M = reduce_with_matrix((a, b, c))
    assert B * B - 4 * A * C == b * b - 4 * a * c
    assert -A < B <= A <= C
    assert M[0][0] * M[1][1] - M[0][1] * M[1][0] == 1
    for x, y in [(1, 0), (0, 1), (2, -3), (5, 7)]:
        X, Y = M[0][0] * x + M[0][1] * y, M[1][0] * x + M[1][1] * y
        assert evaluate((A, B, C), x, y) == evaluate((a, b, c), X, Y)


@pytest.mark.parametrize("D", DISCS)
def test_composition_is_a_group_law(D):
    forms = reduced_forms(D)
    e = identity_form(D)
    assert e in forms
    fs = forms[:8]
    for f in fs:
        assert compose(f, e) == f
        a, b, c = f
        assert compose(f, (a, -b, c)) == e
        for g in fs:
            assert compose(f, g) == compose(g, f)
            assert discriminant(compose(f, g)) == D
            for h in fs[:3]:
                assert compose(compose(f, g), h) == compose(f, compose(g, h))


@pytest.mark.parametrize("D", [-23, -47, -56])
def test_composition_respects_representation(D):
    # f * g represents products of values represented by f and g
    forms = reduced_forms(D)
    for f in forms:
        for g in forms:
            fg = compose(f, g)
            rep = represented(fg, 40)
            vf, vg = sorted(represented(f, 6))[:3], sorted(represented(g, 6))[:3]
            assert any(x * y in rep for x in vf for y in vg)


def test_class_group_of_minus_3299():
    D = -3299
    forms = reduced_forms(D)
    assert len(forms) == 27
    orders = sorted(form_order(f, 27) for f in forms)
    # Z/3 x Z/9: one identity, 8 elements of order 3, 18 of order 9
    assert orders.count(1) == 1 and orders.count(3) == 8 and orders.count(9) == 18


def test_cyclic_group_of_minus_47():
    forms = reduced_forms(-47)
    assert sorted(form_order(f, 5) for f in forms) == [1, 5, 5, 5, 5]
    f = (2, 1, 6)
    assert form_power(f, 5) == identity_form(-47)
    assert form_power(f, 3) == reduce_form(compose(compose(f, f), f))


def test_form_order_bound():
    with pytest.raises(DomainError):
        form_order((2, 1, 6), 3)


def test_reduced_forms_rejects_bad_discriminants():
    for D in (5, -2, -5):
        with pytest.raises(DomainError):
            reduced_forms(D)
