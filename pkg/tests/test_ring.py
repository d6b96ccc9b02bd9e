"""Exact arithmetic in Q(xi, lam), checked against sympy and the complex embedding."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from caspr.ring import (BASIS, I_SQRT3, I_SQRT5, LAM, ONE, SQRT_15, XI, RealQuadratic, RingElement,
                        conj, dual_form, embed, embed_internal, norm, star, xi_power)

small = st.integers(-20, 20)
fractions = st.fractions(min_value=-10, max_value=10, max_denominator=12)
elements = st.builds(RingElement, small, small, small, small)
rational_elements = st.builds(RingElement, fractions, fractions, fractions, fractions)

# sympy oracle: xi = exp(i pi/3), lam = 4 + sqrt 15
S_XI = sp.Rational(1, 2) + sp.sqrt(3) * sp.I / 2
S_LAM = 4 + sp.sqrt(15)


def to_sympy(x: RingElement):
    a, b, c, d = (sp.Rational(q.numerator, q.denominator) for q in x.coords)
    return a + b * S_XI + c * S_LAM + d * S_LAM * S_XI


def close(z: complex, w: complex, tol: float = 1e-9) -> bool:
    return abs(z - w) <= tol * max(1.0, abs(z), abs(w))


def test_defining_relations():
    assert XI * XI == XI - 1
    assert LAM * LAM == LAM.scale(8) - 1
    assert xi_power(6) == ONE
    assert I_SQRT3 * I_SQRT3 == RingElement(-3)
    assert SQRT_15 * SQRT_15 == RingElement(15)
    assert I_SQRT5 * I_SQRT5 == RingElement(-5)


@given(elements, elements)
def test_product_matches_sympy(x, y):
    got = to_sympy(x * y)
    want = sp.expand(to_sympy(x) * to_sympy(y))
    assert sp.simplify(got - want) == 0


@given(rational_elements, rational_elements)
def test_embedding_is_a_ring_map(x, y):
    assert close(embed(x * y), embed(x) * embed(y))
    assert close(embed(x + y), embed(x) + embed(y))
    assert close(embed_internal(x * y), embed_internal(x) * embed_internal(y))


@given(elements)
def test_conj_and_star_are_involutive_automorphisms(x):
    assert conj(conj(x)) == x
    assert star(star(x)) == x
    assert close(embed(conj(x)), embed(x).conjugate())
    assert close(embed(star(x)), embed_internal(x))


@given(elements, elements)
def test_star_multiplicative(x, y):
    assert star(x * y) == star(x) * star(y)


@given(rational_elements)
def test_inverse(x):
    if not x:
        return
    assert x * x.inverse() == ONE


@given(elements, elements)
def test_norm_multiplicative(x, y):
    assert norm(x * y) == norm(x) * norm(y)


@given(elements)
def test_norm_matches_embeddings(x):
    # product over the four embeddings: |embed|^2 |embed_internal|^2
    n = abs(embed(x)) ** 2 * abs(embed_internal(x)) ** 2
    assert math.isclose(float(norm(x)), n, rel_tol=1e-9, abs_tol=1e-6)


@given(elements, elements)
def test_dual_form_symmetric_and_rational(x, y):
    v = dual_form(x, y)
    assert isinstance(v, Fraction)
    assert v == dual_form(y, x)


def test_dual_form_is_standard_inner_product_of_lifts():
    for x in BASIS:
        for y in BASIS:
            zx, zy = embed(x), embed(y)
            wx, wy = embed_internal(x), embed_internal(y)
            want = (zx.conjugate() * zy).real + (wx.conjugate() * wy).real
            assert math.isclose(float(dual_form(x, y)), want, abs_tol=1e-12)


def test_xi_is_sixth_root_of_unity():
    assert close(embed(XI), cmath.exp(1j * math.pi / 3))
    assert close(embed_internal(XI), cmath.exp(-1j * math.pi / 3))


@given(st.integers(-30, 30), st.integers(-30, 30))
def test_real_quadratic_field(p, q):
    x = RealQuadratic(p, q)
    assert math.isclose(float(x), p + q * (4 + math.sqrt(15)), rel_tol=1e-12, abs_tol=1e-9)
    if p or q:
        assert x * x.inverse() == RealQuadratic(1)
    assert x.conjugate().conjugate() == x


@settings(max_examples=50)
@given(elements)
def test_real_part(x):
    assert math.isclose(float(x.real_part()), embed(x).real, rel_tol=1e-9, abs_tol=1e-9)


def test_non_integral_coordinates_rejected():
    with pytest.raises(ValueError):
        RingElement(Fraction(1, 2)).int_coords()
