from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from caspr import modules as M
from caspr.ring import BASIS, LAM, ONE, XI, RingElement, embed

small = st.integers(-9, 9)
elements = st.builds(RingElement, small, small, small, small)


def test_indices():
    assert M.index(M.ORDER, M.EDGE_MODULE) == 9
    assert M.index(M.EDGE_MODULE, M.RETURN_MODULE) == 9
    assert M.index(M.ORDER, M.RETURN_MODULE) == 81


def test_edge_and_return_modules_are_ideals():
    assert M.is_ideal(M.EDGE_MODULE)
    assert M.is_ideal(M.RETURN_MODULE)


def test_return_module_two_generators():
    assert M.ideal_generated_by([M.G1, M.G3]) == M.RETURN_MODULE


def test_alternative_descriptions_of_L():
    assert M.module_from_generators(M.RETURN_MODULE_ALT) == M.RETURN_MODULE
    assert M.ideal_generated_by(M.alpha_generators()) == M.RETURN_MODULE
    assert M.module_from_generators([M.G1, M.G2, M.G3, M.G4]) == M.RETURN_MODULE


def test_g2_is_xi_times_g1():
    assert M.G2 == RingElement(1, -2, 2, -1)
    assert abs(embed(M.G2) - embed(XI) * embed(M.G1)) < 1e-12
    assert M.G2_PRINTED != XI * M.G1


def test_L_is_not_principal_among_small_elements():
    # no small element generates L on its own
    for a in range(-2, 3):
        for b in range(-2, 3):
            for c in range(-2, 3):
                for d in range(-2, 3):
                    g = RingElement(a, b, c, d)
                    if g and M.RETURN_MODULE.contains(g):
                        assert M.ideal_generated_by([g]) != M.RETURN_MODULE


def test_maximal_order_chain():
    ok = M.maximal_order()
    assert M.index(ok, M.ORDER) == 3
    assert M.index(M.ORDER, M.i_sqrt3_maximal_order()) == 3


def test_dual_chain():
    lat, o, ok = M.RETURN_MODULE, M.ORDER, M.maximal_order()
    chain = [lat, o, ok, M.dual_module(ok), M.dual_module(o), M.dual_module(lat)]
    assert [M.index(chain[i + 1], chain[i]) for i in range(5)] == [81, 3, 225, 3, 81]


def test_named_duals():
    assert M.dual_module(M.ORDER) == M.order_dual_expected()
    assert M.dual_module(M.maximal_order()) == M.maximal_order_dual_expected()
    assert M.dual_module(M.RETURN_MODULE) == M.return_dual_expected()


def test_dual_pairing_is_integral():
    d = M.dual_module(M.RETURN_MODULE)
    for x in d.basis():
        for y in M.RETURN_MODULE.basis():
            assert M.dual_form(x, y).denominator == 1


def test_double_dual():
    assert M.dual_module(M.dual_module(M.RETURN_MODULE)) == M.RETURN_MODULE


def test_units():
    assert M.unit_check(LAM)
    assert M.unit_check(XI)
    assert not M.unit_check(RingElement(2))


@settings(max_examples=60)
@given(elements)
def test_membership_agrees_with_reduction(x):
    r = M.RETURN_MODULE.reduce(x)
    assert M.RETURN_MODULE.contains(x - r)
    assert M.RETURN_MODULE.contains(x) == (not r)


@settings(max_examples=60)
@given(elements, elements)
def test_ideal_closed_under_multiplication(x, y):
    g = x * M.G1 + y * M.G3
    assert M.RETURN_MODULE.contains(g)


@given(elements)
def test_order_contains_integral_elements(x):
    assert M.ORDER.contains(x)
    assert not M.ORDER.contains(x + RingElement(Fraction(1, 2)))


def test_canonical_form_independent_of_generators():
    a = M.module_from_generators(M.RETURN_MODULE_BASIS)
    b = M.module_from_generators(list(reversed(M.RETURN_MODULE_BASIS)) + [M.G1 + M.G3])
    assert a == b and hash(a) == hash(b)


def test_index_requires_containment():
    with pytest.raises(ValueError):
        M.index(M.RETURN_MODULE, M.ORDER)


def test_order_basis():
    assert M.module_from_generators(BASIS) == M.ORDER
    assert M.ORDER.covolume() == 1 and M.ORDER.contains(ONE)
