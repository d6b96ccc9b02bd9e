from __future__ import annotations

import cmath
import math

import sympy as sp
from hypothesis import given, settings, strategies as st

from caspr import groupring as gr
from caspr.groupring import GroupRingMatrix, Poly6, QXi

coef = st.integers(-4, 4)
polys = st.builds(lambda c: Poly6(tuple(c)), st.lists(coef, min_size=6, max_size=6))
qxi = st.builds(QXi, st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7))


def square(n):
    return st.lists(st.lists(polys, min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: GroupRingMatrix(tuple(tuple(r) for r in rows)))


@given(qxi, qxi)
def test_qxi_field(x, y):
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-9
    if y:
        assert (x / y) * y == x


@given(polys, polys, st.integers(0, 5))
def test_evaluation_is_a_ring_map(p, q, k):
    assert (p * q).evaluate(k) == p.evaluate(k) * q.evaluate(k)
    assert (p + q).evaluate(k) == p.evaluate(k) + q.evaluate(k)


@given(polys, st.integers(0, 5))
def test_bar_is_conjugation(p, k):
    assert p.bar().evaluate(k) == p.evaluate(k).conjugate()


@given(polys, st.integers(-7, 7))
def test_shift(p, m):
    assert p.shift(m) == p * Poly6.from_terms([(1, m)])


@given(polys)
def test_parse_roundtrip(p):
    assert Poly6.parse(str(p)) == p


def test_parse_examples():
    assert Poly6.parse("r^2-r^5") == Poly6.from_terms([(1, 2), (-1, 5)])
    assert Poly6.parse("1") == gr.ONE_POLY
    assert Poly6.parse("0") == gr.ZERO_POLY
    assert Poly6.parse("r^6") == gr.ONE_POLY


@settings(max_examples=30, deadline=None)
@given(square(3), square(3))
def test_integer_expansion_is_multiplicative(a, b):
    ea, eb = gr.expand_integer(a), gr.expand_integer(b)
    prod = [[sum(x * y for x, y in zip(row, col)) for col in zip(*eb)] for row in ea]
    assert gr.expand_integer(a @ b) == prod


@settings(max_examples=25, deadline=None)
@given(square(3), st.integers(0, 5))
def test_charpoly_matches_sympy(m, k):
    ev = gr.evaluate(m, k)
    xi = sp.Rational(1, 2) + sp.sqrt(3) * sp.I / 2
    mat = sp.Matrix(3, 3, lambda i, j: ev.rows[i][j].a + ev.rows[i][j].b * xi)
    t = sp.Symbol("t")
    want = sp.Poly(sp.expand(mat.charpoly(t).as_expr()), t).all_coeffs()[::-1]
    got = gr.charpoly(ev)
    for g, w in zip(got, want):
        assert sp.simplify(g.a + g.b * xi - w) == 0


def test_known_factor_multiplicity():
    f = gr.KNOWN_FACTORS["t^2-8t+1"]
    p = [QXi(1), QXi(-8), QXi(1)]
    sq = [QXi(1), QXi(-16), QXi(66), QXi(-16), QXi(1)]
    assert gr.multiplicity(f, p) == 1
    assert gr.multiplicity(f, sq) == 2
    assert gr.multiplicity(f, [QXi(-1), QXi(1)]) == 0


@settings(max_examples=30, deadline=None)
@given(square(4), st.integers(0, 5))
def test_rank_nullity(m, k):
    ev = gr.evaluate(m, k)
    assert gr.rank(ev) + len(gr.right_kernel(ev)) == 4
    for v in gr.right_kernel(ev):
        assert all(not sum((ev.rows[i][j] * v[j] for j in range(4)), QXi()) for i in range(4))


def test_xi_powers():
    for j, z in enumerate(gr.XI_POWERS):
        assert abs(complex(z) - cmath.exp(1j * math.pi * j / 3)) < 1e-12
