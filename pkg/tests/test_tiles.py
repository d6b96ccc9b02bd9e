from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from caspr import tiles as T
from caspr.inflation import control_points, frequency_vector
from caspr.modules import EDGE_MODULE, RETURN_MODULE, module_from_generators
from caspr.ring import RealQuadratic, RingElement, xi_power


@pytest.mark.parametrize("tile", T.TILE_TYPES)
def test_tiles_close_and_are_simple(tile):
    assert not T.closure(tile)
    assert T.COMBHEX[tile].vertices_consistent()
    for m in range(6):
        assert T.is_simple(T.tile_polygon(tile, m))


@pytest.mark.parametrize("tile", T.TILE_TYPES)
def test_area_rotation_and_reflection_invariant(tile):
    a = T.area(tile)
    for m in range(6):
        assert T.area(T.tile_polygon(tile, m)) == a
    assert T.area(T.mirror(T.tile_polygon(tile))) == a
    assert math.isclose(T.area_float(tile), float(a) * math.sqrt(3), rel_tol=1e-12)


def test_average_area():
    f = frequency_vector()
    avg = sum((fi * T.area(t) for fi, t in zip(f, T.TILE_TYPES)), RealQuadratic())
    assert avg == RealQuadratic(90)


def test_edge_vectors_span_edge_module():
    assert module_from_generators(T.EDGE_VECTORS.values()) == EDGE_MODULE


@given(st.sampled_from(T.EDGE_TYPES), st.integers(-12, 12))
def test_edge_label_rotation(edge, m):
    lab = T.EdgeLabel(edge, 0, 1)
    assert lab.rotated(m).vector() == T.EDGE_VECTORS[edge] * xi_power(m)
    assert lab.reversed().vector() == -lab.vector()


def test_eta_has_three_orientations():
    assert T.ORIENTATIONS["eta"] == 3
    assert T.edge_vector("eta", 3) == -T.edge_vector("eta", 0)


def test_simplicity_oracle_basics():
    hexagon = [cmath.exp(1j * math.pi * k / 3) for k in range(6)]
    assert T.is_simple(hexagon)
    assert not T.is_simple([0, 1, 1j, 1 + 1j])


def test_spectre_hat_chevron():
    spectre = T.build_tile_ab(1, 1)
    hat = T.build_tile_ab(1, math.sqrt(3))
    chevron = T.build_tile_ab(0, 1)
    assert len(spectre) == 14
    assert T.is_simple(spectre) and T.is_simple(hat) and T.is_simple(chevron)
    # all Spectre edges have unit length
    steps = np.diff(np.array(spectre + spectre[:1]))
    assert np.allclose(np.abs(steps), 1)


@settings(max_examples=40)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_tile_ab_closes(a, b):
    if abs(a) + abs(b) < 1e-6:
        return
    pts = T.build_tile_ab(a, b)
    assert len(pts) == 14


def test_tile_ab_can_self_intersect():
    # a rotated a quarter turn against b gives a figure-8 boundary
    t = T.first_nonsimple_ratio(np.linspace(0.01, 4, 400), 1.0, 1j)
    assert t is not None
    assert not T.is_simple(T.build_tile_ab(t * 1j, 1))
    assert T.first_nonsimple_ratio(np.linspace(0.01, 4, 400)) is None


def test_degenerate_tile_rejected():
    with pytest.raises(ValueError):
        T.build_tile_ab(0, 0)


@pytest.mark.parametrize("anchor", T.ANCHORS)
def test_control_offsets_reproduce(anchor):
    assert T.choose_control_offset(anchor) == T.CONTROL_OFFSETS[anchor]


@pytest.mark.parametrize("anchor", T.ANCHORS)
def test_control_point_inside_cluster(anchor):
    z = T.CONTROL_OFFSETS[anchor].embed()
    assert any(T._inside(z, poly) for poly in T.cluster_polygons(anchor))


def test_control_points_in_one_L_orbit(patch4):
    coords, _, _ = control_points(patch4)
    base = RingElement(*(int(x) for x in coords[0]))
    rng = np.random.default_rng(0)
    for i in rng.choice(len(coords), 1000, replace=False):
        d = RingElement(*(int(x) for x in coords[i])) - base
        assert RETURN_MODULE.contains(d)


def test_reference_offsets():
    for anchor, members in T.CLUSTER_MEMBERS.items():
        for name, rho, off in members:
            r, is_anchor = T.reference_offset(name)
            assert is_anchor == (name == anchor)
            assert r == (T.CONTROL_OFFSETS[anchor] - off) * xi_power(-rho)


def test_unknown_tile():
    with pytest.raises(ValueError):
        T.tile_polygon("Omega")
