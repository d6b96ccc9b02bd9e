from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from caspr import inflation as I
from caspr import reprojection as rp
from caspr.modules import EDGE_MODULE
from caspr.ring import RingElement
from caspr.tiles import EDGE_TYPES, EDGE_VECTORS


@pytest.fixture(scope="module")
def maps():
    return {name: build() for name, build in rp.PRESETS.items()}


@pytest.fixture(scope="module")
def small():
    return I.generate_patch("Gamma", 2)


def test_presets_are_consistent_and_integral(maps):
    for m in maps.values():
        assert rp.consistency_residuals(m) == []
        assert m.denominator() == 1
        assert m.constraints == 45


def test_hex_needs_vertex_offsets_metatile_does_not(maps):
    assert maps["hex"].offsets
    assert not maps["metatile"].offsets
    with pytest.raises(rp.InconsistentMap):
        rp.solve_reprojection("hex", maps["hex"].targets, allow_offsets=False)


def test_hex_offsets_gauge(maps):
    s = [maps["hex"].vertex_offset(("s", j)) for j in range(6)]
    assert sum(z[0] for z in s) == 0 and sum(z[1] for z in s) == 0


def test_metatile_rule(maps):
    m = maps["metatile"]
    for t in EDGE_TYPES:
        x, y = rp.split_lam(EDGE_VECTORS[t])
        assert m.image(EDGE_VECTORS[t]) == (x[0] + 8 * y[0], x[1] + 8 * y[1])


@settings(max_examples=50)
@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
def test_split_lam_recombines(a, b, c, d):
    z = RingElement(a, b, c, d)
    x, y = rp.split_lam(z)
    assert x == (Fraction(a), Fraction(b)) and y == (Fraction(c), Fraction(d))


@settings(max_examples=50)
@given(st.lists(st.integers(-6, 6), min_size=4, max_size=4), st.lists(st.integers(-6, 6), min_size=4, max_size=4))
def test_maps_are_additive(maps, u, v):
    x, y = RingElement(*u), RingElement(*v)
    for m in maps.values():
        a, b, c = m.image(x), m.image(y), m.image(x + y)
        assert c == (a[0] + b[0], a[1] + b[1])


def test_kernel_is_annihilated(maps):
    basis = EDGE_MODULE.basis()
    for m in maps.values():
        ker = m.kernel()
        assert len(ker) == 2
        for row in ker:
            z = sum((b * int(k) for b, k in zip(basis, row)), RingElement())
            assert m.image(z) == (0, 0)


def test_hex_tiles_are_regular(maps, patch4):
    d = rp.reproject(patch4, maps["hex"])
    assert all(rp.is_regular_hexagon(list(v), 1e-6) for v in d.vertices)
    side = np.abs(np.diff(d.vertices[:, :2], axis=1))
    assert np.allclose(side, np.sqrt(rp.HEX_SIDE_SQUARED))


def test_reproject_agrees_with_combinatorial_walk(maps, small):
    for m in maps.values():
        pos = rp.target_tiling(small, m)
        vc = small.vertex_coords()
        want = np.array([[m.scale * rp._qcomplex(pos[tuple(int(x) for x in vc[i, k])]) for k in range(6)]
                         for i in range(len(small))])
        assert np.allclose(rp.reproject(small, m).vertices, want, atol=1e-9)


def test_control_points_agree(maps, small):
    for m in maps.values():
        assert sorted(rp.reprojected_control_points(small, m)) == sorted(rp.target_control_points(small, m))


def test_hex_lattice_coords(maps, small):
    lc = maps["hex"].lattice_coords(small.vertex_coords())
    assert lc.dtype.kind == "i" and lc.shape == (len(small), 6, 2)


def test_metatile_is_closer(maps, patch4):
    assert rp.shape_displacement(patch4, maps["metatile"]) < rp.shape_displacement(patch4, maps["hex"])


def test_identity_map_has_no_displacement(small):
    ident = rp.identity_reprojection()
    assert rp.shape_displacement(small, ident) < 1e-9
    assert rp.mean_displacement(small, ident) < 1e-9
    raw = rp.RawReprojection("raw", 2 * ident.complex_images())
    assert np.allclose(rp.reproject(small, raw).vertices, 2 * small.vertices_complex())


def test_regular_hexagon_oracle():
    hexagon = [np.exp(1j * np.pi * k / 3) for k in range(6)]
    assert rp.is_regular_hexagon(hexagon)
    assert not rp.is_regular_hexagon([1.1 * hexagon[0]] + hexagon[1:])
