from __future__ import annotations

import io
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from caspr import cps
from caspr import inflation as I
from caspr.modules import RETURN_MODULE, return_dual_expected
from caspr.ring import LAM_F, RealQuadratic, RingElement, xi_power
from caspr.tiles import ANCHORS, TILE_TYPES, reference_offset

SQRT3 = math.sqrt(3)


@pytest.fixture(scope="module")
def ifs():
    return cps.build_ifs()


def test_covolume_three_ways():
    assert cps.covolume() == 3645
    assert cps.RETURN_LATTICE.covolume() == 3645
    assert math.isclose(cps.RETURN_LATTICE.covolume_float(), 3645, rel_tol=1e-12)
    assert cps.covolume_factorization() == 3645


def test_dual_lattice_is_inverse_transpose():
    lat = cps.RETURN_LATTICE
    assert np.allclose(lat.matrix() @ lat.dual().T, np.eye(4), atol=1e-10)


def test_fourier_module_two_routes():
    assert cps.fourier_module_from_lattice() == return_dual_expected()
    assert cps.fourier_module() == return_dual_expected()


def test_short_vectors_match_brute_force():
    b = np.array([cps.lift(g) for g in cps.fourier_module().basis()])
    bound = 0.02
    got = set(cps._short_vectors(b, bound))
    inv = np.linalg.inv(b)
    box = np.floor(np.abs(inv).T @ np.full(4, math.sqrt(bound))).astype(int)
    want = {c for c in itertools.product(*[range(-k, k + 1) for k in box])
            if float(np.sum((np.array(c) @ b) ** 2)) <= bound}
    assert got == want and len(want) > 1


def test_bragg_support():
    peaks = cps.bragg_support(0.3)
    assert cps.closed_under_rotation(peaks)
    assert RingElement() in peaks
    assert peaks == cps.bragg_support(0.3)
    for k in peaks:
        assert return_dual_expected().contains(k)
        assert abs(k.embed()) <= 0.3 + 1e-9 and abs(k.embed_internal()) <= 0.3 + 1e-9
    with pytest.raises(ValueError):
        cps.bragg_support(0)


def test_window_area_convention():
    wa = cps.window_area()
    assert wa.matching == "physical"
    assert wa.physical == RealQuadratic(8, -1) * 135 * RealQuadratic(1, 0) / 2
    assert wa.internal != wa.expected


def test_density_report():
    d = cps.density_report()
    assert d.equal
    assert d.rho1 == RealQuadratic(8, -1) / 54
    assert math.isclose(float(d.rho1) * SQRT3, 0.004074061, rel_tol=1e-6)
    assert "rho1 == rho2: True" in d.format()


def test_empirical_density(patch6):
    emp, n = cps.patch_density(patch6, 6, "Gamma")
    rho = float(cps.density_report().rho1) * SQRT3
    assert n > 1000
    assert abs(emp - rho) / rho < 0.01


def test_incoming_weights_are_stochastic(ifs):
    sums = np.zeros(6 * len(TILE_TYPES))
    np.add.at(sums, ifs.target, ifs.weights)
    assert np.allclose(sums, 1.0)


def test_contraction(ifs):
    assert math.isclose(ifs.contraction ** 2, 8 - LAM_F, rel_tol=1e-12)


def test_ifs_maps_are_the_inflation_on_internal_space(ifs):
    levels = I.generate_patch("Psi", 3, history=True)
    parent, child = levels[-2], levels[-1]
    ref = {t: reference_offset(t)[0] for t in TILE_TYPES}

    def star_point(p, i):
        t = TILE_TYPES[p.types[i]]
        return (p.position(i) + xi_power(int(p.rots[i])) * ref[t]).embed_internal()

    rng = np.random.default_rng(3)
    for i in rng.choice(len(child), 200, replace=False):
        j = int(child.parents[i])
        u, v = 6 * int(parent.types[j]) + int(parent.rots[j]), 6 * int(child.types[i]) + int(child.rots[i])
        s = star_point(parent, j)
        images = ifs.a * np.conj(s) + ifs.offsets[(ifs.source == u) & (ifs.target == v)]
        assert np.min(np.abs(images - star_point(child, i))) < 1e-9


def test_chaos_determinism_and_seed_dependence():
    a = cps.chaos_game(5000, seed=7)
    b = cps.chaos_game(5000, seed=7)
    c = cps.chaos_game(5000, seed=8)
    assert np.array_equal(a.points, b.points) and np.array_equal(a.kinds, b.kinds)
    assert not np.array_equal(a.points, c.points)
    with pytest.raises(ValueError):
        cps.chaos_game(0)


def test_chaos_type_fractions_converge():
    # unbiased sampler: the relative error of the rarest type shrinks like n^-1/2
    want = np.array([float(I.frequency_vector()[I.TILE_INDEX[a]]) for a in ANCHORS])
    want /= want.sum()
    cloud = cps.chaos_game(4_000_000, seed=1)
    assert np.max(np.abs(cloud.type_fractions() - want) / want) < 0.01


def test_projected_cloud_close_to_chaos_cloud(patch6):
    proj = cps.window_from_patch(patch6)
    chaos = cps.chaos_game(50_000, seed=2)
    diam = cps.diameter(chaos.points)
    assert cps.hausdorff(proj.points, chaos.points) / diam < 0.02
    assert abs(cps.diameter(proj.points) - diam) / diam < 0.02


def test_cloud_csv_roundtrip():
    cloud = cps.chaos_game(300, seed=5)
    buf = io.StringIO()
    cloud.write_csv(buf)
    text = buf.getvalue()
    assert text.startswith("# caspr-cloud v1 method=chaos seed=5 count=300\nx,y,type,orientation\n")
    back = cps.read_cloud(io.StringIO(text))
    assert np.allclose(back.points, cloud.points, atol=1e-11)
    assert np.array_equal(back.kinds, cloud.kinds) and np.array_equal(back.rots, cloud.rots)
    assert (back.method, back.seed) == ("chaos", 5)
    with pytest.raises(ValueError):
        cps.read_cloud(io.StringIO("x,y\n"))


def test_double_occupancy_decreases():
    cloud = cps.chaos_game(100_000, seed=4)
    occ = [cps.double_occupancy(cloud, g) for g in (20, 40, 80, 160)]
    assert all(a > b for a, b in zip(occ, occ[1:]))


def test_hausdorff_dimension_closed_form():
    assert abs(cps.hausdorff_dimension() - 1.110977) < 1e-6
    assert math.isclose(cps.hausdorff_dimension(),
                        math.log(5 + 2 * math.sqrt(6)) / math.log(4 + math.sqrt(15)))


def test_box_counting_calibration():
    dim, _ = cps.square_calibration(200_000)
    assert abs(dim - 2.0) < 0.05
    t = np.linspace(0, 1, 200_000)
    line = t + 0.3j * t
    slope, _ = cps.box_counting_fixed(line, [2.0 ** -k for k in range(3, 8)], 0j)
    assert abs(slope - 1.0) < 0.05


def test_boundary_of_split_square_is_a_line():
    rng = np.random.default_rng(0)
    xy = rng.random((400_000, 2))
    pts = xy[:, 0] + 1j * xy[:, 1]
    kinds = (xy[:, 0] > 0.5).astype(np.int8)
    cloud = cps.WindowCloud(pts, kinds, np.zeros(len(pts), dtype=np.int8), "test")
    b = cps.boundary_points(cloud, 0.01)
    assert np.all(np.abs(b.real - 0.5) < 0.02)
    est, _ = cps.boundary_dimension(cloud, 0.005, factors=(2, 4, 8, 16))
    assert abs(est - 1.0) < 0.1


@settings(max_examples=20)
@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_lift_is_linear_and_isometric_to_dual_form(a, b, c, d):
    x = RingElement(a, b, c, d)
    g = RETURN_MODULE.basis()[0]
    assert np.allclose(cps.lift(x + g), cps.lift(x) + cps.lift(g))
    assert math.isclose(float(np.dot(cps.lift(x), cps.lift(x))), float(cps.dual_form(x, x)),
                        rel_tol=1e-9, abs_tol=1e-9)
