from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from caspr import cps, render
from caspr import inflation as I
from caspr import reprojection as rp

NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def patch():
    return I.generate_patch("Psi", 2)


def _parse(svg):
    return ET.fromstring(svg)


@pytest.mark.parametrize("mode", ["type", "parity", "edge"])
def test_patch_svg_is_valid_and_deterministic(patch, mode):
    a = render.patch_svg(patch, mode)
    assert a == render.patch_svg(patch, mode)
    root = _parse(a)
    assert len(root.findall(f".//{NS}polygon")) == len(patch)
    if mode == "edge":
        assert len(root.findall(f".//{NS}line")) == 6 * len(patch)


def test_type_colours(patch):
    fills = {p.get("fill") for p in _parse(render.patch_svg(patch)).iter(f"{NS}polygon")}
    present = {I.TILE_TYPES[t] for t in np.unique(patch.types)}
    assert fills == {render.TYPE_COLORS[t] for t in present}


def test_parity_colours(patch):
    fills = {p.get("fill") for p in _parse(render.patch_svg(patch, "parity")).iter(f"{NS}polygon")}
    assert fills <= set(render.PARITY_COLORS) and len(fills) == len({int(r) % 2 for r in patch.rots})


def test_unknown_colouring(patch):
    with pytest.raises(ValueError):
        render.patch_svg(patch, "rainbow")


def test_empty_patch():
    svg = render.patch_svg(I.Patch.empty())
    assert 'viewBox="0 0 1 1"' in svg
    _parse(svg)


def test_control_points_drawn(patch):
    root = _parse(render.patch_svg(patch, control_points=True))
    coords, _, _ = I.control_points(patch)
    assert len(root.findall(f".//{NS}circle")) == len(coords)


def test_cloud_svg():
    cloud = cps.chaos_game(2000, seed=3)
    svg = render.cloud_svg(cloud)
    assert svg == render.cloud_svg(cps.chaos_game(2000, seed=3))
    root = _parse(svg)
    assert len(root.findall(f".//{NS}circle")) == 2000
    assert {g.get("fill-opacity") for g in root.iter(f"{NS}g")} == {"1", "0.55"}


def test_deformed_svg(patch):
    d = rp.reproject(patch, rp.build_hex_reprojection())
    root = _parse(render.deformed_svg(d))
    assert len(root.findall(f".//{NS}polygon")) == len(patch)


def test_display_puts_real_axis_vertical():
    x, y = render.display(np.array([1 + 0j, 1j]))
    assert list(x) == [0, -1] and list(y) == [-1, 0]


def test_number_format():
    assert render._fmt(-0.0001, 3) == "0"
    assert render._fmt(1.5, 3) == "1.5"
    assert render._fmt(2.0, 3) == "2"
