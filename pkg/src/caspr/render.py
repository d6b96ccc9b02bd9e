"""SVG output for patches, window clouds and reprojected patches.

The complex plane is drawn with its real axis pointing up, so a point z
appears at screen position (-Im z, -Re z).  All numbers are written with a
fixed number of decimals, so equal input gives byte-identical files.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .tiles import ANCHORS, COMBHEX, TILE_TYPES

TYPE_COLORS = {
    "Gamma": "#8c5a2b", "Delta": "#b07d45", "Sigma": "#d2a871",
    "Theta": "#c8463d", "Lambda": "#3d6fb6",
    "Xi": "#3c9d5d", "Pi": "#9acd8c",
    "Phi": "#8e6bbf", "Psi": "#e8c547",
}
CLUSTER_COLORS = {"Gamma": "#8c5a2b", "Theta": "#c8463d", "Xi": "#3c9d5d", "Phi": "#8e6bbf", "Psi": "#e8c547"}
EDGE_COLORS = {
    "alpha": "#1f4fd1", "beta": "#d62728", "gamma": "#8e44ad", "epsilon": "#17becf", "eta": "#2ca02c",
    "delta": "#7f7f7f", "zeta": "#7f7f7f", "theta": "#7f7f7f",
}
PARITY_COLORS = ("#c9c9c9", "#ffffff")


@dataclass(frozen=True)
class RenderStyle:
    width: int = 800
    stroke: str = "#222222"
    stroke_width: float = 0.15
    margin: float = 0.03
    decimals: int = 3
    point_radius: float = 0.02
    palette: dict = field(default_factory=lambda: dict(TYPE_COLORS))


def display(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Screen coordinates with the real axis vertical."""
    z = np.asarray(z, dtype=complex)
    return -z.imag, -z.real


def _fmt(x: float, d: int) -> str:
    s = f"{x:.{d}f}"
    return "0" if float(s) == 0 else s.rstrip("0").rstrip(".")


def _header(xs: np.ndarray, ys: np.ndarray, style: RenderStyle, pad: float = 0.0) -> tuple[str, float]:
    if xs.size == 0:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.width}" '
                f'viewBox="0 0 1 1">\n', 1.0)
    x0, x1, y0, y1 = xs.min() - pad, xs.max() + pad, ys.min() - pad, ys.max() + pad
    span = max(x1 - x0, y1 - y0, 1e-9)
    m = span * style.margin
    x0, y0, w, h = x0 - m, y0 - m, x1 - x0 + 2 * m, y1 - y0 + 2 * m
    height = max(1, int(round(style.width * h / w)))
    d = style.decimals
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{height}" '
            f'viewBox="{_fmt(x0, d)} {_fmt(y0, d)} {_fmt(w, d)} {_fmt(h, d)}">\n', span)


def _points(xs: Sequence[float], ys: Sequence[float], d: int) -> str:
    return " ".join(f"{_fmt(x, d)},{_fmt(y, d)}" for x, y in zip(xs, ys))


def _tile_fill(kind: str, t: int, rot: int, style: RenderStyle) -> str:
    if kind == "type":
        return style.palette[TILE_TYPES[t]]
    if kind == "parity":
        return PARITY_COLORS[rot % 2]
    if kind == "edge":
        return "#f4f1ea"
    raise ValueError(f"unknown colouring {kind!r}")


def polygons_svg(vertices: np.ndarray, types: np.ndarray, rots: np.ndarray, color_by: str = "type",
                 style: RenderStyle | None = None, points: Iterable[tuple[complex, str]] = ()) -> str:
    """Render an (n, 6) array of tile vertices; optional extra marked points."""
    style = style or RenderStyle()
    if color_by not in ("type", "parity", "edge"):
        raise ValueError(f"unknown colouring {color_by!r}")
    points = list(points)
    xs, ys = display(vertices.reshape(-1))
    px, py = display(np.array([z for z, _ in points], dtype=complex))
    head, span = _header(np.concatenate([xs, px]), np.concatenate([ys, py]), style)
    d = style.decimals
    sw = _fmt(style.stroke_width * max(span, 1) / 100, d + 2)
    out = [head, f'<g stroke="{style.stroke}" stroke-width="{sw}" stroke-linejoin="round">\n']
    xs = xs.reshape(vertices.shape)
    ys = ys.reshape(vertices.shape)
    for i in range(len(vertices)):
        fill = _tile_fill(color_by, int(types[i]), int(rots[i]), style)
        out.append(f'<polygon points="{_points(xs[i], ys[i], d)}" fill="{fill}"/>\n')
    out.append("</g>\n")
    if color_by == "edge":
        out.append(f'<g stroke-width="{sw}" stroke-linecap="round">\n')
        for i in range(len(vertices)):
            slots = COMBHEX[TILE_TYPES[int(types[i])]].slots
            for k in range(6):
                a, b = k, (k + 1) % 6
                out.append(f'<line x1="{_fmt(xs[i, a], d)}" y1="{_fmt(ys[i, a], d)}" '
                           f'x2="{_fmt(xs[i, b], d)}" y2="{_fmt(ys[i, b], d)}" '
                           f'stroke="{EDGE_COLORS[slots[k].edge]}"/>\n')
        out.append("</g>\n")
    if points:
        r = _fmt(style.point_radius * max(span, 1) / 10, d + 2)
        out.append("<g>\n")
        for (z, color), x, y in zip(points, px, py):
            out.append(f'<circle cx="{_fmt(x, d)}" cy="{_fmt(y, d)}" r="{r}" fill="{color}"/>\n')
        out.append("</g>\n")
    out.append("</svg>\n")
    return "".join(out)


def patch_svg(patch, color_by: str = "type", style: RenderStyle | None = None,
              control_points: bool = False) -> str:
    pts = []
    if control_points and len(patch):
        from .inflation import control_points as cps
        from .cps import BASIS_PHYS
        coords, kinds, _ = cps(patch)
        zs = coords.astype(float) @ BASIS_PHYS
        pts = [(z, CLUSTER_COLORS[ANCHORS[k]]) for z, k in zip(zs, kinds)]
    return polygons_svg(patch.vertices_complex() if len(patch) else np.zeros((0, 6), complex),
                        patch.types, patch.rots, color_by, style, pts)


def cloud_svg(cloud, style: RenderStyle | None = None, shade_orientation: bool = True) -> str:
    """Window cloud: one dot per point coloured by cluster type.

    Odd orientations are drawn slightly transparent so neighbouring
    subwindows of the same type stay distinguishable.
    """
    style = style or RenderStyle(decimals=4)
    xs, ys = display(cloud.points)
    head, span = _header(xs, ys, style)
    d = style.decimals
    r = _fmt(span / 800, d + 1)
    out = [head]
    for a, name in enumerate(ANCHORS):
        for par in (0, 1):
            sel = (cloud.kinds == a) & (cloud.rots % 2 == par)
            if not sel.any():
                continue
            op = "1" if (par == 0 or not shade_orientation) else "0.55"
            out.append(f'<g fill="{CLUSTER_COLORS[name]}" fill-opacity="{op}">\n')
            for x, y in zip(xs[sel], ys[sel]):
                out.append(f'<circle cx="{_fmt(x, d)}" cy="{_fmt(y, d)}" r="{r}"/>\n')
            out.append("</g>\n")
    out.append("</svg>\n")
    return "".join(out)


def deformed_svg(deformed, style: RenderStyle | None = None) -> str:
    pts = [(z, CLUSTER_COLORS[ANCHORS[k]]) for z, k in zip(deformed.control_points, deformed.control_kinds)]
    return polygons_svg(deformed.vertices, deformed.patch.types, deformed.patch.rots, "type", style, pts)
