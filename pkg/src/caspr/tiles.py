"""Meta-tile geometry: edge vectors, combinatorial hexagons, polygons, areas.

Each meta-tile is a hexagon whose six sides carry signed, rotated edge labels.
Replacing each label by its exact edge vector gives the geometric tile.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .groupring import Poly6
from .ring import RealQuadratic, RingElement, xi_power

EDGE_TYPES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "theta", "eta")
EDGE_SYMBOLS = dict(zip(EDGE_TYPES, "αβγδεζθη"))
TILE_TYPES = ("Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi", "Sigma", "Phi", "Psi")
TILE_SYMBOLS = dict(zip(TILE_TYPES, "ΓΔΘΛΞΠΣΦΨ"))
SYMBOL_TO_TILE = {v: k for k, v in TILE_SYMBOLS.items()}
SYMBOL_TO_EDGE = {v: k for k, v in EDGE_SYMBOLS.items()}

EDGE_VECTORS = {
    "alpha": RingElement(0, 2, 1, -1),      # 2 xi + (1 - xi) lam
    "beta": RingElement(1, -3, 0, 1),       # 1 - 3 xi + xi lam
    "gamma": RingElement(-2, 4, 2, -1),     # -2 + 4 xi + (2 - xi) lam
    "delta": RingElement(-9, 3, 3, 0),      # -9 + 3 xi + 3 lam
    "epsilon": RingElement(1, -1, 1, 0),    # 1 - xi + lam
    "zeta": RingElement(-1, -4, 1, 1),      # -1 - 4 xi + (1 + xi) lam
    "theta": RingElement(-1, 1, 2, 0),      # -1 + xi + 2 lam
    "eta": RingElement(1, 2, 1, 0),         # 1 + 2 xi + lam
}
ORIENTATIONS = {t: (3 if t == "eta" else 6) for t in EDGE_TYPES}
DIRECTED = {t: t != "eta" for t in EDGE_TYPES}

# endpoints (start, end) of each edge as (vertex, power of r); from the incidence matrix
EDGE_ENDPOINTS = {
    "alpha": (("s", 3), ("p", 0)),
    "beta": (("q", 1), ("s", 4)),
    "gamma": (("s", 5), ("s", 0)),
    "delta": (("s", 5), ("s", 2)),
    "epsilon": (("q", 1), ("p", 0)),
    "zeta": (("s", 5), ("s", 4)),
    "theta": (("s", 5), ("q", 0)),
    "eta": (("q", 1), ("q", 0)),
}


def edge_vector(edge: str, m: int) -> RingElement:
    """xi^m * e_edge.  For eta, m + 3 gives the negative (r^3 eta = -eta)."""
    if edge not in EDGE_VECTORS:
        raise ValueError(f"unknown edge type {edge!r}")
    if not isinstance(m, int):
        raise ValueError("rotation must be an integer")
    return xi_power(m) * EDGE_VECTORS[edge]


@dataclass(frozen=True)
class EdgeLabel:
    """A directed side: edge type, rotation power and traversal sign."""

    edge: str
    m: int
    sign: int

    def normalized(self) -> EdgeLabel:
        m = self.m % 6
        s = self.sign
        if self.edge == "eta" and m >= 3:
            m -= 3
            s = -s
        return EdgeLabel(self.edge, m, s)

    def rotated(self, k: int) -> EdgeLabel:
        return EdgeLabel(self.edge, self.m + k, self.sign).normalized()

    def reversed(self) -> EdgeLabel:
        return EdgeLabel(self.edge, self.m, -self.sign).normalized()

    def vector(self) -> RingElement:
        return edge_vector(self.edge, self.m).scale(self.sign)

    def __str__(self) -> str:
        sgn = "-" if self.sign < 0 else ""
        return f"{sgn}r^{self.m}{EDGE_SYMBOLS[self.edge]}"


# slot labels read counterclockwise; the leading digit is the power of r
_COMBHEX_TEXT = {
    "Gamma": "3α 1α 5γ 0δ 4β 2β",
    "Delta": "0γ 1β 5ε 3α 1γ 2ζ",
    "Theta": "0γ 1β 2θ 3β 1η 2β",
    "Lambda": "0γ 1β 5ε 3α 1θ 2β",
    "Xi": "3α 1ε 2θ 3β 1η 2β",
    "Pi": "3α 1ε 5ε 3α 1θ 2β",
    "Sigma": "0ζ 1β 5ε 3α 1γ 5δ",
    "Phi": "0γ 1β 5ε 3ε 1η 2β",
    "Psi": "3α 1ε 5ε 3ε 1η 2β",
}


def slot_direction(slot: int) -> int:
    """Side ``slot`` (0-based, counterclockwise) points roughly along xi^(slot+3)."""
    return (slot + 3) % 6


def _parse_slots(text: str) -> tuple[EdgeLabel, ...]:
    out = []
    for slot, tok in enumerate(text.split()):
        m = int(tok[0])
        edge = SYMBOL_TO_EDGE[tok[1]]
        d = slot_direction(slot)
        if m == d:
            sign = 1
        elif m == (d + 3) % 6:
            sign = -1
        else:
            raise ValueError(f"label {tok} cannot sit on side {slot}")
        out.append(EdgeLabel(edge, m, sign))
    return tuple(out)


@dataclass(frozen=True)
class CombHexagon:
    tile: str
    slots: tuple[EdgeLabel, ...]

    def vertex_labels(self) -> tuple[tuple[str, int], ...]:
        """Start vertex of each slot, as (vertex class, power of r)."""
        out = []
        for lab in self.slots:
            start, end = EDGE_ENDPOINTS[lab.edge]
            a = start if lab.sign > 0 else end
            out.append(_norm_vertex(a[0], a[1] + lab.m))
        return tuple(out)

    def vertices_consistent(self) -> bool:
        """End of each slot equals start of the next (read through the incidence data)."""
        for k, lab in enumerate(self.slots):
            start, end = EDGE_ENDPOINTS[lab.edge]
            b = end if lab.sign > 0 else start
            b = _norm_vertex(b[0], b[1] + lab.m)
            if b != self.vertex_labels()[(k + 1) % 6]:
                return False
        return True

    def boundary_chain(self) -> list[Poly6]:
        """Coefficients of the boundary in terms of the eight edge orbits."""
        chain = {t: Poly6() for t in EDGE_TYPES}
        for lab in self.slots:
            n = lab.normalized()
            chain[n.edge] = chain[n.edge] + Poly6.from_terms([(n.sign, n.m)])
        return [chain[t] for t in EDGE_TYPES]


def _norm_vertex(v: str, power: int) -> tuple[str, int]:
    return (v, power % 2) if v in "pq" else (v, power % 6)


COMBHEX = {t: CombHexagon(t, _parse_slots(s)) for t, s in _COMBHEX_TEXT.items()}


@dataclass(frozen=True)
class GeomTile:
    tile: str
    vertices: tuple[RingElement, ...]
    rotation: int = 0
    hand: str = "right"

    def complex_vertices(self) -> list[complex]:
        return [v.embed() for v in self.vertices]


def relative_vertices(tile: str, rot: int = 0) -> tuple[RingElement, ...]:
    """The six vertices of ``tile`` rotated by xi^rot, starting at the origin."""
    out = [RingElement()]
    for lab in COMBHEX[tile].slots[:-1]:
        out.append(out[-1] + lab.rotated(rot).vector())
    return tuple(out)


def closure(tile: str) -> RingElement:
    total = RingElement()
    for lab in COMBHEX[tile].slots:
        total = total + lab.vector()
    return total


def tile_polygon(tile: str, m: int = 0, hand: str = "right",
                 position: RingElement | None = None) -> GeomTile:
    if tile not in COMBHEX:
        raise ValueError(f"unknown tile {tile!r}")
    if closure(tile):
        raise ArithmeticError(f"boundary of {tile} does not close")
    vs = relative_vertices(tile, m)
    if position is not None:
        vs = tuple(position + v for v in vs)
    if hand == "left":
        vs = tuple(v.conj() for v in vs)
    elif hand != "right":
        raise ValueError("hand must be 'right' or 'left'")
    return GeomTile(tile, vs, m % 6, hand)


def mirror(t: GeomTile) -> GeomTile:
    return GeomTile(t.tile, tuple(v.conj() for v in t.vertices), t.rotation,
                    "left" if t.hand == "right" else "right")


def area_coefficient(vertices: Sequence[RingElement]) -> RealQuadratic:
    """Signed area divided by sqrt 3, exactly (counterclockwise positive)."""
    total = RealQuadratic()
    n = len(vertices)
    for i in range(n):
        z = vertices[i].conj() * vertices[(i + 1) % n]
        _, b, _, d = z.coords
        # Im(z) = (b + d lam) sqrt3 / 2
        total = total + RealQuadratic(b, d)
    return total * Fraction(1, 4)


def area(tile: GeomTile | str) -> RealQuadratic:
    """Area / sqrt 3 as an element of Q(sqrt 15), always positive."""
    if isinstance(tile, str):
        tile = tile_polygon(tile)
    a = area_coefficient(tile.vertices)
    if float(a) == 0:
        raise ArithmeticError("degenerate polygon")
    return a if float(a) > 0 else -a


def area_float(tile: GeomTile | str) -> float:
    return float(area(tile)) * math.sqrt(3)


# --- simplicity --------------------------------------------------------------

def _orient(a: complex, b: complex, c: complex) -> float:
    return (b - a).real * (c - a).imag - (b - a).imag * (c - a).real


def _on_segment(a: complex, b: complex, p: complex, eps: float) -> bool:
    return (min(a.real, b.real) - eps <= p.real <= max(a.real, b.real) + eps
            and min(a.imag, b.imag) - eps <= p.imag <= max(a.imag, b.imag) + eps)


def segments_intersect(a: complex, b: complex, c: complex, d: complex, eps: float = 1e-9) -> bool:
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if ((o1 > eps and o2 < -eps) or (o1 < -eps and o2 > eps)) and \
       ((o3 > eps and o4 < -eps) or (o3 < -eps and o4 > eps)):
        return True
    if abs(o1) <= eps and _on_segment(a, b, c, eps):
        return True
    if abs(o2) <= eps and _on_segment(a, b, d, eps):
        return True
    if abs(o3) <= eps and _on_segment(c, d, a, eps):
        return True
    if abs(o4) <= eps and _on_segment(c, d, b, eps):
        return True
    return False


def is_simple(points: Sequence[complex] | GeomTile, eps: float = 1e-9) -> bool:
    """True when the closed polygon has no self-intersections.

    Zero-length edges are merged first; adjacent edges may only share their
    common endpoint and must not fold back onto each other.
    """
    if isinstance(points, GeomTile):
        points = points.complex_vertices()
    pts = []
    for p in points:
        if not pts or abs(p - pts[-1]) > eps:
            pts.append(complex(p))
    if len(pts) > 1 and abs(pts[0] - pts[-1]) <= eps:
        pts.pop()
    n = len(pts)
    if n < 3:
        return False
    if len(set((round(p.real, 9), round(p.imag, 9)) for p in pts)) != n:
        return False
    segs = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = segs[i]
            c, d = segs[j]
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent: fold-back means the far endpoint lies on the other segment
                shared = b if j == i + 1 else a
                other_i = a if j == i + 1 else b
                other_j = d if j == i + 1 else c
                if abs(_orient(other_i, shared, other_j)) <= eps:
                    u = other_i - shared
                    v = other_j - shared
                    if (u.conjugate() * v).real > 0:
                        return False
                continue
            if segments_intersect(a, b, c, d, eps):
                return False
    return True


# --- the Tile(a, b) family -----------------------------------------------------

# boundary order of the 14-edge Hat-family tile: ("a", k) is a * xi^k and
# ("b", k) is i * b * xi^k
TILE_AB_WORD = (
    ("a", 0), ("a", 5), ("b", 5), ("b", 0), ("a", 0), ("a", 1), ("b", 1),
    ("b", 2), ("a", 2), ("a", 3), ("a", 3), ("a", 4), ("b", 4), ("b", 3),
)

_XI_C = cmath.exp(1j * math.pi / 3)


def build_tile_ab(a: complex, b: complex) -> list[complex]:
    """Vertices of Tile(a, b), starting at the origin (14 points, closing implicitly)."""
    if a == 0 and b == 0:
        raise ValueError("Tile(0, 0) is degenerate")
    pts = [0j]
    for kind, k in TILE_AB_WORD:
        step = a * _XI_C ** k if kind == "a" else 1j * b * _XI_C ** k
        pts.append(pts[-1] + step)
    end = pts.pop()
    if abs(end) > 1e-9 * (1 + abs(a) + abs(b)):
        raise ArithmeticError("Tile(a, b) boundary does not close")
    return pts


def polygon_area(points: Sequence[complex]) -> float:
    n = len(points)
    return 0.5 * sum((points[i].conjugate() * points[(i + 1) % n]).imag for i in range(n))


def first_nonsimple_ratio(samples: Sequence[float], b: complex = 1.0,
                          phase: complex = 1.0) -> float | None:
    """First t in ``samples`` with Tile(t * phase, b) self-intersecting."""
    for t in samples:
        if not is_simple(build_tile_ab(t * phase, b)):
            return t
    return None


# --- clusters and control points ------------------------------------------------

#: members of each cluster relative to its anchor tile: (tile, rotation, offset of vertex 0)
CLUSTER_MEMBERS = {
    "Gamma": (("Gamma", 0, RingElement()), ("Delta", 5, RingElement(4, -2, -1, -1)),
              ("Sigma", 1, RingElement(4, -2, -1, -1))),
    "Theta": (("Theta", 0, RingElement()), ("Lambda", 1, RingElement(-2, 1, -1, -1))),
    "Xi": (("Xi", 0, RingElement()), ("Pi", 1, RingElement(-2, 1, -1, -1))),
    "Phi": (("Phi", 0, RingElement()),),
    "Psi": (("Psi", 0, RingElement()),),
}
CLUSTER_OF = {m[0]: a for a, mem in CLUSTER_MEMBERS.items() for m in mem}
ANCHORS = tuple(CLUSTER_MEMBERS)

#: control point of each cluster in its anchor's frame; all lie in the return module
CONTROL_OFFSETS = {
    "Gamma": RingElement(-4, 5, 1, -2),
    "Theta": RingElement(4, -2, -1, -1),
    "Xi": RingElement(4, -2, -1, -1),
    "Phi": RingElement(-3, -3, 0, 0),
    "Psi": RingElement(-3, -3, 0, 0),
}


def reference_offset(tile: str) -> tuple[RingElement, bool]:
    """The cluster's control point in the frame of ``tile``, and whether ``tile`` is the anchor."""
    anchor = CLUSTER_OF[tile]
    for name, rho, off in CLUSTER_MEMBERS[anchor]:
        if name == tile:
            # anchor frame point c equals off + xi^rho * x in the member frame
            x = (CONTROL_OFFSETS[anchor] - off) * xi_power(-rho)
            return x, name == anchor
    raise KeyError(tile)


def cluster_polygons(anchor: str) -> list[list[complex]]:
    return [[(off + v).embed() for v in relative_vertices(t, r)] for t, r, off in CLUSTER_MEMBERS[anchor]]


def _inside(z: complex, poly: Sequence[complex]) -> bool:
    w = False
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if (a.imag > z.imag) != (b.imag > z.imag):
            x = a.real + (z.imag - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            if x > z.real:
                w = not w
    return w


def _seg_dist(z: complex, a: complex, b: complex) -> float:
    t = max(0.0, min(1.0, ((z - a) * (b - a).conjugate()).real / abs(b - a) ** 2))
    return abs(z - (a + t * (b - a)))


def choose_control_offset(anchor: str, box: int = 7, margin: float = 0.5) -> RingElement:
    """Pick an element of L strictly inside the cluster, near its centroid, with small internal image.

    Minimizes |c - centroid|^2 + |c*|^2 over small integer combinations of
    the basis of L, among points at distance > ``margin`` from every tile side.
    """
    import itertools
    from .modules import RETURN_MODULE
    polys = cluster_polygons(anchor)
    tot = 0.0
    acc = 0j
    for p in polys:
        a = polygon_area(p)
        c = sum((x + y) * (x.conjugate() * y).imag for x, y in zip(p, p[1:] + p[:1])) / (6 * a)
        tot += a
        acc += c * a
    cen = acc / tot
    basis = RETURN_MODULE.basis()
    best = None
    for co in itertools.product(range(-box, box + 1), repeat=4):
        x = RingElement()
        for b, k in zip(basis, co):
            if k:
                x = x + b.scale(k)
        z = x.embed()
        if abs(z - cen) > 8:
            continue
        if not any(_inside(z, p) for p in polys):
            continue
        if min(_seg_dist(z, p[i], p[(i + 1) % len(p)]) for p in polys for i in range(len(p))) <= margin:
            continue
        score = abs(z - cen) ** 2 + abs(x.embed_internal()) ** 2
        key = (round(score, 9), x.coords)
        if best is None or key < best[0]:
            best = (key, x)
    if best is None:
        raise ArithmeticError("no admissible control point found")
    return best[1]
