"""Linear reprojections of the CASPr tiling onto hexagon-lattice tilings.

A reprojection is a Z-linear map T from the edge module E into the plane.
Two targets are provided.  The first sends every meta-tile side to the side
of a regular hexagon in the same slot; this only becomes linear after adding
a fixed offset per vertex class (a coboundary), so the reprojected tiles are
distorted but the control points agree exactly with those of the honeycomb.
The second keeps each edge x + y*lam (x, y in Z[xi]) as x + 8y, a nearby
edge table with values in the hexagonal lattice Z[xi].

All target values live in Q(xi) and are handled exactly as pairs of
rationals (a, b) meaning a + b*xi; ``scale`` turns them into plane vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .inflation import Patch, _side_keys, control_points
from .intlinalg import left_kernel_integer, solve_integer
from .modules import EDGE_MODULE
from .ring import BASIS, XI_C, RingElement
from .tiles import (ANCHORS, COMBHEX, CONTROL_OFFSETS, EDGE_ENDPOINTS, EDGE_TYPES, EDGE_VECTORS,
                    ORIENTATIONS, TILE_TYPES, edge_vector)

QPair = tuple[Fraction, Fraction]
VERTEX_LABELS = tuple([("s", j) for j in range(6)] + [("p", 0), ("p", 1), ("q", 0), ("q", 1)])
HEX_SIDE_SQUARED = 60


class InconsistentMap(ArithmeticError):
    pass


def _norm_vertex(v: str, k: int) -> tuple[str, int]:
    return (v, k % 2) if v in "pq" else (v, k % 6)


def _qmul_xi_power(z: QPair, m: int) -> QPair:
    a, b = z
    for _ in range(m % 6):
        a, b = -b, a + b  # (a + b xi) xi = a xi + b (xi - 1)
    return a, b


def _qadd(x: QPair, y: QPair, k: int = 1) -> QPair:
    return x[0] + k * y[0], x[1] + k * y[1]


def _qcomplex(z: QPair) -> complex:
    return float(z[0]) + float(z[1]) * XI_C


def split_lam(z: RingElement) -> tuple[QPair, QPair]:
    """z = x + y*lam with x, y in Q(xi)."""
    a, b, c, d = z.coords
    return (a, b), (c, d)


def _rref_solve(a: list[list[Fraction]], rhs: list[list[Fraction]]) -> list[list[Fraction]] | None:
    """Solve a X = rhs exactly (several right-hand sides); free variables are zero."""
    n, k = len(a[0]), len(rhs[0])
    m = [list(r) + list(s) for r, s in zip(a, rhs)]
    piv = []
    row = 0
    for c in range(n):
        p = next((i for i in range(row, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[row], m[p] = m[p], m[row]
        inv = 1 / m[row][c]
        m[row] = [x * inv for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        piv.append(c)
        row += 1
    for i in range(row, len(m)):
        if any(m[i][n:]):
            return None
    x = [[Fraction(0)] * k for _ in range(n)]
    for i, c in enumerate(piv):
        x[c] = m[i][n:]
    return x


@dataclass(frozen=True)
class ReprojectionMap:
    """T on the integral basis (1, xi, lam, lam*xi) with values in Q(xi), times ``scale``.

    ``offsets`` holds the per-vertex-class correction G, so that the target
    tiling has vertices T(P) + G(label); it is empty when T alone is consistent.
    """

    name: str
    matrix: tuple[QPair, ...]
    scale: complex
    targets: dict = field(default_factory=dict)
    offsets: dict = field(default_factory=dict)
    constraints: int = 0

    def image(self, z: RingElement) -> QPair:
        out = (Fraction(0), Fraction(0))
        for c, t in zip(z.coords, self.matrix):
            out = (out[0] + c * t[0], out[1] + c * t[1])
        return out

    def complex_images(self) -> np.ndarray:
        return np.array([self.scale * _qcomplex(t) for t in self.matrix])

    def denominator(self) -> int:
        return math.lcm(*(x.denominator for t in self.matrix for x in t))

    def integer_matrix(self) -> tuple[np.ndarray, int]:
        d = self.denominator()
        return np.array([[int(x * d) for x in t] for t in self.matrix], dtype=np.int64), d

    def lattice_coords(self, coords: np.ndarray) -> np.ndarray:
        """Exact target coordinates (a, b) of a + b*xi for integer 4-coordinate rows.

        Raises if a point is not on the lattice Z[xi].
        """
        m, d = self.integer_matrix()
        v = coords.reshape(-1, 4) @ m
        if np.any(v % d):
            raise ArithmeticError("image is not on the hexagonal lattice")
        return (v // d).reshape(coords.shape[:-1] + (2,))

    def apply(self, coords: np.ndarray) -> np.ndarray:
        return coords.astype(float) @ self.complex_images()

    def kernel(self) -> list[list[int]]:
        """Integer basis (coordinates over the basis of E) of the kernel of T on E."""
        rows = [self.image(b) for b in EDGE_MODULE.basis()]
        d = math.lcm(*(x.denominator for r in rows for x in r))
        return left_kernel_integer([[int(x * d) for x in r] for r in rows])

    def vertex_offset(self, label: tuple[str, int]) -> QPair:
        return self.offsets.get(label, (Fraction(0), Fraction(0)))


def solve_reprojection(name: str, targets: dict[str, QPair], scale: complex = 1,
                       allow_offsets: bool = True) -> ReprojectionMap:
    """Find T on E with T(xi^m e_t) + G(end) - G(start) = xi^m target_t for all 45 sides.

    First tries G = 0; if that system is inconsistent and ``allow_offsets``
    is set, solves for G on the ten vertex classes as well; G is only fixed up
    to a constant, which is chosen so that G sums to zero over the s orbit.
    """
    basis = EDGE_MODULE.basis()
    brows = [[int(x) for x in b.coords] for b in basis]
    rows, rhs = [], []
    for t in EDGE_TYPES:
        for m in range(ORIENTATIONS[t]):
            c = solve_integer(brows, [int(x) for x in edge_vector(t, m).coords])
            (va, ka), (vb, kb) = EDGE_ENDPOINTS[t]
            g = [Fraction(0)] * len(VERTEX_LABELS)
            g[VERTEX_LABELS.index(_norm_vertex(vb, kb + m))] += 1
            g[VERTEX_LABELS.index(_norm_vertex(va, ka + m))] -= 1
            rows.append(list(c) + g)
            rhs.append(list(_qmul_xi_power(targets[t], m)))
    sol = _rref_solve([r[:4] for r in rows], rhs)
    offsets = {}
    if sol is None:
        if not allow_offsets:
            raise InconsistentMap(f"{name}: no linear extension")
        gauge = [Fraction(0)] * 4 + [Fraction(int(v == "s")) for v, _ in VERTEX_LABELS]
        sol = _rref_solve(rows + [gauge], rhs + [[Fraction(0), Fraction(0)]])
        if sol is None:
            raise InconsistentMap(f"{name}: no linear extension even with vertex offsets")
        offsets = {lab: (sol[4 + i][0], sol[4 + i][1]) for i, lab in enumerate(VERTEX_LABELS)}
    t_e = [(s[0], s[1]) for s in sol[:4]]
    # change to the integral basis: coords over O = c @ B, so T_O = B^-1 T_E
    binv = _rref_solve([[Fraction(x) for x in r] for r in brows],
                       [[Fraction(int(i == j)) for j in range(4)] for i in range(4)])
    matrix = tuple((sum((binv[i][j] * t_e[j][0] for j in range(4)), Fraction(0)),
                    sum((binv[i][j] * t_e[j][1] for j in range(4)), Fraction(0))) for i in range(4))
    return ReprojectionMap(name, matrix, complex(scale), dict(targets), offsets, len(rows))


def consistency_residuals(rmap: ReprojectionMap) -> list[str]:
    """Re-check all 45 side constraints against the linear extension; returns failures."""
    bad = []
    for t in EDGE_TYPES:
        for m in range(ORIENTATIONS[t]):
            (va, ka), (vb, kb) = EDGE_ENDPOINTS[t]
            lhs = _qadd(_qadd(rmap.image(edge_vector(t, m)), rmap.vertex_offset(_norm_vertex(vb, kb + m))),
                        rmap.vertex_offset(_norm_vertex(va, ka + m)), -1)
            if lhs != _qmul_xi_power(rmap.targets[t], m):
                bad.append(f"{t} r^{m}")
    return bad


def _hex_orientation(matrix_targets: dict[str, QPair]) -> complex:
    """Unit phase aligning target edges with the CASPr edges in least squares."""
    acc = sum(_qcomplex(matrix_targets[t]).conjugate() * EDGE_VECTORS[t].embed() for t in EDGE_TYPES)
    return acc / abs(acc)


def build_hex_reprojection() -> ReprojectionMap:
    """Every side goes to the regular-hexagon side of its slot, with side length sqrt 60.

    A hexagon of side s has area (3 sqrt3 / 2) s^2, equal to the average
    tile area 90 sqrt3 for s^2 = 60.
    """
    targets = {t: (Fraction(1), Fraction(0)) for t in EDGE_TYPES}
    scale = math.sqrt(HEX_SIDE_SQUARED) * _hex_orientation(targets)
    return solve_reprojection("hex", targets, scale)


def build_metatile_reprojection() -> ReprojectionMap:
    """Each edge x + y lam (x, y in Z[xi]) becomes x + 8y, a lattice vector."""
    targets = {}
    for t in EDGE_TYPES:
        x, y = split_lam(EDGE_VECTORS[t])
        targets[t] = (x[0] + 8 * y[0], x[1] + 8 * y[1])
    return solve_reprojection("metatile", targets, 1, allow_offsets=False)


def identity_reprojection() -> ReprojectionMap:
    """The CASPr projection itself, as a float-only map (not lattice valued)."""
    return RawReprojection("identity", np.array([b.embed() for b in BASIS]))


@dataclass(frozen=True)
class RawReprojection:
    """A user-supplied real-linear map given by complex images of the integral basis."""

    name: str
    images: np.ndarray

    def apply(self, coords: np.ndarray) -> np.ndarray:
        return coords.astype(float) @ self.images

    def complex_images(self) -> np.ndarray:
        return self.images


PRESETS = {"hex": build_hex_reprojection, "metatile": build_metatile_reprojection}


# --- deformed patches ---------------------------------------------------------------

@dataclass
class DeformedPatch:
    patch: Patch
    projection: str
    vertices: np.ndarray         # (n, 6) complex
    control_points: np.ndarray   # complex
    control_kinds: np.ndarray
    control_rots: np.ndarray


def _offset_table(rmap) -> np.ndarray | None:
    """(9, 6, 6) complex vertex offsets G(label) by tile type, rotation and corner."""
    offsets = getattr(rmap, "offsets", None)
    if not offsets:
        return None
    tab = np.zeros((len(TILE_TYPES), 6, 6), dtype=complex)
    for ti, t in enumerate(TILE_TYPES):
        for r in range(6):
            for k in range(6):
                tab[ti, r, k] = rmap.scale * _qcomplex(rmap.vertex_offset(vertex_label(t, r, k)))
    return tab


def reproject(p: Patch, rmap) -> DeformedPatch:
    """Vertices T(P) + G(vertex class); control points T(c)."""
    vc = p.vertex_coords()
    coords, kinds, rots = control_points(p)
    verts = rmap.apply(vc)
    tab = _offset_table(rmap)
    if tab is not None and len(p):
        verts = verts + tab[p.types.astype(np.int64), p.rots.astype(np.int64)]
    return DeformedPatch(p, rmap.name, verts, rmap.apply(coords), kinds, rots)


def vertex_label(tile: str, rot: int, k: int) -> tuple[str, int]:
    v, j = COMBHEX[tile].vertex_labels()[k]
    return _norm_vertex(v, j + rot)


def _side_target(rmap: ReprojectionMap, tile: str, rot: int, k: int) -> QPair:
    lab = COMBHEX[tile].slots[k].rotated(rot)
    z = _qmul_xi_power(rmap.targets[lab.edge], lab.m)
    return z if lab.sign > 0 else (-z[0], -z[1])


def target_tiling(p: Patch, rmap: ReprojectionMap) -> dict[tuple[int, ...], QPair]:
    """Vertex positions of the target tiling, built by walking tile sides.

    Only the combinatorics of the patch is used: tiles are visited through
    shared sides and each side is replaced by its target vector.  The walk
    starts from vertex 0 of tile 0 placed at T(P) + G.  Raises if two walks
    give a vertex different positions.
    """
    vc = p.vertex_coords()
    keys = [[tuple(int(x) for x in vc[i, k]) for k in range(6)] for i in range(len(p))]
    sides = _side_keys(p)
    nbrs = [[] for _ in range(len(p))]
    for users in sides.values():
        if len(users) == 2:
            (a, _), (b, _) = users
            nbrs[a].append(b)
            nbrs[b].append(a)
    pos: dict[tuple[int, ...], QPair] = {}
    t0 = TILE_TYPES[p.types[0]]
    start = _qadd(rmap.image(RingElement(*keys[0][0])), rmap.vertex_offset(vertex_label(t0, int(p.rots[0]), 0)))
    pos[keys[0][0]] = start
    seen = {0}
    todo = [0]
    while todo:
        i = todo.pop()
        t, r = TILE_TYPES[p.types[i]], int(p.rots[i])
        k0 = next(k for k in range(6) if keys[i][k] in pos)
        z = pos[keys[i][k0]]
        for j in range(6):
            k = (k0 + j) % 6
            nxt = keys[i][(k + 1) % 6]
            z = _qadd(z, _side_target(rmap, t, r, k))
            if nxt in pos:
                if pos[nxt] != z:
                    raise InconsistentMap("target tiling does not close up")
            else:
                pos[nxt] = z
        for n in nbrs[i]:
            if n not in seen:
                seen.add(n)
                todo.append(n)
    if len(seen) != len(p):
        raise ValueError("patch is not connected")
    return pos


def target_control_points(p: Patch, rmap: ReprojectionMap, vertices: dict | None = None
                          ) -> list[QPair]:
    """Control points of the target tiling by its own local rule.

    An anchor of type t at rotation m has its control point at the fixed
    offset xi^m T(c_t) - G(label of its vertex 0) from that vertex.
    """
    vertices = vertices if vertices is not None else target_tiling(p, rmap)
    vc = p.vertex_coords()
    out = []
    for a in ANCHORS:
        idx = np.flatnonzero(p.types == TILE_TYPES.index(a))
        for m in range(6):
            kappa = _qadd(_qmul_xi_power(rmap.image(CONTROL_OFFSETS[a]), m),
                          rmap.vertex_offset(vertex_label(a, m, 0)), -1)
            for i in idx[p.rots[idx] == m]:
                v0 = vertices[tuple(int(x) for x in vc[i, 0])]
                out.append(_qadd(v0, kappa))
    return out


def reprojected_control_points(p: Patch, rmap: ReprojectionMap) -> list[QPair]:
    coords, _, _ = control_points(p)
    lc = rmap.lattice_coords(coords) if rmap.denominator() == 1 else None
    if lc is not None:
        return [(Fraction(int(a)), Fraction(int(b))) for a, b in lc]
    return [rmap.image(RingElement(*(int(x) for x in c))) for c in coords]


def shape_displacement(p: Patch, rmap) -> float:
    """Mean distance between reprojected and true vertices, each tile translated to its vertex 0."""
    z = p.vertices_complex()
    w = reproject(p, rmap).vertices
    return float(np.mean(np.abs((w - w[:, :1]) - (z - z[:, :1]))))


def mean_displacement(p: Patch, rmap) -> float:
    """Mean distance between reprojected and true vertices of the whole patch."""
    return float(np.mean(np.abs(reproject(p, rmap).vertices - p.vertices_complex())))


def is_regular_hexagon(points: Sequence[complex], tol: float = 1e-9) -> bool:
    c = sum(points) / 6
    r = [abs(z - c) for z in points]
    sides = [abs(points[(k + 1) % 6] - points[k]) for k in range(6)]
    return max(r) - min(r) < tol and max(sides) - min(sides) < tol and abs(r[0] - sides[0]) < tol
