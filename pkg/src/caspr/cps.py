"""The 4:2 cut-and-project scheme of the return module.

Points x of L are lifted to (x, x*) in C^2, where x* is the image under the
Galois map sending xi to its conjugate and lam to 8 - lam.  The lift of L is
a lattice of covolume 3645; control points of a tiling project into a
compact fractal window in internal space.

Exact data (covolume, window area, densities, the Fourier module) is kept in
Q(sqrt 15) and module arithmetic.  Internal-space point clouds are floats.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .inflation import (MU, TILE_INDEX, Patch, control_points, average_area,
                        frequency_vector, phi, rule)
from .modules import RETURN_MODULE, ZModule4, dual_module
from .ring import BASIS, I_SQRT5, LAM, LAM_F, XI, RealQuadratic, RingElement, dual_form, xi_power
from .tiles import ANCHORS, TILE_TYPES, reference_offset

SQRT3 = math.sqrt(3.0)
FOURIER_SCALE = I_SQRT5.scale(Fraction(1, 135))
HAUSDORFF_DIMENSION = math.log(5 + 2 * math.sqrt(6)) / math.log(4 + math.sqrt(15))
#: generator of the triangular lattice whose fundamental domain is the window
WINDOW_GENERATOR = RingElement(31) + (XI - LAM).scale(4) - LAM * XI
CLOUD_VERSION = 1


# --- the lattice ------------------------------------------------------------------

def lift(x: RingElement) -> np.ndarray:
    """(Re x, Im x, Re x*, Im x*)."""
    z, w = x.embed(), x.embed_internal()
    return np.array([z.real, z.imag, w.real, w.imag])


BASIS_PHYS = np.array([b.embed() for b in BASIS])
BASIS_INT = np.array([b.embed_internal() for b in BASIS])


@dataclass(frozen=True)
class Lattice4:
    module: ZModule4

    @property
    def generators(self) -> list[RingElement]:
        return self.module.basis()

    def matrix(self) -> np.ndarray:
        return np.array([lift(g) for g in self.generators])

    def covolume_float(self) -> float:
        return abs(float(np.linalg.det(self.matrix())))

    def covolume(self) -> Fraction:
        """Exact covolume from the Gram determinant of the lifted basis.

        The standard inner product of two lifts is the rational form
        Re(conj(x) y) + Re(conj(x*) y*), so the Gram matrix is rational
        and its determinant is the squared covolume.
        """
        g = self.generators
        det = _det([[dual_form(a, b) for b in g] for a in g])
        root = _rational_sqrt(det)
        if root is None:
            raise ArithmeticError("Gram determinant is not a rational square")
        return root

    def dual(self) -> np.ndarray:
        """Basis of the standard dual lattice in R^4 (rows)."""
        return np.linalg.inv(self.matrix()).T


def _det(a: list[list[Fraction]]) -> Fraction:
    a = [list(r) for r in a]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        k = next((i for i in range(c, n) if a[i][c] != 0), None)
        if k is None:
            return Fraction(0)
        if k != c:
            a[c], a[k] = a[k], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    return Fraction(p, q) if p * p == x.numerator and q * q == x.denominator else None


RETURN_LATTICE = Lattice4(RETURN_MODULE)


def covolume(module: ZModule4 = RETURN_MODULE) -> Fraction:
    return Lattice4(module).covolume()


def covolume_factorization() -> Fraction:
    """(3/4) * det(1, lam; 1, 8 - lam)^2 * [O : L]: the covolume of O times the index."""
    disc = RealQuadratic(8, -2)  # (8 - lam) - lam = -2 sqrt 15
    sq = disc * disc
    if sq.q != 0:
        raise ArithmeticError("discriminant square is not rational")
    return Fraction(3, 4) * sq.p * RETURN_MODULE.covolume()


def module_from_lattice_rows(rows: np.ndarray, max_den: int = 10 ** 6, tol: float = 1e-8) -> ZModule4:
    """Identify real 4-vectors of the form lift(y) as elements y of K."""
    e4 = np.array([lift(b) for b in BASIS])
    coords = rows @ np.linalg.inv(e4)
    gens = []
    for r in coords:
        y = RingElement(*(Fraction(float(x)).limit_denominator(max_den) for x in r))
        if np.max(np.abs(lift(y) - r @ e4)) > tol:
            raise ArithmeticError("row is not the lift of a field element")
        gens.append(y)
    return ZModule4.from_generators(gens)


def fourier_module_from_lattice(module: ZModule4 = RETURN_MODULE) -> ZModule4:
    """Projection of the standard dual lattice of the lift, identified as a module."""
    return module_from_lattice_rows(Lattice4(module).dual())


def fourier_module(module: ZModule4 = RETURN_MODULE) -> ZModule4:
    """The trace dual of ``module`` computed by exact module arithmetic."""
    return dual_module(module)


def _short_vectors(b: np.ndarray, bound: float) -> list[tuple[int, ...]]:
    """Integer vectors c with |c @ b|^2 <= bound (Fincke-Pohst enumeration)."""
    n = len(b)
    g = b @ b.T
    q = np.zeros((n, n))
    # q[i][i] diagonal weights, q[i][j] (j > i) the Cholesky-style multipliers
    a = g.copy()
    for i in range(n):
        q[i, i] = a[i, i]
        for j in range(i + 1, n):
            q[i, j] = a[i, j] / a[i, i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j, k] -= q[i, j] * q[i, k] * q[i, i]
                a[k, j] = a[j, k]
    out = []
    c = [0] * n

    def rec(i: int, rest: float) -> None:
        centre = -sum(q[i, j] * c[j] for j in range(i + 1, n))
        half = math.sqrt(max(rest, 0.0) / q[i, i])
        for x in range(math.ceil(centre - half - 1e-12), math.floor(centre + half + 1e-12) + 1):
            c[i] = x
            left = rest - q[i, i] * (x - centre) ** 2
            if left < -1e-9:
                continue
            if i == 0:
                out.append(tuple(c))
            else:
                rec(i - 1, left)
        c[i] = 0

    rec(n - 1, bound)
    return out


def _enumerate(module: ZModule4, phys_radius: float, int_radius: float) -> list[RingElement]:
    gens = module.basis()
    b = np.array([lift(g) for g in gens])
    out = []
    for co in _short_vectors(b, phys_radius ** 2 + int_radius ** 2 + 1e-9):
        v = np.array(co) @ b
        if math.hypot(v[0], v[1]) <= phys_radius + 1e-9 and math.hypot(v[2], v[3]) <= int_radius + 1e-9:
            y = RingElement()
            for g, k in zip(gens, co):
                if k:
                    y = y + g.scale(k)
            out.append(y)
    return sorted(out, key=lambda y: y.coords)


def bragg_support(radius: float, internal_radius: float | None = None,
                  module: ZModule4 = RETURN_MODULE) -> list[RingElement]:
    """Points k of the Fourier module with |k| <= radius and |k*| <= internal_radius.

    The internal bound stands in for a peak-intensity threshold; without it
    the support is dense.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if internal_radius is None:
        internal_radius = radius
    return _enumerate(fourier_module(module), radius, internal_radius)


def closed_under_rotation(points: Sequence[RingElement]) -> bool:
    keys = {p.coords for p in points}
    return all((XI * p).coords in keys for p in points)


# --- window area and densities ---------------------------------------------------------

@dataclass(frozen=True)
class WindowArea:
    """Areas of the triangular-lattice cell generated by d, as multiples of sqrt 3."""

    physical: RealQuadratic
    internal: RealQuadratic
    expected: RealQuadratic

    @property
    def matching(self) -> str:
        if self.physical == self.expected:
            return "physical"
        if self.internal == self.expected:
            return "internal"
        return "none"

    @property
    def value(self) -> RealQuadratic:
        return self.physical if self.matching != "internal" else self.internal


def window_area() -> WindowArea:
    """sqrt3/2 * |d|^2 for the physical and internal images of d."""
    d = WINDOW_GENERATOR
    n_phys = (d.conj() * d).real_part()
    n_int = n_phys.conjugate()  # |d*|^2 is the Galois conjugate of |d|^2
    half = Fraction(1, 2)
    return WindowArea(n_phys * half, n_int * half, RealQuadratic(8, -1) * Fraction(135, 2))


@dataclass(frozen=True)
class DensityReport:
    """All area-type quantities are coefficients of sqrt 3."""

    covolume: Fraction
    window_area: RealQuadratic
    rho1: RealQuadratic
    rho2: RealQuadratic
    average_area: RealQuadratic
    cluster_frequency: RealQuadratic
    area_convention: str

    @property
    def equal(self) -> bool:
        return self.rho1 == self.rho2

    def format(self) -> str:
        s3 = SQRT3
        return "\n".join([
            f"V = {self.covolume}",
            f"A = ({self.window_area}) sqrt3 = {float(self.window_area) * s3:.6f}  [{self.area_convention} image of d]",
            f"f.areas = ({self.average_area}) sqrt3 = {float(self.average_area) * s3:.6f}",
            f"sum of cluster frequencies = {self.cluster_frequency} = {float(self.cluster_frequency):.6f}",
            f"rho1 = A/V = ({self.rho1}) sqrt3 = {float(self.rho1) * s3:.9f}",
            f"rho2 = ({self.rho2}) sqrt3 = {float(self.rho2) * s3:.9f}",
            f"rho1 == rho2: {self.equal}",
        ])


def density_report() -> DensityReport:
    v = covolume()
    wa = window_area()
    a = wa.value
    rho1 = a * (1 / v)
    f = frequency_vector()
    cluster = sum((f[TILE_INDEX[t]] for t in ANCHORS), RealQuadratic())
    avg = average_area()
    # clusters per unit area: (clusters per tile) / (area per tile); 1/sqrt3 = sqrt3/3
    rho2 = cluster / avg * Fraction(1, 3)
    return DensityReport(v, a, rho1, rho2, avg, cluster, wa.matching)


def _patch_centre_radius(p: Patch, steps: int, seed: str) -> tuple[complex, float]:
    """Centre and inradius-like radius of the inflated seed tile."""
    from .tiles import relative_vertices
    vs = list(relative_vertices(seed, 0))
    for _ in range(steps):
        vs = [phi(v) for v in vs]
    pts = np.array([v.embed() for v in vs])
    centre = complex(pts.mean())
    r = min(abs(centre - z) for z in pts)
    return centre, r


def empirical_density(p: Patch, centre: complex, radius: float) -> tuple[float, int]:
    """Control points per unit area inside the disk |z - centre| < radius."""
    coords, _, _ = control_points(p)
    z = coords.astype(float) @ BASIS_PHYS
    n = int(np.count_nonzero(np.abs(z - centre) < radius))
    return n / (math.pi * radius ** 2), n


def patch_density(p: Patch, steps: int, seed: str = "Gamma", shrink: float = 0.5) -> tuple[float, int]:
    centre, r = _patch_centre_radius(p, steps, seed)
    return empirical_density(p, centre, shrink * r)


# --- window clouds ---------------------------------------------------------------------

@dataclass
class WindowCloud:
    points: np.ndarray      # complex internal-space coordinates
    kinds: np.ndarray       # index into ANCHORS
    rots: np.ndarray        # orientation 0..5
    method: str
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def classes(self) -> np.ndarray:
        return self.kinds.astype(np.int64) * 6 + self.rots

    def type_fractions(self) -> np.ndarray:
        return np.bincount(self.kinds.astype(np.int64), minlength=len(ANCHORS)) / max(len(self), 1)

    def write_csv(self, fh) -> None:
        fh.write(f"# caspr-cloud v{CLOUD_VERSION} method={self.method} seed={self.seed} count={len(self)}\n")
        fh.write("x,y,type,orientation\n")
        buf = io.StringIO()
        for z, k, r in zip(self.points, self.kinds, self.rots):
            buf.write(f"{z.real:.12f},{z.imag:.12f},{ANCHORS[k]},{int(r)}\n")
        fh.write(buf.getvalue())


def read_cloud(fh) -> WindowCloud:
    head = fh.readline()
    if not head.startswith("# caspr-cloud v"):
        raise ValueError("not a cloud file")
    meta = dict(tok.split("=", 1) for tok in head[1:].split()[2:])
    fh.readline()
    pts, kinds, rots = [], [], []
    for line in fh:
        x, y, t, r = line.strip().split(",")
        pts.append(complex(float(x), float(y)))
        kinds.append(ANCHORS.index(t))
        rots.append(int(r))
    seed = None if meta.get("seed", "None") == "None" else int(meta["seed"])
    return WindowCloud(np.array(pts, dtype=complex), np.array(kinds, dtype=np.int8),
                       np.array(rots, dtype=np.int8), meta.get("method", "?"), seed)


def window_from_patch(p: Patch) -> WindowCloud:
    coords, kinds, rots = control_points(p)
    pts = coords.astype(float) @ BASIS_INT
    return WindowCloud(pts, kinds, rots, "project")


# --- the graph-directed IFS --------------------------------------------------------------

@dataclass(frozen=True)
class IFS:
    """Maps s -> a * conj(s) + offsets[e] from node source[e] to node target[e].

    Nodes are (tile, rotation) pairs numbered 6 * tile + rotation.  Each edge
    is one child of one parent; ``weights`` are the probabilities of picking
    each incoming edge so that the attractor measure is area.
    """

    a: complex
    source: np.ndarray
    target: np.ndarray
    offsets: np.ndarray
    weights: np.ndarray
    node_weight: np.ndarray

    @property
    def contraction(self) -> float:
        return abs(self.a)


def build_ifs() -> IFS:
    """Derive the window IFS from the supertile rule.

    Every tile carries the control point of its cluster at P + xi^m r_t.
    A child (t', rho, u) of a parent (t, m) at P has its reference point at
    phi(parent reference) + xi^-m (u + xi^rho r_t' - phi(r_t)), whose star
    image gives the affine map on internal space.
    """
    r = rule()
    ref = {t: reference_offset(t)[0] for t in TILE_TYPES}
    f = [float(x) for x in frequency_vector()]
    src, tgt, off, w = [], [], [], []
    for t, name in enumerate(TILE_TYPES):
        for m in range(6):
            for c in r.children[name]:
                disp = xi_power(-m) * (c.offset + xi_power(c.rot) * ref[c.tile] - phi(ref[name]))
                t2 = TILE_INDEX[c.tile]
                src.append(6 * t + m)
                tgt.append(6 * t2 + (c.rot - m) % 6)
                off.append(disp.embed_internal())
                w.append(f[t] / (LAM_F * f[t2]))
    node_w = np.repeat(np.array(f), 6) / 6
    return IFS(MU.embed_internal(), np.array(src), np.array(tgt), np.array(off), np.array(w), node_w)


def _chaos_batch(ifs: IFS, n_points: int, rng: np.random.Generator, depth: int, tables
                 ) -> tuple[np.ndarray, np.ndarray]:
    anchor_nodes, p0, table, cum = tables
    width = table.shape[1]
    start = anchor_nodes[rng.choice(len(anchor_nodes), size=n_points, p=p0)]
    node = start
    path = np.empty((depth, n_points), dtype=np.int32)
    for k in range(depth):
        u = rng.random(n_points)
        j = np.minimum((u[:, None] >= cum[node]).sum(axis=1), width - 1)
        e = table[node, j]
        path[k] = e
        node = ifs.source[e]
    z = np.zeros(n_points, dtype=complex)
    for k in range(depth - 1, -1, -1):
        z = ifs.a * np.conj(z) + ifs.offsets[path[k]]
    return z, start


def _incoming_tables(ifs: IFS):
    anchor_nodes = np.array([6 * TILE_INDEX[a] + m for a in ANCHORS for m in range(6)])
    p0 = ifs.node_weight[anchor_nodes]
    n_nodes = 6 * len(TILE_TYPES)
    incoming = [np.flatnonzero(ifs.target == v) for v in range(n_nodes)]
    width = max(len(x) for x in incoming)
    table = np.zeros((n_nodes, width), dtype=np.int64)
    cum = np.ones((n_nodes, width))
    for v, es in enumerate(incoming):
        table[v, :len(es)] = es
        table[v, len(es):] = es[-1]
        c = np.cumsum(ifs.weights[es])
        cum[v, :len(es)] = c / c[-1]
    return anchor_nodes, p0 / p0.sum(), table, cum


def chaos_game(n_points: int, seed: int = 0, depth: int = 24, ifs: IFS | None = None,
               batch: int = 1_000_000) -> WindowCloud:
    """Sample the window by random inverse paths through the IFS.

    A start node is drawn among cluster anchors with probability given by
    the frequencies; then ``depth`` parents are drawn, each with the
    area-preserving incoming weights.  Composing the maps along the path
    applied to 0 gives a point within contraction**depth of the attractor.
    Batches use independent PCG64 streams spawned from ``seed``.
    """
    if n_points < 1:
        raise ValueError("n_points must be positive")
    ifs = ifs or build_ifs()
    tables = _incoming_tables(ifs)
    n_batches = -(-n_points // batch)
    streams = np.random.SeedSequence(seed).spawn(n_batches)
    zs, starts = [], []
    for k, ss in enumerate(streams):
        size = min(batch, n_points - k * batch)
        z, st = _chaos_batch(ifs, size, np.random.Generator(np.random.PCG64(ss)), depth, tables)
        zs.append(z)
        starts.append(st)
    start = np.concatenate(starts)
    lookup = np.full(6 * len(TILE_TYPES), -1, dtype=np.int8)
    for a, name in enumerate(ANCHORS):
        lookup[6 * TILE_INDEX[name]:6 * TILE_INDEX[name] + 6] = a
    return WindowCloud(np.concatenate(zs), lookup[start], (start % 6).astype(np.int8), "chaos", seed)


# --- cloud geometry ----------------------------------------------------------------

def _xy(z: np.ndarray) -> np.ndarray:
    return np.column_stack([z.real, z.imag])


def diameter(points: np.ndarray) -> float:
    from scipy.spatial import ConvexHull
    xy = _xy(points)
    if len(xy) < 3:
        return float(np.max(np.abs(points[:, None] - points[None]))) if len(xy) else 0.0
    hull = xy[ConvexHull(xy).vertices]
    d = hull[:, None, :] - hull[None, :, :]
    return float(np.sqrt((d ** 2).sum(-1)).max())


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two finite point sets in C."""
    from scipy.spatial import cKDTree
    xa, xb = _xy(a), _xy(b)
    return float(max(cKDTree(xb).query(xa)[0].max(), cKDTree(xa).query(xb)[0].max()))


def _grid(points: np.ndarray, cell: float, origin: complex) -> tuple[np.ndarray, np.ndarray]:
    return (np.floor((points.real - origin.real) / cell).astype(np.int64),
            np.floor((points.imag - origin.imag) / cell).astype(np.int64))


def double_occupancy(cloud: WindowCloud, cells: int) -> float:
    """Fraction of occupied grid cells that contain points of two or more classes."""
    pts = cloud.points
    lo = complex(pts.real.min(), pts.imag.min())
    span = max(np.ptp(pts.real), np.ptp(pts.imag)) * (1 + 1e-9)
    i, j = _grid(pts, span / cells, lo)
    key = (i * (cells + 1) + j) * 64 + cloud.classes
    pairs = np.unique(key)
    per_cell = np.unique(pairs // 64, return_counts=True)[1]
    return float(np.count_nonzero(per_cell > 1) / len(per_cell))


def box_counting(points: np.ndarray, sizes: Sequence[float]) -> tuple[float, list[int]]:
    """Slope of log N(eps) against log(1/eps), with the counts."""
    return box_counting_fixed(points, sizes, complex(points.real.min(), points.imag.min()))


def boundary_points(cloud: WindowCloud, cell: float) -> np.ndarray:
    """Centres of grid cells adjacent to an occupied cell whose majority class differs.

    Empty cells are ignored, so sampling holes inside a subwindow do not
    count as boundary.  Only occupied cells are stored, so memory grows with
    the number of points rather than with the grid area.
    """
    pts = cloud.points
    origin = complex(pts.real.min(), pts.imag.min())
    i, j = _grid(pts, cell, origin)
    nj = int(j.max()) + 3
    ncls = 6 * len(ANCHORS)
    key = ((i + 1) * nj + (j + 1)) * ncls + cloud.classes
    del i, j
    pairs, counts = np.unique(key, return_counts=True)
    del key
    cells, cls = pairs // ncls, pairs % ncls
    # majority class per cell: sort by cell, then by descending count
    order = np.lexsort((-counts, cells))
    cells, cls = cells[order], cls[order]
    first = np.ones(len(cells), dtype=bool)
    first[1:] = cells[1:] != cells[:-1]
    occ, label = cells[first], cls[first]
    edge = np.zeros(len(occ), dtype=bool)
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        nb = occ + di * nj + dj
        k = np.searchsorted(occ, nb)
        k[k == len(occ)] = 0
        hit = (occ[k] == nb) & (label[k] != label)
        edge |= hit
        edge[k[hit]] = True
    ii, jj = np.divmod(occ[edge], nj)
    return origin + (ii - 0.5) * cell + 1j * (jj - 0.5) * cell


def hausdorff_dimension() -> float:
    return HAUSDORFF_DIMENSION


def boundary_dimension(cloud: WindowCloud, cell: float, factors: Sequence[int] = (4, 8, 16, 32, 64)
                       ) -> tuple[float, list[int]]:
    """Box-counting dimension of the subwindow boundaries.

    The boundary is extracted at resolution ``cell``; box sizes start at
    four cells so the thickness of the extracted band does not bias the fit.
    """
    b = boundary_points(cloud, cell)
    return box_counting(b, [cell * k for k in factors])


def square_calibration(n_points: int = 1_000_000, seed: int = 0, levels: Sequence[int] = (3, 4, 5, 6, 7)
                       ) -> tuple[float, list[int]]:
    """Box-counting estimate for uniform samples of the unit square (should be 2)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    xy = rng.random((n_points, 2))
    pts = xy[:, 0] + 1j * xy[:, 1]
    return box_counting_fixed(pts, [2.0 ** -k for k in levels], 0j)


def box_counting_fixed(points: np.ndarray, sizes: Sequence[float], origin: complex) -> tuple[float, list[int]]:
    counts = []
    for s in sizes:
        i, j = _grid(points, s, origin)
        counts.append(len(np.unique(i * 10 ** 9 + j)))
    slope = np.polyfit(np.log(1 / np.asarray(sizes)), np.log(counts), 1)[0]
    return float(slope), counts
