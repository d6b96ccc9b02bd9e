"""The substitution engine.

One half-step scales by sqrt(lam) and reflects: z -> mu * conj(z) with
mu = (xi - lam + lam*xi) / 3, |mu|^2 = lam.  Each reflected meta-tile is then
replaced by a cluster of ordinary meta-tiles.  Two half-steps give the
self-similarity z -> lam * z.

Positions of tiles (vertex 0 of the hexagon) are stored as integer
coordinates over (1, xi, lam, lam*xi).  Starting from a seed at the origin
they stay in the edge module E, which the half-step map preserves, so no
irrational coordinates ever appear.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

import numpy as np

from .cohomology import SUBSTITUTION_1, SUBSTITUTION_2
from .groupring import GroupRingMatrix, Poly6
from .ring import LAM, LAM_F, ONE, XI, XI_C, RealQuadratic, RingElement, xi_power
from .tiles import (ANCHORS, CLUSTER_MEMBERS, CLUSTER_OF, CONTROL_OFFSETS, COMBHEX, DIRECTED, EDGE_TYPES, EDGE_VECTORS, TILE_TYPES, EdgeLabel,
                    area, relative_vertices, slot_direction)

MU = (XI - LAM + LAM * XI).scale(Fraction(1, 3))
TILE_INDEX = {t: i for i, t in enumerate(TILE_TYPES)}
EDGE_INDEX = {t: i for i, t in enumerate(EDGE_TYPES)}
FORMAT_VERSION = 1


def phi(z: RingElement) -> RingElement:
    """One half-step of inflation: mu * conj(z)."""
    return MU * z.conj()


# --- deriving the supertile rule --------------------------------------------------

# axial offsets of the neighbouring cell across the side traversed along xi^d
AXIAL = {0: (1, 0), 1: (0, 1), 2: (-1, 1), 3: (-1, 0), 4: (0, -1), 5: (1, -1)}


def _neighbour(cell, d):
    a, b = cell
    da, db = AXIAL[d]
    return (a + da, b + db)


def child_sides(tile: str, rot: int) -> dict[int, EdgeLabel]:
    """Side labels of a rotated child keyed by honeycomb direction."""
    return {(slot_direction(k) + rot) % 6: lab.rotated(rot) for k, lab in enumerate(COMBHEX[tile].slots)}


def _face_columns() -> dict[str, list[tuple[str, int]]]:
    cols = {t: [] for t in TILE_TYPES}
    for i, child in enumerate(TILE_TYPES):
        for j, parent in enumerate(TILE_TYPES):
            for coef, power in SUBSTITUTION_2.entries[i][j].terms():
                if coef < 0:
                    raise ValueError("face substitution entries must be nonnegative")
                cols[parent].extend([(child, power)] * coef)
    return cols


def _edge_columns() -> dict[str, Counter]:
    cols = {t: Counter() for t in EDGE_TYPES}
    for i, child in enumerate(EDGE_TYPES):
        for j, sup in enumerate(EDGE_TYPES):
            for coef, power in SUBSTITUTION_1.entries[i][j].terms():
                lab = EdgeLabel(child, power, 1 if coef > 0 else -1).normalized()
                cols[sup][lab] += abs(coef)
    return cols


def _matches(a: EdgeLabel, b: EdgeLabel) -> bool:
    return a.edge == b.edge and a.m == b.m and a.sign == -b.sign


def _honeycomb_layouts(kids: list[tuple[str, int]]) -> set:
    """All edge-to-edge honeycomb arrangements of ``kids`` (Gamma pinned at the origin)."""
    sides = [child_sides(*k) for k in kids]
    first = next(i for i, k in enumerate(kids) if k[0] == "Gamma")
    found = set()

    def rec(cells: dict, used: set):
        if len(used) == len(kids):
            found.add(tuple(sorted((c, kids[i]) for c, i in cells.items())))
            return
        front = sorted({_neighbour(c, d) for c in cells for d in range(6)} - cells.keys())
        for i, k in enumerate(kids):
            if i in used or any(kids[j] == k for j in range(i) if j not in used):
                continue
            for f in front:
                ok = True
                adj = 0
                for d in range(6):
                    n = _neighbour(f, d)
                    if n in cells:
                        if not _matches(sides[i][d], sides[cells[n]][(d + 3) % 6]):
                            ok = False
                            break
                        adj += 1
                if ok and adj:
                    cells[f] = i
                    used.add(i)
                    rec(cells, used)
                    del cells[f]
                    used.discard(i)

    rec({(0, 0): first}, {first})
    return found


def _cell_corner(cell, d, end: bool):
    # corner of a unit honeycomb cell, used only to order boundary sides
    a, b = cell
    x = -1j * a - 1j * b * complex(0.5, 3 ** 0.5 / 2)
    xi_d = complex(0.5, 3 ** 0.5 / 2) ** d
    z = x + xi_d * (-1j) * 0.5 + (1 if end else -1) * xi_d * (0.5 / 3 ** 0.5)
    return (round(z.real, 6), round(z.imag, 6))


def _boundary_ccw(layout: dict) -> list:
    edges = []
    for c, k in layout.items():
        cs = child_sides(*k)
        for d in range(6):
            if _neighbour(c, d) not in layout:
                edges.append((c, d, cs[d]))
    by_start = {_cell_corner(c, d, False): (c, d, lab) for c, d, lab in edges}
    cur = edges[0]
    seq = []
    for _ in range(len(edges)):
        seq.append(cur)
        cur = by_start.get(_cell_corner(cur[0], cur[1], True))
        if cur is None:
            return []
    if cur != edges[0] or len(set(map(repr, seq))) != len(edges):
        return []
    return seq


def _superedge_multiset(edge_cols, lab: EdgeLabel) -> Counter:
    # the reflection turns r^m into r^-m
    return Counter(EdgeLabel(x.edge, x.m - lab.m, x.sign * lab.sign).normalized()
                   for x, n in edge_cols[lab.edge].items() for _ in range(n))


def _cuts(parent: str, layout: dict, edge_cols) -> list[list[int]]:
    seq = _boundary_ccw(layout)
    if not seq:
        return []
    cw = [lab.reversed() for (_, _, lab) in reversed(seq)]
    want = [_superedge_multiset(edge_cols, lab) for lab in COMBHEX[parent].slots]
    n = len(cw)
    out = []
    for st in range(n):
        pos = st
        cuts = []
        ok = True
        for k in range(6):
            size = sum(want[k].values())
            if Counter(cw[(pos + i) % n] for i in range(size)) != want[k]:
                ok = False
                break
            cuts.append(pos % n)
            pos += size
        if ok and pos - st == n:
            out.append(cuts)
    return out


def _exact_positions(layout: dict) -> dict:
    cells = sorted(layout)
    start = (0, 0)
    pos = {start: RingElement()}
    todo = [start]
    while todo:
        c = todo.pop()
        for d in range(6):
            n = _neighbour(c, d)
            if n in layout and n not in pos:
                t1, r1 = layout[c]
                t2, r2 = layout[n]
                k1 = (d - 3 - r1) % 6
                k2 = ((d + 3) % 6 - 3 - r2) % 6
                v1 = relative_vertices(t1, r1)
                v2 = relative_vertices(t2, r2)
                pos[n] = pos[c] + v1[(k1 + 1) % 6] - v2[k2]
                todo.append(n)
    if len(pos) != len(cells):
        raise ArithmeticError("cluster is not connected")
    return pos


@dataclass(frozen=True)
class Child:
    tile: str
    rot: int
    offset: RingElement


@dataclass
class SupertileRule:
    children: dict[str, list[Child]]
    superedges: dict[str, list[EdgeLabel]]
    cells: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    def to_json(self) -> str:
        data = {
            "format": "caspr-supertiles",
            "version": FORMAT_VERSION,
            "children": {
                p: [{"tile": c.tile, "rot": c.rot, "offset": [_num(x) for x in c.offset.coords],
                     "cell": list(self.cells[p][i]) if p in self.cells else None}
                    for i, c in enumerate(kids)]
                for p, kids in self.children.items()
            },
            "superedges": {t: [[lab.edge, lab.m, lab.sign] for lab in w] for t, w in self.superedges.items()},
        }
        return json.dumps(data, indent=1, ensure_ascii=False, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> SupertileRule:
        data = json.loads(text)
        if data.get("format") != "caspr-supertiles" or data.get("version") != FORMAT_VERSION:
            raise ValueError("unrecognized supertile data file")
        children = {}
        cells = {}
        for p in TILE_TYPES:
            recs = data["children"][p]
            children[p] = [Child(r["tile"], r["rot"], RingElement(*(Fraction(x) for x in r["offset"])))
                           for r in recs]
            if all(r.get("cell") is not None for r in recs):
                cells[p] = [tuple(r["cell"]) for r in recs]
        superedges = {t: [EdgeLabel(e, m, s) for e, m, s in data["superedges"][t]] for t in EDGE_TYPES}
        return cls(children, superedges, cells)


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


def derive_supertile_rule() -> SupertileRule:
    """Recover the cluster layout of every supertile from the substitution matrices.

    For each parent the children listed by the face matrix are arranged on a
    honeycomb so that touching sides carry matching labels; a layout is kept
    when its outline splits into six runs that reproduce the edge matrix's
    superedges.  Exactly one layout survives for every parent.  Offsets are
    then fixed so that the outline's corners are the images of the parent's
    corners under the half-step map.
    """
    face_cols = _face_columns()
    edge_cols = _edge_columns()
    children: dict[str, list[Child]] = {}
    cells: dict[str, list] = {}
    words: dict[str, list[EdgeLabel]] = {}
    for parent in TILE_TYPES:
        good = []
        for lay in _honeycomb_layouts(face_cols[parent]):
            layout = dict(lay)
            cuts = _cuts(parent, layout, edge_cols)
            if cuts:
                good.append((layout, cuts))
        if len(good) != 1 or len(good[0][1]) != 1:
            raise ArithmeticError(f"supertile layout of {parent} is not unique")
        layout, (cut,) = good[0]
        pos = _exact_positions(layout)
        seq = _boundary_ccw(layout)
        n = len(seq)
        starts = []
        for c, d, _ in seq:
            k = (d - 3 - layout[c][1]) % 6
            starts.append(pos[c] + relative_vertices(*layout[c])[k])
        cw_starts = [starts[(n - j) % n] for j in range(n)]
        cw_labels = [lab.reversed() for (_, _, lab) in reversed(seq)]
        corners = [cw_starts[c] for c in cut]
        base = corners[0]
        pv = relative_vertices(parent, 0)
        for k in range(6):
            if corners[k] - base != phi(pv[k]):
                raise ArithmeticError(f"outline of {parent} does not match the inflated parent")
        order = sorted(layout, key=lambda c: (TILE_INDEX[layout[c][0]], layout[c][1], c))
        children[parent] = [Child(layout[c][0], layout[c][1], pos[c] - base) for c in order]
        cells[parent] = order
        for k, lab in enumerate(COMBHEX[parent].slots):
            size = sum(_superedge_multiset(edge_cols, lab).values())
            seg = [cw_labels[(cut[k] + i) % n] for i in range(size)]
            if lab.sign < 0:
                seg = [x.reversed() for x in reversed(seg)]
            word = [x.rotated(lab.m) for x in seg]
            if lab.edge in words and words[lab.edge] != word:
                raise ArithmeticError(f"superedge {lab.edge} is read inconsistently")
            words[lab.edge] = word
    missing = set(EDGE_TYPES) - words.keys()
    for t in missing:
        words[t] = []
    return SupertileRule(children, {t: words[t] for t in EDGE_TYPES}, cells)


def load_rule() -> SupertileRule:
    text = resources.files("caspr").joinpath("data/supertiles.json").read_text(encoding="utf-8")
    return SupertileRule.from_json(text)


_RULE: SupertileRule | None = None


def rule() -> SupertileRule:
    global _RULE
    if _RULE is None:
        _RULE = load_rule()
    return _RULE


# --- checks tying the rule to the matrices ------------------------------------------

def abelianize(r: SupertileRule | None = None) -> tuple[GroupRingMatrix, GroupRingMatrix]:
    """(face matrix, edge matrix) counted from the rule, as group-ring matrices."""
    r = r or rule()
    face = [[Poly6() for _ in TILE_TYPES] for _ in TILE_TYPES]
    for j, parent in enumerate(TILE_TYPES):
        for c in r.children[parent]:
            i = TILE_INDEX[c.tile]
            face[i][j] = face[i][j] + Poly6.from_terms([(1, c.rot)])
    edge = [[Poly6() for _ in EDGE_TYPES] for _ in EDGE_TYPES]
    for j, t in enumerate(EDGE_TYPES):
        for lab in r.superedges[t]:
            i = EDGE_INDEX[lab.edge]
            edge[i][j] = edge[i][j] + Poly6.from_terms([(lab.sign, lab.m)])
    fm = GroupRingMatrix(tuple(map(tuple, face)), SUBSTITUTION_2.row_labels, SUBSTITUTION_2.col_labels,
                         SUBSTITUTION_2.row_kinds, SUBSTITUTION_2.col_kinds)
    em = GroupRingMatrix(tuple(map(tuple, edge)), SUBSTITUTION_1.row_labels, SUBSTITUTION_1.col_labels,
                         SUBSTITUTION_1.row_kinds, SUBSTITUTION_1.col_kinds)
    return fm, em


def _eta_reduce(m: GroupRingMatrix) -> GroupRingMatrix:
    # rows of eta only matter up to r^3 = -1
    rows = []
    for i, row in enumerate(m.entries):
        if m.row_kinds[i] == "eta":
            row = tuple(Poly6(tuple(p.coeffs[j] - p.coeffs[j + 3] for j in range(3)) + (0, 0, 0)) for p in row)
        rows.append(row)
    return GroupRingMatrix(tuple(rows), m.row_labels, m.col_labels, m.row_kinds, m.col_kinds)


def abelianization_diff(r: SupertileRule | None = None) -> list[str]:
    """Entrywise differences between the rule's counts and the stored matrices."""
    fm, em = abelianize(r)
    out = []
    for i in range(9):
        for j in range(9):
            if fm.entries[i][j] != SUBSTITUTION_2.entries[i][j]:
                out.append(f"face[{TILE_TYPES[i]},{TILE_TYPES[j]}]: {fm.entries[i][j]} != {SUBSTITUTION_2.entries[i][j]}")
    a, b = _eta_reduce(em), _eta_reduce(SUBSTITUTION_1)
    for i in range(8):
        for j in range(8):
            if a.entries[i][j] != b.entries[i][j]:
                out.append(f"edge[{EDGE_TYPES[i]},{EDGE_TYPES[j]}]: {em.entries[i][j]} != {SUBSTITUTION_1.entries[i][j]}")
    return out


def _ring_eval(p: Poly6, k: int = 1) -> RingElement:
    out = RingElement()
    for c, i in p.terms():
        out = out + xi_power(i * k).scale(c)
    return out


def edge_eigencheck(vectors: dict[str, RingElement] | None = None, column: bool = False) -> list[RingElement]:
    """Residuals of two rounds of edge inflation acting on the edge vectors, minus lam e.

    Edge vectors are a row vector acted on from the right, as cochains are:
    e @ M1*(xi) @ conj(M1*(xi)).  Column ``j`` of M1* lists the pieces of
    superedge j, so ``e @ M1*`` is the vector of superedge displacements.
    ``column=True`` applies the product to e as a column instead (this does
    not give an eigenvector and is kept as a contrast).
    """
    vectors = vectors or EDGE_VECTORS
    m = [[_ring_eval(SUBSTITUTION_1.entries[i][j]) for j in range(8)] for i in range(8)]
    if not column:
        m = [list(c) for c in zip(*m)]
    mc = [[x.conj() for x in row] for row in m]
    e = [vectors[t] for t in EDGE_TYPES]
    if column:
        w = [sum((mc[i][j] * e[j] for j in range(8)), RingElement()) for i in range(8)]
        v = [sum((m[i][j] * w[j] for j in range(8)), RingElement()) for i in range(8)]
    else:
        # (e M)(conj M) as columns: transpose(conj M) transpose(M) e
        w = [sum((m[i][j] * e[j] for j in range(8)), RingElement()) for i in range(8)]
        v = [sum((mc[i][j] * w[j] for j in range(8)), RingElement()) for i in range(8)]
    return [v[i] - LAM * e[i] for i in range(8)]


def superedge_vector(edge: str, r: SupertileRule | None = None) -> RingElement:
    r = r or rule()
    return sum((lab.vector() for lab in r.superedges[edge]), RingElement())


# --- patches -------------------------------------------------------------------------

def _phi_matrix() -> np.ndarray:
    # coords(phi(x)) = coords(x) @ C @ M_mu; entries are thirds
    rows = []
    for b in (ONE, XI, LAM, LAM * XI):
        rows.append(phi(b).coords)
    return np.array([[int(3 * x) for x in r] for r in rows], dtype=np.int64)


PHI3 = _phi_matrix()
BASIS_C = np.array([1, XI_C, LAM_F, LAM_F * XI_C])
ROT = [np.array([[int(x) for x in (b * xi_power(m)).coords] for b in (ONE, XI, LAM, LAM * XI)],
                dtype=np.int64) for m in range(6)]


@dataclass
class Patch:
    """Tiles as parallel arrays: type index, rotation, integer position coordinates."""

    types: np.ndarray
    rots: np.ndarray
    pos: np.ndarray
    parity: int = 0
    parents: np.ndarray | None = None
    projection: str | None = None

    def __len__(self) -> int:
        return len(self.types)

    @classmethod
    def seed(cls, tile: str = "Gamma", rot: int = 0) -> Patch:
        return cls(np.array([TILE_INDEX[tile]], dtype=np.int8), np.array([rot % 6], dtype=np.int8),
                   np.zeros((1, 4), dtype=np.int64), 0)

    @classmethod
    def empty(cls, parity: int = 0) -> Patch:
        return cls(np.zeros(0, dtype=np.int8), np.zeros(0, dtype=np.int8), np.zeros((0, 4), dtype=np.int64), parity)

    @property
    def hand(self) -> str:
        """All tiles of a patch are right-handed meta-tiles; only supertile outlines are mirrored."""
        return "right"

    def position(self, i: int) -> RingElement:
        return RingElement(*(int(x) for x in self.pos[i]))

    def type_counts(self) -> np.ndarray:
        return np.bincount(self.types.astype(np.int64), minlength=9)

    def sorted(self) -> Patch:
        key = np.lexsort((self.pos[:, 3], self.pos[:, 2], self.pos[:, 1], self.pos[:, 0], self.rots, self.types))
        return Patch(self.types[key], self.rots[key], self.pos[key], self.parity,
                     None if self.parents is None else self.parents[key])

    def vertices_complex(self) -> np.ndarray:
        """(n, 6) complex vertex coordinates."""
        return self.vertex_coords().astype(float) @ BASIS_C

    def vertex_coords(self) -> np.ndarray:
        """(n, 6, 4) exact integer vertex coordinates."""
        rel = _relative_table()
        return self.pos[:, None, :] + rel[self.types, self.rots]


_REL = None


def _relative_table() -> np.ndarray:
    global _REL
    if _REL is None:
        rel = np.zeros((9, 6, 6, 4), dtype=np.int64)
        for t, name in enumerate(TILE_TYPES):
            for r in range(6):
                for k, v in enumerate(relative_vertices(name, r)):
                    rel[t, r, k] = [int(x) for x in v.coords]
        _REL = rel
    return _REL


LIMIT = 2 ** 60


def apply_phi(pos: np.ndarray) -> np.ndarray:
    if pos.size and np.abs(pos).max() > LIMIT // 1000:
        raise OverflowError("coordinates too large for int64 arithmetic")
    t = pos @ PHI3
    if np.any(t % 3):
        raise ArithmeticError("position left the edge module")
    return t // 3


def inflate_once(p: Patch, r: SupertileRule | None = None, budget: int | None = None) -> Patch:
    """Replace every reflected, sqrt(lam)-scaled tile by its cluster of children.

    A parent at rotation m sends child (t, rho, u) to rotation rho - m at
    phi(P) + xi^-m u, since phi(xi^m z) = xi^-m phi(z).
    """
    r = r or rule()
    if len(p) == 0:
        return Patch.empty(1 - p.parity)
    total = sum(len(r.children[TILE_TYPES[t]]) * int(n) for t, n in enumerate(p.type_counts()))
    if budget is not None and total > budget:
        raise MemoryError(f"inflation would create {total} tiles (budget {budget})")
    base = apply_phi(p.pos)
    types, rots, pos, parents = [], [], [], []
    idx_all = np.arange(len(p))
    for t in range(9):
        kids = r.children[TILE_TYPES[t]]
        for m in range(6):
            sel = idx_all[(p.types == t) & (p.rots == m)]
            if not len(sel):
                continue
            rot_back = ROT[(-m) % 6]
            for c in kids:
                off = np.array([int(x) for x in c.offset.coords], dtype=np.int64) @ rot_back
                types.append(np.full(len(sel), TILE_INDEX[c.tile], dtype=np.int8))
                rots.append(np.full(len(sel), (c.rot - m) % 6, dtype=np.int8))
                pos.append(base[sel] + off)
                parents.append(sel)
    out = Patch(np.concatenate(types), np.concatenate(rots), np.concatenate(pos), 1 - p.parity,
                np.concatenate(parents))
    order = np.lexsort((out.pos[:, 3], out.pos[:, 2], out.pos[:, 1], out.pos[:, 0], out.rots, out.types))
    return Patch(out.types[order], out.rots[order], out.pos[order], out.parity, out.parents[order])


def inflate_squared(p: Patch, r: SupertileRule | None = None, budget: int | None = None) -> Patch:
    if p.parity % 2:
        raise ValueError("inflate_squared needs an even-parity patch")
    q = inflate_once(inflate_once(p, r, budget), r, budget)
    return q


def generate_patch(seed: str = "Gamma", steps: int = 4, rot: int = 0, budget: int | None = 5_000_000,
                   history: bool = False):
    """Inflate a single seed tile ``steps`` half-steps.  With ``history`` return every level."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    p = Patch.seed(seed, rot)
    levels = [p]
    for _ in range(steps):
        p = inflate_once(p, budget=budget)
        levels.append(p)
    return levels if history else p


def type_counts_after(seed: str, steps: int) -> list[int]:
    """Tile-type counts after ``steps`` half-steps, by counting children (no geometry)."""
    a = substitution_matrix_at_one()
    v = [0] * 9
    v[TILE_INDEX[seed]] = 1
    for _ in range(steps):
        v = [sum(a[i][j] * v[j] for j in range(9)) for i in range(9)]
    return v


# --- frequencies ----------------------------------------------------------------------

EXPECTED_FREQUENCIES = (
    RealQuadratic(8, -1), RealQuadratic(8, -1), RealQuadratic(63, -8), RealQuadratic(63, -8),
    RealQuadratic(-118, 15), RealQuadratic(-118, 15), RealQuadratic(8, -1), RealQuadratic(-110, 14),
    RealQuadratic(197, -25),
)


def substitution_matrix_at_one() -> list[list[int]]:
    return [[int(SUBSTITUTION_2.entries[i][j].evaluate(0).a) for j in range(9)] for i in range(9)]


def frequency_vector() -> list[RealQuadratic]:
    """Right eigenvector of the face matrix at r = 1 for the eigenvalue lam, summing to 1.

    Solved exactly over Q(sqrt 15); lam is the Perron eigenvalue of one
    half-step (lam^2 for the squared substitution).
    """
    a = substitution_matrix_at_one()
    lam = RealQuadratic(0, 1)
    rows = [[RealQuadratic(a[i][j]) - (lam if i == j else RealQuadratic()) for j in range(9)] for i in range(9)]
    # Gaussian elimination, kernel of dimension one
    n = 9
    piv = []
    r = 0
    for c in range(n):
        k = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = RealQuadratic(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv]
    if len(free) != 1:
        raise ArithmeticError("Perron eigenspace is not one-dimensional")
    f = free[0]
    v = [RealQuadratic() for _ in range(n)]
    v[f] = RealQuadratic(1)
    for i, p in enumerate(piv):
        v[p] = -rows[i][f]
    total = sum(v, RealQuadratic())
    return [x / total for x in v]


def average_area() -> RealQuadratic:
    """sum_i f_i area_i, as a multiple of sqrt 3."""
    f = frequency_vector()
    return sum((fi * area(t) for fi, t in zip(f, TILE_TYPES)), RealQuadratic())


# --- clusters and border forcing ------------------------------------------------------

CLUSTERS = tuple(tuple(m[0] for m in mem) for mem in CLUSTER_MEMBERS.values())
CLUSTER_ANCHORS = ANCHORS


def cluster_counts(p: Patch) -> dict[tuple[str, ...], list[int]]:
    c = p.type_counts()
    return {cl: [int(c[TILE_INDEX[t]]) for t in cl] for cl in CLUSTERS}


def _coords(z: RingElement) -> np.ndarray:
    if not z.integral:
        raise ArithmeticError(f"{z} is not integral")
    return np.array(z.int_coords(), dtype=np.int64)


def control_points(p: Patch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Control points of all clusters of a patch, one per anchor tile.

    Returns (coordinates over the integral basis, anchor index into ANCHORS,
    anchor rotation).
    """
    coords, kinds, rots = [], [], []
    for a, name in enumerate(ANCHORS):
        c = _coords(CONTROL_OFFSETS[name])
        for m in range(6):
            sel = (p.types == TILE_INDEX[name]) & (p.rots == m)
            if not sel.any():
                continue
            coords.append(p.pos[sel] + c @ ROT[m])
            kinds.append(np.full(int(sel.sum()), a, dtype=np.int8))
            rots.append(np.full(int(sel.sum()), m, dtype=np.int8))
    if not coords:
        return np.zeros((0, 4), dtype=np.int64), np.zeros(0, dtype=np.int8), np.zeros(0, dtype=np.int8)
    return np.concatenate(coords), np.concatenate(kinds), np.concatenate(rots)


def cluster_partners(p: Patch, member: str) -> dict[tuple[int, tuple[int, ...]], int]:
    """Tally how tiles of type ``member`` sit relative to the nearest anchor sharing a side.

    Keys are (rotation relative to the anchor, offset in the anchor frame).
    Used to recover the cluster table from a generated patch.
    """
    anchor = CLUSTER_OF[member]
    sides = _side_keys(p)
    tally = Counter()
    ia, im = TILE_INDEX[anchor], TILE_INDEX[member]
    for users in sides.values():
        if len(users) != 2:
            continue
        (x, _), (y, _) = users
        for a, b in ((x, y), (y, x)):
            if p.types[a] == ia and p.types[b] == im:
                m = int(p.rots[a])
                off = (p.position(b) - p.position(a)) * xi_power(-m)
                tally[(int(p.rots[b] - m) % 6, off.int_coords())] += 1
    return dict(tally)


def cluster_ids(p: Patch) -> np.ndarray:
    """Index of the anchor tile of each tile's cluster, or -1 if the anchor is outside the patch."""
    where = {(int(t), int(r), tuple(int(x) for x in pos)): i
             for i, (t, r, pos) in enumerate(zip(p.types, p.rots, p.pos))}
    out = np.full(len(p), -1, dtype=np.int64)
    for anchor, members in CLUSTER_MEMBERS.items():
        for name, rho, off in members:
            idx = np.flatnonzero(p.types == TILE_INDEX[name])
            for i in idx:
                m = (int(p.rots[i]) - rho) % 6
                pos = p.position(i) - xi_power(m) * off
                out[i] = where.get((TILE_INDEX[anchor], m, pos.int_coords()), -1)
    return out


def _side_keys(p: Patch):
    """Map each side (exact endpoints, orientation-free) to the (tile, slot) pairs using it."""
    vc = p.vertex_coords()
    sides = defaultdict(list)
    for i in range(len(p)):
        for k in range(6):
            a = tuple(int(x) for x in vc[i, k])
            b = tuple(int(x) for x in vc[i, (k + 1) % 6])
            sides[(a, b) if a < b else (b, a)].append((i, k))
    return sides


@dataclass
class BorderReport:
    depth: int
    environments: dict[str, int]
    pairs_seen: dict[str, int]

    def format(self) -> str:
        parts = [f"{t}: {self.environments.get(t, 0)} env ({self.pairs_seen.get(t, 0)} seen)" for t in EDGE_TYPES]
        return f"depth {self.depth}: " + "; ".join(parts)


def border_force_check(levels: Sequence[Patch], depth: int = 1, external: bool = True) -> BorderReport:
    """Count distinct environments of shared ancestral sides ``depth`` levels up.

    For every pair of adjacent ancestors at level ``-1-depth`` the tiles of the
    final level having a side on their common boundary are collected in the
    frame of the ancestral side (its start at the origin, its label rotated to
    r^0 with positive sign).  Depth 0 compares the two tiles on each side.
    With ``external`` only sides between two different clusters are used;
    sides whose cluster is cut off by the patch boundary are skipped.
    """
    final = levels[-1]
    anc_level = len(levels) - 1 - depth
    if anc_level < 0:
        raise ValueError("not enough levels for this depth")
    # ancestor index of every final tile
    anc = np.arange(len(final))
    for lvl in range(len(levels) - 1, anc_level, -1):
        anc = levels[lvl].parents[anc]
    ancestors = levels[anc_level]
    a_sides = _side_keys(ancestors)
    f_sides = _side_keys(final)
    # ancestral shared sides
    clus = cluster_ids(ancestors) if external else np.arange(len(ancestors))
    shared = {}
    for key, users in a_sides.items():
        if len(users) == 2:
            (i, ki), (j, kj) = users
            if clus[i] < 0 or clus[j] < 0 or clus[i] == clus[j]:
                continue
            shared[(min(i, j), max(i, j))] = ((i, ki), (j, kj))
    # final-level sides on the boundary between two ancestors
    touching = defaultdict(set)
    for key, users in f_sides.items():
        if len(users) == 2:
            (x, _), (y, _) = users
            ax, ay = int(anc[x]), int(anc[y])
            if ax != ay:
                touching[(min(ax, ay), max(ax, ay))].update((x, y))
    envs = defaultdict(set)
    seen = Counter()
    for pair, ((i, ki), (j, kj)) in shared.items():
        lab_i = COMBHEX[TILE_TYPES[ancestors.types[i]]].slots[ki].rotated(int(ancestors.rots[i]))
        if lab_i.sign > 0:
            a, ka, lab = i, ki, lab_i
        else:
            lab_j = COMBHEX[TILE_TYPES[ancestors.types[j]]].slots[kj].rotated(int(ancestors.rots[j]))
            a, ka, lab = j, kj, lab_j
        start = ancestors.position(a) + relative_vertices(TILE_TYPES[ancestors.types[a]], int(ancestors.rots[a]))[ka]
        end = start + lab.vector()
        if depth == 0:
            src, tiles, rf, s0, s1 = ancestors, [i, j], -lab.m, start, end
        else:
            s0, s1 = start, end
            for _ in range(depth):
                s0, s1 = phi(s0), phi(s1)
            src, tiles, rf = final, sorted(touching.get(pair, ())), (lab.m if depth % 2 else -lab.m)
        rf_elem = xi_power(rf)
        env = tuple(sorted((int(src.types[t]), int((src.rots[t] + rf) % 6),
                            ((src.position(t) - s0) * rf_elem).int_coords()) for t in tiles))
        if not DIRECTED[lab.edge]:
            # an undirected side looks the same from both ends: identify the half-turn
            far = ((s1 - s0) * rf_elem)
            turned = tuple(sorted((ty, (r + 3) % 6, (far - RingElement(*pos)).int_coords()) for ty, r, pos in env))
            env = min(env, turned)
        envs[lab.edge].add(env)
        seen[lab.edge] += 1
    return BorderReport(depth, {t: len(v) for t, v in envs.items()}, dict(seen))


# --- patch files -------------------------------------------------------------------------

def write_patch(p: Patch, fh, seed: str = "", steps: int = 0, projection: str | None = None) -> None:
    """Write a patch; ``projection`` names the reprojection map of a deformed patch."""
    q = p.sorted()
    fh.write(f"# caspr-patch v{FORMAT_VERSION}\n")
    fh.write(f"# seed={seed} steps={steps} parity={q.parity} tiles={len(q)}\n")
    if projection is not None:
        fh.write(f"# projection: {projection}\n")
    fh.write("# tile rot hand a b c d den\n")
    for t, r, pos in zip(q.types, q.rots, q.pos):
        fh.write(f"{TILE_TYPES[t]} {int(r)} right {' '.join(str(int(x)) for x in pos)} 1\n")


def read_patch(fh) -> Patch:
    """Read a patch file.  A ``projection:`` header is kept as ``Patch.projection``."""
    header = fh.readline()
    if not header.startswith("# caspr-patch v"):
        raise ValueError("not a patch file")
    if int(header.strip().split("v")[-1]) != FORMAT_VERSION:
        raise ValueError("unsupported patch file version")
    meta = fh.readline()
    parity = 0
    for tok in meta[1:].split():
        if tok.startswith("parity="):
            parity = int(tok.split("=")[1])
    types, rots, pos = [], [], []
    projection = None
    for line in fh:
        if line.startswith("# projection:"):
            projection = line.split(":", 1)[1].strip()
            continue
        if line.startswith("#") or not line.strip():
            continue
        try:
            name, r, _hand, a, b, c, d, den = line.split()
        except ValueError:
            raise ValueError(f"malformed patch record: {line.strip()!r}") from None
        if name not in TILE_INDEX:
            raise ValueError(f"unknown tile type {name!r}")
        if den != "1":
            raise ValueError("fractional positions are not supported")
        types.append(TILE_INDEX[name])
        rots.append(int(r))
        pos.append([int(a), int(b), int(c), int(d)])
    out = Patch(np.array(types, dtype=np.int8), np.array(rots, dtype=np.int8) % 6,
                np.array(pos, dtype=np.int64).reshape(-1, 4), parity)
    out.projection = projection
    return out
