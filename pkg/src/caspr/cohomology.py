"""Cohomology of the Anderson-Putnam complex of the collared meta-tiles.

Cochains are row vectors and coboundaries act by right multiplication.  Each
matrix has entries in Z[C6]; evaluating r at xi^k splits the computation into
six small pieces, and expanding r into permutation blocks gives the integral
version.

Index orders: vertices (p, q, s); edges (alpha, beta, gamma, delta, epsilon,
zeta, theta, eta); faces (Gamma, Delta, Theta, Lambda, Xi, Pi, Sigma, Phi, Psi).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import groupring as gr
from .groupring import EvaluatedMatrix, GroupRingMatrix, QXi
from .intlinalg import hnf, matmul, smith_normal_form, solve_integer

VERTICES = ("p", "q", "s")
EDGES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "theta", "eta")
FACES = ("Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi", "Sigma", "Phi", "Psi")
VERTEX_KINDS = ("pq", "pq", "generic")
EDGE_KINDS = ("generic",) * 7 + ("eta",)
FACE_KINDS = ("generic",) * 9


def _m(rows, rl, cl, rk, ck) -> GroupRingMatrix:
    return GroupRingMatrix.parse(rows, row_labels=rl, col_labels=cl, row_kinds=rk, col_kinds=ck)


# the vertex-edge incidence as printed; its delta column is inconsistent with
# the face boundaries (see BOUNDARY_1)
PRINTED_BOUNDARY_1 = _m([
    ["1", "0", "0", "0", "1", "0", "0", "0"],
    ["0", "-r", "0", "0", "-r", "0", "1", "1-r"],
    ["-r^3", "r^4", "1-r^5", "r^2-r^4", "0", "r^4-r^5", "-r^5", "0"],
], VERTICES, EDGES, VERTEX_KINDS, EDGE_KINDS)

# delta runs from r^5 s to r^2 s; with this column every face boundary is a cycle
BOUNDARY_1 = _m([
    ["1", "0", "0", "0", "1", "0", "0", "0"],
    ["0", "-r", "0", "0", "-r", "0", "1", "1-r"],
    ["-r^3", "r^4", "1-r^5", "r^2-r^5", "0", "r^4-r^5", "-r^5", "0"],
], VERTICES, EDGES, VERTEX_KINDS, EDGE_KINDS)

BOUNDARY_2 = _m([
    ["r^3-r", "-r^3", "0", "-r^3", "r^3", "0", "-r^3", "0", "r^3"],
    ["r^2-r^4", "-r", "-r+r^2-r^3", "r^2-r", "r^2-r^3", "r^2", "-r", "r^2-r", "r^2"],
    ["r^5", "r-1", "-1", "-1", "0", "0", "r", "-1", "0"],
    ["1", "0", "0", "0", "0", "0", "-r^5", "0", "0"],
    ["0", "r^5", "0", "r^5", "-r", "r^5-r", "r^5", "r^5-r^3", "-r-r^3+r^5"],
    ["0", "r^2", "0", "0", "0", "0", "-1", "0", "0"],
    ["0", "0", "-r^2", "r", "-r^2", "r", "0", "0", "0"],
    ["0", "0", "r", "0", "r", "0", "0", "r", "r"],
], EDGES, FACES, EDGE_KINDS, FACE_KINDS)

SUBSTITUTION_1 = _m([
    ["0", "-r^5", "0", "r^2", "0", "-r^5", "0", "0"],
    ["-r^5", "0", "r^2", "r", "0", "0", "0", "0"],
    ["0"] * 8,
    ["0"] * 8,
    ["r^2", "r", "r-r^5", "-r^4", "r+r^2-r^5", "r", "r+r^2-r^4-r^5", "r+r^2-r^4-r^5"],
    ["0"] * 8,
    ["0", "0", "r^2", "r^2-r^5", "0", "r^2", "r^2", "0"],
    ["r^3", "0", "-1", "0", "-1", "0", "-1", "r^3"],
], EDGES, EDGES, EDGE_KINDS, EDGE_KINDS)

SUBSTITUTION_2 = _m([
    ["1"] * 9,
    ["r^5"] * 9,
    ["1", "0", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "0", "r^2", "0", "0"],
    ["r", "r^4+r^5", "0", "r^5", "0", "r^5", "r^4+r^5", "0", "0"],
    ["r^4", "r", "r+r^5", "r", "r^5", "0", "r", "r", "0"],
    ["r"] * 9,
    ["r^2", "1+r^2", "1+r^2", "1+r^2", "1+r^2", "1+r^2", "1", "1+r^2", "1+r^2"],
    ["0", "0", "r^4", "r^4", "r+r^4", "r+r^4", "0", "r^4+r^5", "r+r^4+r^5"],
], FACES, FACES, FACE_KINDS, FACE_KINDS)

#: substitution on vertices: p -> p, q -> r^3 q, s -> s (up to reflection)
SUBSTITUTION_0 = _m([
    ["1", "0", "0"],
    ["0", "r^3", "0"],
    ["0", "0", "1"],
], VERTICES, VERTICES, VERTEX_KINDS, VERTEX_KINDS)


@dataclass(frozen=True)
class Constants:
    """The incidence and substitution matrices the computation runs on."""

    boundary_1: GroupRingMatrix = BOUNDARY_1
    boundary_2: GroupRingMatrix = BOUNDARY_2
    substitution_1: GroupRingMatrix = SUBSTITUTION_1
    substitution_2: GroupRingMatrix = SUBSTITUTION_2
    substitution_0: GroupRingMatrix = SUBSTITUTION_0

    @classmethod
    def from_json(cls, text: str) -> Constants:
        """Override any of the matrices by rows of strings like ``"r^2-r^5"``."""
        data = json.loads(text)
        shapes = {"boundary_1": (VERTICES, EDGES, VERTEX_KINDS, EDGE_KINDS),
                  "boundary_2": (EDGES, FACES, EDGE_KINDS, FACE_KINDS),
                  "substitution_1": (EDGES, EDGES, EDGE_KINDS, EDGE_KINDS),
                  "substitution_2": (FACES, FACES, FACE_KINDS, FACE_KINDS)}
        kw = {}
        for key, rows in data.items():
            if key not in shapes:
                raise ValueError(f"unknown matrix {key!r}")
            rl, cl, rk, ck = shapes[key]
            if len(rows) != len(rl) or any(len(r) != len(cl) for r in rows):
                raise ValueError(f"{key} has the wrong shape")
            kw[key] = _m(rows, rl, cl, rk, ck)
        return cls(**kw)


DEFAULT = Constants()


def constants_checksum() -> str:
    """SHA-256 over the transcribed constants (guards against silent edits)."""
    h = hashlib.sha256()
    for m in (PRINTED_BOUNDARY_1, BOUNDARY_1, BOUNDARY_2, SUBSTITUTION_1, SUBSTITUTION_2):
        for row in m.entries:
            h.update(";".join(str(e) for e in row).encode())
            h.update(b"\n")
    return h.hexdigest()


# --- per-representation pieces ---------------------------------------------

@dataclass(frozen=True)
class Deletions:
    k: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    faces: tuple[int, ...]

    @property
    def counts(self) -> tuple[int, int, int]:
        return (len(self.vertices), len(self.edges), len(self.faces))


def deletions(k: int) -> Deletions:
    """Which cells survive at r = xi^k.

    eta satisfies r^3 eta = -eta, so it only lives where xi^{3k} = -1 (k odd);
    p and q satisfy r^2 p = p, so they only live where xi^{2k} = 1 (k = 0, 3).
    """
    k %= 6
    verts = (0, 1, 2) if k in (0, 3) else (2,)
    edges = tuple(range(8)) if k % 2 else tuple(range(7))
    return Deletions(k, verts, edges, tuple(range(9)))


def _restrict(m: GroupRingMatrix, k: int, rows, cols) -> EvaluatedMatrix:
    ev = gr.evaluate(m, k)
    n, c = ev.shape
    return ev.drop([i for i in range(n) if i not in rows], [j for j in range(c) if j not in cols])


@dataclass
class Representation:
    k: int
    d1: EvaluatedMatrix
    d2: EvaluatedMatrix
    m1: EvaluatedMatrix
    m2: EvaluatedMatrix
    m0: EvaluatedMatrix


def representation(k: int, boundary_1: GroupRingMatrix | None = None,
                   constants: Constants = DEFAULT) -> Representation:
    d = deletions(k)
    c = constants
    return Representation(
        k % 6,
        _restrict(boundary_1 or c.boundary_1, k, d.vertices, d.edges),
        _restrict(c.boundary_2, k, d.edges, d.faces),
        _restrict(c.substitution_1, k, d.edges, d.edges),
        _restrict(c.substitution_2, k, d.faces, d.faces),
        _restrict(c.substitution_0, k, d.vertices, d.vertices),
    )


def two_step(m: EvaluatedMatrix) -> EvaluatedMatrix:
    """Two rounds of substitution: M* conj(M*)."""
    return m @ gr.conj_matrix(m)


def is_zero(m: EvaluatedMatrix) -> bool:
    return all(not x for r in m.rows for x in r)


def chain_condition(k: int, boundary_1: GroupRingMatrix | None = None, constants: Constants = DEFAULT) -> bool:
    rep = representation(k, boundary_1, constants)
    return is_zero(rep.d1 @ rep.d2)


def h1_dim(k: int) -> int:
    rep = representation(k)
    return (rep.d2.shape[0] - gr.rank(rep.d2)) - gr.rank(rep.d1)


def h2_dim(k: int) -> int:
    rep = representation(k)
    return rep.d2.shape[1] - gr.rank(rep.d2)


class RepresentativeError(ArithmeticError):
    """The substitution does not descend to the cohomology quotient."""


def _quotient_map(sub: list[list[QXi]], complement: list[list[QXi]],
                  op: EvaluatedMatrix, ambient: list[list[QXi]] | None) -> EvaluatedMatrix:
    """Matrix of v -> v @ op on (sub + complement) / sub, in the complement basis.

    ``ambient`` (if given) must be preserved by ``op``; ``sub`` always must be.
    """
    full = sub + complement
    for v in sub:
        if gr.solve_in_span(sub, gr.vec_mat(v, op)) is None:
            raise RepresentativeError("coboundaries are not preserved")
    if ambient is not None:
        for v in ambient:
            if gr.solve_in_span(full, gr.vec_mat(v, op)) is None:
                raise RepresentativeError("cocycles are not preserved")
    rows = []
    ns = len(sub)
    for v in complement:
        c = gr.solve_in_span(full, gr.vec_mat(v, op))
        if c is None:
            raise RepresentativeError("image leaves the cocycle space")
        rows.append(c[ns:])
    return EvaluatedMatrix(rows, op.k)


def h1_quotient(rep: Representation) -> tuple[list[list[QXi]], list[list[QXi]], list[list[QXi]]]:
    """(coboundary basis, complement basis, cocycle basis) for H^1."""
    cocycles = gr.left_kernel(rep.d2)
    bnd = gr.row_space_basis(rep.d1.rows)
    complement = []
    span = list(bnd)
    for z in cocycles:
        if gr.solve_in_span(span, z) is None:
            complement.append(z)
            span.append(z)
    return bnd, complement, cocycles


def substitution_on_h(k: int, degree: int, constants: Constants = DEFAULT) -> EvaluatedMatrix:
    """The induced map of two rounds of substitution on H^degree at r = xi^k."""
    rep = representation(k, constants=constants)
    if degree == 1:
        bnd, comp, cocycles = h1_quotient(rep)
        return _quotient_map(bnd, comp, two_step(rep.m1), cocycles)
    if degree == 2:
        bnd = gr.row_space_basis(rep.d2.rows)
        comp = gr.cokernel_basis(rep.d2)
        return _quotient_map(bnd, comp, two_step(rep.m2), None)
    raise ValueError("degree must be 1 or 2")


@dataclass
class RepresentationReport:
    k: int
    counts: tuple[int, int, int]
    rank_d1: int
    rank_d2: int
    h1: int
    h2: int
    h1_limit: int
    h2_limit: int
    h1_eigen: dict[str, int]
    h2_eigen: dict[str, int]
    h2_map_rank: int


@dataclass
class CohomologyReport:
    per_k: list[RepresentationReport] = field(default_factory=list)

    @property
    def h1_total(self) -> int:
        return sum(r.h1_limit for r in self.per_k)

    @property
    def h2_total(self) -> int:
        return sum(r.h2_limit for r in self.per_k)

    def format(self) -> str:
        lines = []
        for r in self.per_k:
            lines.append(f"[k={r.k}] cells={r.counts} rank_d1={r.rank_d1} rank_d2={r.rank_d2}")
            lines.append(f"  H1={r.h1} limit={r.h1_limit} eigen={_fmt_eigen(r.h1_eigen)}")
            lines.append(f"  H2={r.h2} map_rank={r.h2_map_rank} limit={r.h2_limit} eigen={_fmt_eigen(r.h2_eigen)}")
        lines.append(f"total H1 = C^{self.h1_total}")
        lines.append(f"total H2 = C^{self.h2_total}")
        return "\n".join(lines)


def _fmt_eigen(e: dict[str, int]) -> str:
    return ", ".join(f"({k})^{v}" for k, v in e.items()) or "-"


def representation_report(k: int, constants: Constants = DEFAULT) -> RepresentationReport:
    rep = representation(k, constants=constants)
    if not is_zero(rep.d1 @ rep.d2):
        raise RepresentativeError(f"boundary of boundary is nonzero at r = xi^{k}")
    r1, r2 = gr.rank(rep.d1), gr.rank(rep.d2)
    s1 = substitution_on_h(k, 1, constants)
    s2 = substitution_on_h(k, 2, constants)
    return RepresentationReport(
        k=k,
        counts=deletions(k).counts,
        rank_d1=r1,
        rank_d2=r2,
        h1=(rep.d2.shape[0] - r2) - r1,
        h2=rep.d2.shape[1] - r2,
        h1_limit=gr.eventual_rank(s1),
        h2_limit=gr.eventual_rank(s2),
        h1_eigen=gr.nonzero_eigenvalues(s1) if s1.shape[0] else {},
        h2_eigen=gr.nonzero_eigenvalues(s2) if s2.shape[0] else {},
        h2_map_rank=gr.rank(s2) if s2.shape[0] else 0,
    )


def cech_report(constants: Constants = DEFAULT) -> CohomologyReport:
    return CohomologyReport([representation_report(k, constants) for k in range(6)])


# --- integral cohomology ------------------------------------------------------

def expanded(m: GroupRingMatrix) -> list[list[int]]:
    return gr.expand_integer(m)


def _lattice(rows: list[list[int]]) -> list[list[int]]:
    return hnf(rows)


def _relative_structure(big: list[list[int]], small: list[list[int]]) -> tuple[int, list[int]]:
    """(free rank, torsion factors) of the group big / small, small inside big."""
    if not big:
        return 0, []
    coords = []
    for v in small:
        c = solve_integer(big, v)
        if c is None or any(x.denominator != 1 for x in c):
            raise ArithmeticError("sublattice is not contained in the lattice")
        coords.append([int(x) for x in c])
    factors = smith_normal_form(coords) if coords else []
    free = len(big) - len(factors)
    return free, [f for f in factors if f != 1]


@dataclass
class IntegralReport:
    h1_rank: int
    h2_rank: int
    h1_torsion: list[int]
    h2_torsion: list[int]
    h1_iterations: int
    h2_iterations: int
    stabilized: bool
    h1_complex: tuple[int, list[int]] = (0, [])
    h2_complex: tuple[int, list[int]] = (0, [])

    def format(self) -> str:
        def grp(rank, tors):
            parts = [f"Z^{rank}"] + [f"Z/{t}" for t in tors]
            return " + ".join(parts)
        status = "stabilized" if self.stabilized else "inconclusive (no stabilization)"
        return "\n".join([
            f"H1(AP complex, Z) = {grp(*self.h1_complex)}",
            f"H2(AP complex, Z) = {grp(*self.h2_complex)}",
            f"direct limit H1 = {grp(self.h1_rank, self.h1_torsion)} after {self.h1_iterations} steps",
            f"direct limit H2 = {grp(self.h2_rank, self.h2_torsion)} after {self.h2_iterations} steps",
            f"procedure: eventual image of iterated substitution plus coboundaries; {status}",
        ])


def _eventual_image(start: list[list[int]], op: list[list[int]], bnd: list[list[int]],
                    min_stable: int = 3, max_iter: int = 40) -> tuple[list[list[int]], int, bool]:
    """Iterate I_{n+1} = I_n @ op + B until the lattice repeats ``min_stable`` times."""
    cur = _lattice(start + bnd)
    stable = 0
    for n in range(1, max_iter + 1):
        img = matmul(cur, op) if cur else []
        nxt = _lattice(img + bnd)
        if nxt == cur:
            stable += 1
            if stable >= min_stable:
                return cur, n, True
        else:
            stable = 0
        cur = nxt
    return cur, max_iter, False


def integral_report(min_stable: int = 3, constants: Constants = DEFAULT) -> IntegralReport:
    c = constants
    d1 = expanded(c.boundary_1)
    d2 = expanded(c.boundary_2)
    if any(any(x) for x in matmul(d1, d2)):
        raise RepresentativeError("boundary of boundary is nonzero")
    m1 = expanded(c.substitution_1)
    m2 = expanded(c.substitution_2)
    m1b = expanded(c.substitution_1.bar())
    m2b = expanded(c.substitution_2.bar())
    op1 = matmul(m1, m1b)
    op2 = matmul(m2, m2b)
    nf = len(d2[0])
    from .intlinalg import left_kernel_integer
    cocycles = left_kernel_integer(d2)
    b1 = _lattice(d1)
    b2 = _lattice(d2)
    ident_faces = [[int(i == j) for j in range(nf)] for i in range(nf)]
    h1c = _relative_structure(_lattice(cocycles), b1)
    h2c = _relative_structure(_lattice(ident_faces), b2)
    i1, n1, ok1 = _eventual_image(cocycles, op1, b1, min_stable)
    i2, n2, ok2 = _eventual_image(ident_faces, op2, b2, min_stable)
    r1, t1 = _relative_structure(i1, b1)
    r2, t2 = _relative_structure(i2, b2)
    return IntegralReport(r1, r2, t1, t2, n1, n2, ok1 and ok2, h1c, h2c)
