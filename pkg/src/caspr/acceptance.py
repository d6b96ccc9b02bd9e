"""The twelve acceptance checks, shared by ``caspr verify`` and the test suite.

Each check returns a :class:`Result`; a check never raises for a wrong
value, it reports it.  Exceptions inside a check are caught by :func:`run`
and turned into a failure with the error text as detail.
"""
from __future__ import annotations

import io
import math
import tempfile
import time
import traceback
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import cohomology as coh
from . import cps
from . import groupring as gr
from . import inflation as inf
from . import modules as mod
from . import reprojection as rp
from .ring import I_SQRT5, RealQuadratic
from .tiles import ANCHORS, COMBHEX, EDGE_TYPES, TILE_TYPES, closure, is_simple, tile_polygon

# tolerances, as stated in the criteria
COHOMOLOGY_SECONDS = 10.0
INTEGRAL_SECONDS = 60.0
DENSITY_SECONDS = 120.0
DENSITY_TOL = 0.01
FREQUENCY_TOL = 0.01
WINDOW_TOL = 0.02
DIMENSION_CLOSED_FORM = 1.110977
DIMENSION_DIGITS_TOL = 1e-6
DIMENSION_BOX_TOL = 0.1
SQUARE_TOL = 0.05

# run parameters
DENSITY_STEPS = 6
FREQUENCY_STEPS = (2, 4, 6, 8)
WINDOW_POINTS = 100_000
WINDOW_STEPS = (2, 4, 6)
WINDOW_GRIDS = (20, 40, 80, 160)
BOUNDARY_POINTS = 16_000_000
BOUNDARY_CELL = 0.0025
REPROJECTION_STEPS = 4
SEED = 1


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.number:2d}: {self.title} ({self.seconds:.1f} s)"

    def format(self) -> str:
        return "\n".join([self.line()] + [f"    {d}" for d in self.details])


class _Checks:
    """Collects named sub-checks; the criterion passes when all of them do."""

    def __init__(self) -> None:
        self.ok = True
        self.details: list[str] = []

    def __call__(self, name: str, cond: bool, info: str = "") -> bool:
        cond = bool(cond)
        self.ok &= cond
        self.details.append(f"[{'ok' if cond else 'MISMATCH'}] {name}" + (f": {info}" if info else ""))
        return cond


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# --- 1. complex cohomology --------------------------------------------------------

def check_cohomology(c: _Checks) -> None:
    t0 = time.perf_counter()
    report = coh.cech_report()
    h1 = tuple(r.h1_limit for r in report.per_k)
    h2 = tuple(r.h2_limit for r in report.per_k)
    c("H1 per representation", h1 == (0, 2, 0, 0, 0, 2), str(h1))
    c("direct-limit H2 per representation", h2 == (2, 2, 1, 2, 1, 2), str(h2))
    factor = gr.KNOWN_FACTORS["t^2-8t+1"]
    for k in (1, 5):
        p = gr.charpoly(coh.substitution_on_h(k, 1))
        n = gr.multiplicity(factor, p)
        c(f"t^2-8t+1 divides the H1 map at r=xi^{k} once", n == 1, f"multiplicity {n}")
    c("totals", (report.h1_total, report.h2_total) == (4, 10), f"C^{report.h1_total}, C^{report.h2_total}")
    dt = time.perf_counter() - t0
    c(f"under {COHOMOLOGY_SECONDS:.0f} s", dt < COHOMOLOGY_SECONDS, f"{dt:.2f} s")


# --- 2. integral cohomology -------------------------------------------------------

def check_integral(c: _Checks) -> None:
    t0 = time.perf_counter()
    r = coh.integral_report()
    c("stabilized", r.stabilized, f"after {r.h1_iterations}/{r.h2_iterations} steps")
    c("H1 = Z^4", r.h1_rank == 4 and not r.h1_torsion, f"rank {r.h1_rank} torsion {r.h1_torsion}")
    c("H2 = Z^10", r.h2_rank == 10 and not r.h2_torsion, f"rank {r.h2_rank} torsion {r.h2_torsion}")
    dt = time.perf_counter() - t0
    c(f"under {INTEGRAL_SECONDS:.0f} s", dt < INTEGRAL_SECONDS, f"{dt:.2f} s")


# --- 3. edge eigen-identity -------------------------------------------------------

def check_edge_eigen(c: _Checks) -> None:
    res = inf.edge_eigencheck()
    bad = [t for t, r in zip(EDGE_TYPES, res) if r]
    c("e M1*(xi) conj(M1*(xi)) = lam e", not bad, "zero residual" if not bad else f"nonzero at {bad}")


# --- 4. geometry against topology -------------------------------------------------

def check_geometry(c: _Checks) -> None:
    diff = inf.abelianization_diff()
    c("abelianized supertile rule equals M1*, M2*", not diff, "; ".join(diff[:3]))
    open_tiles = [t for t in TILE_TYPES if closure(t)]
    c("all nine tiles close", not open_tiles, ", ".join(open_tiles))
    non_simple = [t for t in TILE_TYPES if not open_tiles and not is_simple(tile_polygon(t))]
    c("all nine tiles are simple polygons", not non_simple, ", ".join(non_simple))
    d2 = coh.DEFAULT.boundary_2
    wrong = [t for j, t in enumerate(TILE_TYPES)
             if COMBHEX[t].boundary_chain() != [d2.entries[i][j] for i in range(len(EDGE_TYPES))]]
    c("face boundary chains equal the boundary-2 columns", not wrong, ", ".join(wrong))


# --- 5. module arithmetic ---------------------------------------------------------

def check_modules(c: _Checks) -> None:
    o, e, lat = mod.ORDER, mod.EDGE_MODULE, mod.RETURN_MODULE
    idx = (mod.index(o, e), mod.index(e, lat), mod.index(o, lat))
    c("[O:E], [E:L], [O:L]", idx == (9, 9, 81), str(idx))
    c("L is an ideal of O", mod.is_ideal(lat))
    c("L = O g1 + O g3", mod.ideal_generated_by([mod.G1, mod.G3]) == lat)
    ok = mod.maximal_order()
    chain = [lat, o, ok, mod.dual_module(ok), mod.dual_module(o), mod.dual_module(lat)]
    steps = tuple(mod.index(chain[i + 1], chain[i]) for i in range(5))
    c("dual chain indices", steps == (81, 3, 225, 3, 81), str(steps))
    c("dual(L) = (i sqrt5/135) L", mod.dual_module(lat) == mod.return_dual_expected())
    pair = (mod.index(ok, o), mod.index(o, mod.i_sqrt3_maximal_order()))
    c("[O_K:O], [O:i sqrt3 O_K]", pair == (3, 3), str(pair))


# --- 6. densities -------------------------------------------------------------------

def check_densities(c: _Checks) -> None:
    d = cps.density_report()
    eight_minus_lam = RealQuadratic(8, -1)
    c("V = 3645", d.covolume == 3645, str(d.covolume))
    c("A = (135 sqrt3/2)(8 - lam)", d.window_area == eight_minus_lam * Fraction(135, 2),
      f"({d.window_area}) sqrt3")
    expected_rho = eight_minus_lam * Fraction(1, 54)
    c("rho1 = (8 - lam) sqrt3/54", d.rho1 == expected_rho, f"({d.rho1}) sqrt3")
    c("rho2 = rho1", d.rho2 == d.rho1, f"({d.rho2}) sqrt3")
    f = inf.frequency_vector()
    c("frequency vector", tuple(f) == inf.EXPECTED_FREQUENCIES, ", ".join(str(x) for x in f))
    c("f . areas = 90 sqrt3", d.average_area == RealQuadratic(90), f"({d.average_area}) sqrt3")
    t0 = time.perf_counter()
    p = inf.generate_patch("Gamma", DENSITY_STEPS)
    emp, n = cps.patch_density(p, DENSITY_STEPS, "Gamma")
    dt = time.perf_counter() - t0
    rho = float(expected_rho) * math.sqrt(3)
    c("patch has at least 10^4 tiles", len(p) >= 10_000, f"{len(p)} tiles")
    c(f"empirical density within {DENSITY_TOL:.0%}", _rel(emp, rho) < DENSITY_TOL,
      f"{emp:.7f} from {n} points against {rho:.7f} ({_rel(emp, rho):.3%})")
    c(f"under {DENSITY_SECONDS:.0f} s", dt < DENSITY_SECONDS, f"{dt:.1f} s")


# --- 7. frequencies -------------------------------------------------------------------

def frequency_errors(steps=FREQUENCY_STEPS, seed: str = "Gamma") -> list[float]:
    f = np.array([float(x) for x in inf.frequency_vector()])
    out = []
    for s in steps:
        p = inf.generate_patch(seed, s, budget=None)
        counts = p.type_counts()
        del p
        out.append(float(np.max(np.abs(counts / counts.sum() - f) / f)))
    return out


def check_frequencies(c: _Checks) -> None:
    errs = frequency_errors()
    info = ", ".join(f"{s} steps: {e:.3%}" for s, e in zip(FREQUENCY_STEPS, errs))
    c(f"{FREQUENCY_STEPS[-1]}-step fractions within {FREQUENCY_TOL:.0%} of f", errs[-1] < FREQUENCY_TOL, info)
    c("monotone improvement", all(a > b for a, b in zip(errs, errs[1:])))


# --- 8. window --------------------------------------------------------------------------

def cluster_fractions() -> np.ndarray:
    f = inf.frequency_vector()
    w = np.array([float(f[inf.TILE_INDEX[a]]) for a in ANCHORS])
    return w / w.sum()


def _subsample(cloud: cps.WindowCloud, n: int, seed: int) -> cps.WindowCloud:
    if len(cloud) <= n:
        return cloud
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = np.sort(rng.choice(len(cloud), n, replace=False))
    return cps.WindowCloud(cloud.points[idx], cloud.kinds[idx], cloud.rots[idx], cloud.method, seed)


def check_window(c: _Checks) -> None:
    clouds = {s: cps.window_from_patch(inf.generate_patch("Gamma", s)) for s in WINDOW_STEPS}
    proj = _subsample(clouds[WINDOW_STEPS[-1]], WINDOW_POINTS, SEED)
    chaos = cps.chaos_game(WINDOW_POINTS, seed=SEED)
    diam = cps.diameter(chaos.points)
    hd = cps.hausdorff(proj.points, chaos.points) / diam
    c(f"Hausdorff distance within {WINDOW_TOL:.0%} of the diameter", hd < WINDOW_TOL,
      f"{hd:.4f} ({len(proj)} projected, {len(chaos)} chaos points)")
    want = cluster_fractions()
    for name, cl in (("projected", proj), ("chaos", chaos)):
        err = float(np.max(np.abs(cl.type_fractions() - want) / want))
        c(f"{name} cluster-type fractions within {WINDOW_TOL:.0%}", err < WINDOW_TOL, f"{err:.3%}")
    diams = [cps.diameter(clouds[s].points) for s in WINDOW_STEPS]
    change = _rel(diams[-1], diams[-2])
    c(f"diameter stable within {WINDOW_TOL:.0%}", change < WINDOW_TOL,
      ", ".join(f"{s}: {d:.4f}" for s, d in zip(WINDOW_STEPS, diams)))
    occ = [cps.double_occupancy(chaos, g) for g in WINDOW_GRIDS]
    c("double occupancy decreases under refinement", all(a > b for a, b in zip(occ, occ[1:])),
      ", ".join(f"{g}: {o:.3f}" for g, o in zip(WINDOW_GRIDS, occ)))


# --- 9. Hausdorff dimension ---------------------------------------------------------------

def check_dimension(c: _Checks) -> None:
    dh = cps.hausdorff_dimension()
    c("closed form", abs(dh - DIMENSION_CLOSED_FORM) < DIMENSION_DIGITS_TOL, f"{dh:.9f}")
    sq, _ = cps.square_calibration()
    c("filled-square calibration", abs(sq - 2.0) <= SQUARE_TOL, f"{sq:.4f}")
    cloud = cps.chaos_game(BOUNDARY_POINTS, seed=SEED)
    est, counts = cps.boundary_dimension(cloud, BOUNDARY_CELL)
    c(f"boundary box count within {DIMENSION_BOX_TOL}", abs(est - dh) < DIMENSION_BOX_TOL,
      f"{est:.4f} (counts {counts})")


# --- 10. Fourier module ---------------------------------------------------------------------

def check_fourier(c: _Checks) -> None:
    want = mod.RETURN_MODULE.scaled(I_SQRT5.scale(Fraction(1, 135)))
    c("projected dual lattice = (i sqrt5/135) L", cps.fourier_module_from_lattice() == want)
    c("dual module = (i sqrt5/135) L", cps.fourier_module() == want)
    peaks = cps.bragg_support(0.5)
    c("Bragg support closed under xi", len(peaks) > 1 and cps.closed_under_rotation(peaks), f"{len(peaks)} peaks")


# --- 11. reprojection -----------------------------------------------------------------------

def check_reprojection(c: _Checks) -> None:
    p = inf.generate_patch("Gamma", REPROJECTION_STEPS)
    maps = {name: build() for name, build in rp.PRESETS.items()}
    for name, m in maps.items():
        bad = rp.consistency_residuals(m)
        c(f"{name}: consistent Z-linear extension", not bad and m.denominator() == 1,
          f"{m.constraints} side constraints" + (f", failing {bad[:3]}" if bad else ""))
    hexmap = maps["hex"]
    vc = p.vertex_coords()
    lattice = hexmap.lattice_coords(vc)
    offsets_integral = all(x.denominator == 1 for v in hexmap.offsets.values() for x in v)
    c("hex vertices on the hexagonal lattice", offsets_integral and lattice.shape == vc.shape[:-1] + (2,))
    d = rp.reproject(p, hexmap)
    c("hex tiles are regular hexagons", all(rp.is_regular_hexagon(list(v), 1e-6) for v in d.vertices))
    for name, m in maps.items():
        mine = sorted(rp.reprojected_control_points(p, m))
        target = sorted(rp.target_control_points(p, m))
        c(f"{name}: control points equal the target tiling's", mine == target, f"{len(mine)} points")
    disp = {name: rp.shape_displacement(p, m) for name, m in maps.items()}
    c("meta-tile map is closer than the hex map", disp["metatile"] < disp["hex"],
      ", ".join(f"{k}: {v:.4f}" for k, v in disp.items()))


# --- 12. determinism -------------------------------------------------------------------------

def _artifacts(workdir: Path) -> dict[str, bytes]:
    from .render import cloud_svg, patch_svg
    p = inf.generate_patch("Psi", 4)
    buf = io.StringIO()
    inf.write_patch(p, buf, "Psi", 4)
    cloud = cps.chaos_game(20_000, seed=SEED)
    cbuf = io.StringIO()
    cloud.write_csv(cbuf)
    files = {"patch.txt": buf.getvalue(), "cloud.csv": cbuf.getvalue(),
             "patch.svg": patch_svg(p, "edge"), "cloud.svg": cloud_svg(cloud)}
    out = {}
    for name, text in files.items():
        path = workdir / name
        path.write_text(text)
        out[name] = path.read_bytes()
    return out


def check_determinism(c: _Checks) -> None:
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        first, second = _artifacts(Path(a)), _artifacts(Path(b))
    for name in first:
        c(f"{name} byte-identical", first[name] == second[name], f"{len(first[name])} bytes")


CRITERIA: dict[int, tuple[str, Callable[[_Checks], None]]] = {
    1: ("cohomology", check_cohomology),
    2: ("integral cohomology", check_integral),
    3: ("edge eigen-identity", check_edge_eigen),
    4: ("geometry and topology agree", check_geometry),
    5: ("module arithmetic", check_modules),
    6: ("densities", check_densities),
    7: ("tile frequencies", check_frequencies),
    8: ("window clouds", check_window),
    9: ("Hausdorff dimension", check_dimension),
    10: ("Fourier module", check_fourier),
    11: ("reprojection", check_reprojection),
    12: ("determinism", check_determinism),
}


def run(number: int) -> Result:
    title, fn = CRITERIA[number]
    c = _Checks()
    t0 = time.perf_counter()
    try:
        fn(c)
    except Exception as exc:  # a crash is a failure, with the reason kept
        c(f"raised {type(exc).__name__}", False, str(exc) or traceback.format_exc(limit=1))
    return Result(number, title, c.ok, c.details, time.perf_counter() - t0)


def run_all(numbers=None, echo: Callable[[str], None] | None = None) -> list[Result]:
    out = []
    for n in numbers or sorted(CRITERIA):
        r = run(n)
        if echo:
            echo(r.format())
        out.append(r)
    return out
