"""Command-line interface.

Exit codes: 0 success, 1 a computed value disagrees with the published one,
2 usage error, 3 unreadable or malformed input file.  Relative output paths
are placed under ``$CASPR_OUTPUT_DIR`` (default: the current directory).
"""
from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from . import cohomology as coh
from . import cps
from . import inflation as inf
from . import reprojection as rp
from . import render
from .tiles import TILE_TYPES

OUTPUT_ENV = "CASPR_OUTPUT_DIR"
EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class DataError(click.ClickException):
    exit_code = EXIT_DATA


def _out(path: str) -> Path:
    p = Path(path)
    if not p.is_absolute():
        p = Path(os.environ.get(OUTPUT_ENV, ".")) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _write(path: str, text: str) -> Path:
    p = _out(path)
    with open(p, "w", newline="\n") as fh:
        fh.write(text)
    click.echo(f"wrote {p}")
    return p


def _read_patch(path: str) -> inf.Patch:
    try:
        with open(path) as fh:
            return inf.read_patch(fh)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read patch file {path}: {exc}") from exc


def _verdict(ok: bool) -> None:
    click.echo("result: " + ("all values match" if ok else "MISMATCH"))
    if not ok:
        sys.exit(EXIT_MISMATCH)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main() -> None:
    """Tools for the CASPr tilings: cohomology, patches, windows and reprojections."""


# --- cohomology -------------------------------------------------------------------

EXPECTED_H1 = (0, 2, 0, 0, 0, 2)
EXPECTED_H2 = (2, 2, 1, 2, 1, 2)


@main.command()
@click.option("--integral", is_flag=True, help="Integer coefficients via Smith normal forms.")
@click.option("--constants", "constants_file", type=click.Path(dir_okay=False),
              help="JSON file overriding boundary or substitution matrices.")
@click.option("--out", type=str, default=None, help="Also write the report to this file.")
def cohomology(integral: bool, constants_file: str | None, out: str | None) -> None:
    """Cech cohomology of the tiling space, checked against the published groups."""
    constants = coh.DEFAULT
    if constants_file:
        try:
            constants = coh.Constants.from_json(Path(constants_file).read_text())
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read constants {constants_file}: {exc}") from exc
    try:
        if integral:
            r = coh.integral_report(constants=constants)
            text = r.format()
            ok = (r.stabilized and r.h1_rank == 4 and r.h2_rank == 10
                  and not r.h1_torsion and not r.h2_torsion)
        else:
            r = coh.cech_report(constants)
            text = r.format()
            ok = (tuple(x.h1_limit for x in r.per_k) == EXPECTED_H1
                  and tuple(x.h2_limit for x in r.per_k) == EXPECTED_H2)
    except coh.RepresentativeError as exc:
        text, ok = f"invalid complex: {exc}", False
    click.echo(text)
    if out:
        _write(out, text + "\n")
    _verdict(ok)


# --- patches -----------------------------------------------------------------------

@main.command()
@click.option("--seed", "seed_tile", type=click.Choice(TILE_TYPES), default="Gamma", show_default=True)
@click.option("--steps", type=click.IntRange(0, 12), default=4, show_default=True,
              help="Number of half-step inflations (use an even number for a genuine self-similar patch).")
@click.option("--rot", type=click.IntRange(0, 5), default=0, show_default=True)
@click.option("--out", type=str, default="patch.txt", show_default=True)
@click.option("--budget", type=int, default=20_000_000, show_default=True, help="Maximum number of tiles.")
def inflate(seed_tile: str, steps: int, rot: int, out: str, budget: int) -> None:
    """Inflate a single tile and write the patch file."""
    try:
        p = inf.generate_patch(seed_tile, steps, rot=rot, budget=budget)
    except MemoryError as exc:
        raise click.UsageError(str(exc)) from exc
    path = _out(out)
    with open(path, "w", newline="\n") as fh:
        inf.write_patch(p, fh, seed_tile, steps)
    counts = p.type_counts()
    click.echo(f"{len(p)} tiles: " + ", ".join(f"{t} {c}" for t, c in zip(TILE_TYPES, counts)))
    click.echo(f"wrote {path}")


@main.command("render")
@click.argument("patch_file", type=click.Path(dir_okay=False))
@click.option("--svg", "svg_out", type=str, required=True)
@click.option("--color-by", type=click.Choice(["type", "parity", "edge"]), default="type", show_default=True)
@click.option("--control-points", is_flag=True, help="Mark cluster control points.")
def render_cmd(patch_file: str, svg_out: str, color_by: str, control_points: bool) -> None:
    """Draw a patch file as SVG (deformed patches are drawn with their projection)."""
    p = _read_patch(patch_file)
    if p.projection:
        if p.projection not in rp.PRESETS:
            raise DataError(f"unknown projection {p.projection!r}")
        text = render.deformed_svg(rp.reproject(p, rp.PRESETS[p.projection]()))
    else:
        text = render.patch_svg(p, color_by, control_points=control_points)
    _write(svg_out, text)


# --- window ------------------------------------------------------------------------

@main.command()
@click.option("--method", type=click.Choice(["project", "chaos"]), default="chaos", show_default=True)
@click.option("--points", type=click.IntRange(1), default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--steps", type=click.IntRange(0, 10), default=6, show_default=True,
              help="Inflation steps of the projected patch (project method).")
@click.option("--out", type=str, default=None, help="Cloud CSV (default window-METHOD.csv).")
@click.option("--svg", "svg_out", type=str, default=None)
def window(method: str, points: int, seed: int, steps: int, out: str | None, svg_out: str | None) -> None:
    """Sample the window, by projecting control points or by the chaos game."""
    if method == "chaos":
        cloud = cps.chaos_game(points, seed=seed)
    else:
        full = cps.window_from_patch(inf.generate_patch("Gamma", steps, budget=None))
        if len(full) > points:
            rng = np.random.Generator(np.random.PCG64(seed))
            idx = np.sort(rng.choice(len(full), points, replace=False))
            full = cps.WindowCloud(full.points[idx], full.kinds[idx], full.rots[idx], "project")
        cloud = cps.WindowCloud(full.points, full.kinds, full.rots, "project", seed)
    path = _out(out or f"window-{method}.csv")
    with open(path, "w", newline="\n") as fh:
        cloud.write_csv(fh)
    click.echo(f"{len(cloud)} points, diameter {cps.diameter(cloud.points):.6f}")
    click.echo(f"wrote {path}")
    if svg_out:
        _write(svg_out, render.cloud_svg(cloud))


# --- reports -------------------------------------------------------------------------

@main.command()
def density() -> None:
    """Covolume, window area and the two control-point densities."""
    d = cps.density_report()
    click.echo(d.format())
    _verdict(d.equal and d.covolume == 3645)


@main.command()
@click.option("--radius", type=click.FloatRange(min=0, min_open=True), default=0.5, show_default=True)
@click.option("--internal-radius", type=click.FloatRange(min=0, min_open=True), default=None,
              help="Bound on the internal image (default: same as --radius).")
@click.option("--out", type=str, default=None, help="Write the peak list to this file.")
def dual(radius: float, internal_radius: float | None, out: str | None) -> None:
    """The Fourier module and an enumeration of Bragg peak positions."""
    from .modules import return_dual_expected
    numeric = cps.fourier_module_from_lattice()
    exact = cps.fourier_module()
    want = return_dual_expected()
    click.echo("Fourier module basis: " + ", ".join(str(b) for b in exact.basis()))
    click.echo(f"projected dual lattice equals (i sqrt5/135) L: {numeric == want}")
    click.echo(f"dual module equals (i sqrt5/135) L: {exact == want}")
    peaks = cps.bragg_support(radius, internal_radius)
    closed = cps.closed_under_rotation(peaks)
    click.echo(f"{len(peaks)} peaks with |k| <= {radius}; closed under xi: {closed}")
    if out:
        lines = [f"{b.embed().real:.12f},{b.embed().imag:.12f},{' '.join(str(c) for c in b.coords)}"
                 for b in peaks]
        _write(out, "x,y,coordinates\n" + "\n".join(lines) + "\n")
    _verdict(numeric == want and exact == want and closed)


@main.command()
@click.option("--target", type=click.Choice(sorted(rp.PRESETS)), required=True)
@click.option("--patch", "patch_file", type=click.Path(dir_okay=False), default=None,
              help="Patch file to deform (default: inflate --seed/--steps).")
@click.option("--seed", "seed_tile", type=click.Choice(TILE_TYPES), default="Gamma", show_default=True)
@click.option("--steps", type=click.IntRange(0, 8), default=4, show_default=True)
@click.option("--out", type=str, default=None, help="Deformed patch file (default reproject-TARGET.txt).")
@click.option("--svg", "svg_out", type=str, default=None)
def reproject(target: str, patch_file: str | None, seed_tile: str, steps: int, out: str | None,
              svg_out: str | None) -> None:
    """Deform a patch onto hexagons or Hat-Turtle style meta-tiles."""
    p = _read_patch(patch_file) if patch_file else inf.generate_patch(seed_tile, steps)
    if p.parity:
        raise click.UsageError("reprojection needs an even-parity patch")
    rmap = rp.PRESETS[target]()
    bad = rp.consistency_residuals(rmap)
    mine = sorted(rp.reprojected_control_points(p, rmap))
    theirs = sorted(rp.target_control_points(p, rmap))
    click.echo(f"map on the integral basis: {[tuple(str(x) for x in t) for t in rmap.matrix]}")
    click.echo(f"side constraints: {rmap.constraints}, failing: {len(bad)}")
    click.echo(f"kernel on E: {rmap.kernel()}")
    click.echo(f"control points equal the target tiling's: {mine == theirs} ({len(mine)} points)")
    click.echo(f"mean shape displacement: {rp.shape_displacement(p, rmap):.6f}")
    path = _out(out or f"reproject-{target}.txt")
    with open(path, "w", newline="\n") as fh:
        inf.write_patch(p, fh, seed_tile if not patch_file else "", steps if not patch_file else 0,
                        projection=target)
    click.echo(f"wrote {path}")
    if svg_out:
        _write(svg_out, render.deformed_svg(rp.reproject(p, rmap)))
    _verdict(not bad and mine == theirs)


@main.command()
@click.option("--only", type=click.IntRange(1, 12), multiple=True, help="Run only these criteria.")
def verify(only: tuple[int, ...]) -> None:
    """Run the acceptance suite and print PASS/FAIL per criterion."""
    from .acceptance import run_all
    results = run_all(sorted(set(only)) or None, echo=click.echo)
    failed = [r.number for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    if failed:
        sys.exit(EXIT_MISMATCH)


if __name__ == "__main__":
    main()
