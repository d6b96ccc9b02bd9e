from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from caspr import cohomology as coh
from caspr.cli import OUTPUT_ENV, main


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), env={OUTPUT_ENV: str(tmp_path)})
    return invoke


def test_help(run):
    r = run("--help")
    assert r.exit_code == 0
    for cmd in ("cohomology", "inflate", "render", "window", "density", "dual", "reproject", "verify"):
        assert cmd in r.output


def test_cohomology(run, tmp_path):
    r = run("cohomology", "--out", "coh.txt")
    assert r.exit_code == 0, r.output
    assert "all values match" in r.output
    assert (tmp_path / "coh.txt").read_text().strip()


def test_cohomology_integral(run):
    r = run("cohomology", "--integral")
    assert r.exit_code == 0 and "Z^10" in r.output


def test_corrupted_constants_exit_mismatch(run, tmp_path):
    rows = [[str(e) for e in row] for row in coh.PRINTED_BOUNDARY_1.entries]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"boundary_1": rows}))
    r = run("cohomology", "--constants", str(f))
    assert r.exit_code == 1
    assert "MISMATCH" in r.output


def test_unreadable_constants_exit_data_error(run, tmp_path):
    f = tmp_path / "junk.json"
    f.write_text("{not json")
    assert run("cohomology", "--constants", str(f)).exit_code == 3


def test_usage_errors(run):
    assert run("inflate", "--steps", "13").exit_code == 2
    assert run("inflate", "--seed", "Omega").exit_code == 2
    assert run("inflate", "--steps", "5", "--budget", "100").exit_code == 2
    assert run("render").exit_code == 2


def test_inflate_and_render(run, tmp_path):
    r = run("inflate", "--seed", "Psi", "--steps", "2", "--out", "p.txt")
    assert r.exit_code == 0, r.output
    patch = tmp_path / "p.txt"
    assert patch.read_text().startswith("# caspr-patch v1")
    for mode in ("type", "parity", "edge"):
        r = run("render", str(patch), "--svg", f"p-{mode}.svg", "--color-by", mode, "--control-points")
        assert r.exit_code == 0, r.output
        assert (tmp_path / f"p-{mode}.svg").read_text().startswith("<svg")


def test_render_bad_patch_exit_data_error(run, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("garbage\n")
    assert run("render", str(f), "--svg", "x.svg").exit_code == 3
    assert run("render", str(tmp_path / "missing.txt"), "--svg", "x.svg").exit_code == 3


def test_window_chaos_is_deterministic(run, tmp_path):
    assert run("window", "--points", "3000", "--seed", "1", "--out", "a.csv").exit_code == 0
    assert run("window", "--points", "3000", "--seed", "1", "--out", "b.csv", "--svg", "b.svg").exit_code == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "b.svg").exists()


def test_window_project(run, tmp_path):
    r = run("window", "--method", "project", "--steps", "4", "--points", "500")
    assert r.exit_code == 0, r.output
    lines = (tmp_path / "window-project.csv").read_text().splitlines()
    assert len(lines) == 502


def test_density(run):
    r = run("density")
    assert r.exit_code == 0 and "rho1 == rho2: True" in r.output


def test_dual(run, tmp_path):
    r = run("dual", "--radius", "0.3", "--out", "peaks.csv")
    assert r.exit_code == 0, r.output
    assert "closed under xi: True" in r.output
    assert (tmp_path / "peaks.csv").read_text().startswith("x,y,coordinates\n")
    assert run("dual", "--radius", "0").exit_code == 2


@pytest.mark.parametrize("target", ["hex", "metatile"])
def test_reproject_then_render(run, tmp_path, target):
    r = run("reproject", "--target", target, "--steps", "2", "--svg", f"{target}.svg")
    assert r.exit_code == 0, r.output
    assert "control points equal the target tiling's: True" in r.output
    deformed = tmp_path / f"reproject-{target}.txt"
    assert f"# projection: {target}" in deformed.read_text()
    r = run("render", str(deformed), "--svg", "again.svg")
    assert r.exit_code == 0
    assert (tmp_path / "again.svg").read_bytes() == (tmp_path / f"{target}.svg").read_bytes()


def test_reproject_rejects_odd_parity(run):
    assert run("reproject", "--target", "hex", "--steps", "1").exit_code == 2


def test_verify_single_criterion(run):
    r = run("verify", "--only", "3")
    assert r.exit_code == 0, r.output
    assert "PASS criterion  3" in r.output and "1/1 criteria passed" in r.output
