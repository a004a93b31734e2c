"""End-to-end checks of the command-line surface.

Every JSON/CSV number must be reproducible through direct library calls, the
CSV files must be byte-stable across identical runs, and the exit codes must
separate usage errors (1) from numerical/region refusals (2).
"""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from supercoherent import (
    KMatrix,
    SweepSpec,
    eigen_decompose,
    fit_divergence,
    fock_solve,
    generic_mus_basis,
    mixed_state,
    singular_state,
    sweep,
    uncertainty,
)
from supercoherent.cli import _fmt, main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# classify


def test_classify_reports_spectrum(capsys):
    code, out, _ = _run(capsys, "classify", "--k", "1,1,0,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["region"] == "Degenerate"
    assert doc["chi_plus"] == [1.0, 0.0]
    assert doc["also_degenerate"] is False
    spec = eigen_decompose(KMatrix(1, 1, 0, 1))
    assert doc["discriminant"] == [spec.region.discriminant.real, spec.region.discriminant.imag]
    assert doc["trace"] == [2.0, 0.0]
    assert doc["det"] == [1.0, 0.0]


def test_classify_complex_entries(capsys):
    # 8 interleaved floats: K = [[i, 0], [1, -i]]
    code, out, _ = _run(capsys, "classify", "--k", "0,1,0,0,1,0,0,-1")
    assert code == 0
    doc = json.loads(out)
    spec = eigen_decompose(KMatrix(1j, 0, 1, -1j))
    assert doc["region"] == spec.region.tag.value
    got = complex(*doc["chi_plus"])
    assert abs(got - spec.chi_plus) < 1e-14


def test_classify_nilpotent_flag(capsys):
    code, out, _ = _run(capsys, "classify", "--k", "0,1,0,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["region"] == "Singular"
    assert doc["also_degenerate"] is True


# ---------------------------------------------------------------------------
# state


def test_state_closed_form_terms(capsys):
    code, out, _ = _run(capsys, "state", "--k", "1,1,1,1", "--z0", "2,0", "--basis", "singular")
    assert code == 0
    doc = json.loads(out)
    assert doc["label"] == "Zs"
    s = singular_state(KMatrix(1, 1, 1, 1), 2.0)
    assert len(doc["terms"]["upper"]) == len(s.upper)
    got = complex(*doc["terms"]["lower"][0]["beta"])
    assert abs(got - s.lower[0].beta) < 1e-15


def test_state_fock_solver_output(capsys):
    code, out, _ = _run(
        capsys, "state", "--k", "1,1,1,1", "--z0", "2,0", "--basis", "fock", "--fock-n", "12",
        "--c1", "9,9",
    )
    assert code == 0
    doc = json.loads(out)["fock"]
    assert doc["n"] == 12
    assert doc["c1_overridden"] is True  # singular region derives c1 itself
    f = fock_solve(KMatrix(1, 1, 1, 1), 2.0, a0=1.0, c1=9 + 9j, n=12)
    got = np.array([complex(re, im) for re, im in doc["a"]])
    assert np.allclose(got, f.a_coeffs, rtol=1e-15, atol=0)


def test_state_basis_dispatch_on_degenerate(capsys):
    code, out, _ = _run(capsys, "state", "--k", "1,1,0,1", "--z0", "1,0", "--basis", "A")
    assert code == 0
    assert json.loads(out)["label"] == "ZAd"
    code, out, _ = _run(capsys, "state", "--k", "1,0.5,0.5,1", "--z0", "1,0", "--basis", "A")
    assert code == 0
    assert json.loads(out)["label"] == "ZA"


def test_state_closed_form_with_fock_floor(capsys):
    code, out, _ = _run(
        capsys, "state", "--k", "1,0.5,0.5,1", "--z0", "1,0", "--basis", "plus", "--fock-n", "24"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["fock"]["n"] >= 24
    zp, _ = generic_mus_basis(KMatrix(1, 0.5, 0.5, 1), 1.0)
    want = zp.upper[0].weight
    got = complex(*doc["terms"]["upper"][0]["weight"])
    assert abs(got - want) < 1e-15


def test_state_wrong_region_exit_code(capsys):
    code, _, err = _run(capsys, "state", "--k", "1,1,0,1", "--z0", "1,0", "--basis", "plus")
    assert code == 2
    assert "wrong region" in err


# ---------------------------------------------------------------------------
# uncertainty


def test_uncertainty_singular_saturates(capsys):
    code, out, _ = _run(capsys, "uncertainty", "--k", "1,1,1,1", "--z0", "2,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["region"] == "Singular"
    assert doc["label"] == "Zs"
    assert abs(doc["product"] - 0.25) < 1e-9
    rep = uncertainty(singular_state(KMatrix(1, 1, 1, 1), 2.0))
    assert doc["var_xi"] == rep.var_xi
    assert doc["norm"] == rep.norm


def test_uncertainty_mixture_flags(capsys):
    r = math.sqrt(0.5)
    zr = 0.5 * math.cos(math.pi / 4)
    zi = 0.5 * math.sin(math.pi / 4)
    code, out, _ = _run(
        capsys, "uncertainty",
        "--k", f"1,{r},{r},1",
        "--z0", f"{zr},{zi}",
        "--eta", str(math.pi / 4), "--lambda", str(math.pi / 4),
    )
    assert code == 0
    doc = json.loads(out)
    k = KMatrix(1, r, r, 1)
    rep = uncertainty(mixed_state(k, complex(zr, zi), eta=math.pi / 4, lam=math.pi / 4))
    assert doc["product"] == rep.product
    assert 0.78 <= doc["product"] <= 0.88


def test_uncertainty_nilpotent_refused(capsys):
    code, _, err = _run(capsys, "uncertainty", "--k", "0,1,0,0", "--z0", "1,0")
    assert code == 2
    assert "finite Fock solutions" in err


# ---------------------------------------------------------------------------
# sweep


def test_sweep_csv_reproducible(tmp_path, capsys):
    out1 = str(tmp_path / "a.csv")
    out2 = str(tmp_path / "b.csv")
    argv = [
        "sweep", "--theta", "0.2:1.3:4", "--zmag", "0:2:3", "--zarg", "0.5",
        "--eta", "0.7", "--lambda", "0.1",
    ]
    assert main(argv + ["--out", out1]) == 0
    assert main(argv + ["--out", out2]) == 0
    capsys.readouterr()
    b1, b2 = open(out1, "rb").read(), open(out2, "rb").read()
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0] == "theta,zmag,zarg,var_xi,var_mu,product"
    rows = sweep(SweepSpec((0.2, 1.3, 4), (0.0, 2.0, 3), zarg=0.5, eta=0.7, lam=0.1))
    assert len(lines) == 1 + len(rows)
    got = lines[1].split(",")
    assert got == [
        _fmt(rows[0].theta), _fmt(rows[0].zmag), _fmt(rows[0].zarg),
        _fmt(rows[0].var_xi), _fmt(rows[0].var_mu), _fmt(rows[0].product),
    ]
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
    assert leftovers == []


def test_sweep_requires_mixture_angles(capsys):
    code, _, _ = _run(capsys, "sweep", "--theta", "0.2:1.3:4", "--zmag", "0:2:3", "--out", "x.csv")
    assert code == 1


# ---------------------------------------------------------------------------
# fit


def test_fit_json_matches_library(tmp_path, capsys):
    th = 3 * math.pi / 4
    code, out, _ = _run(
        capsys, "fit", "--theta", str(th), "--zarg", "0", "--zmin", "10", "--zmax", "40",
        "--points", "6",
    )
    assert code == 0
    doc = json.loads(out)
    fit = fit_divergence(th, 0.0, zmag_window=(10.0, 40.0), points=6)
    assert doc["slope"] == fit.slope
    assert doc["intercept"] == fit.intercept
    assert doc["r_squared"] == fit.r_squared
    assert doc["points"] == 6
    # --out routes the same document to a file
    path = str(tmp_path / "fit.json")
    code, out, _ = _run(
        capsys, "fit", "--theta", str(th), "--zarg", "0", "--zmin", "10", "--zmax", "40",
        "--points", "6", "--out", path,
    )
    assert code == 0
    assert json.load(open(path)) == doc


def test_fit_bounded_region_exit_code(capsys):
    code, _, err = _run(capsys, "fit", "--theta", "0.3", "--zarg", "0")
    assert code == 2
    assert "no divergence to fit" in err


# ---------------------------------------------------------------------------
# paramgrid


def test_paramgrid_writes_voxels_and_surfaces(tmp_path, capsys):
    out = str(tmp_path / "grid.csv")
    code, _, _ = _run(
        capsys, "paramgrid", "--k2=-1:1:3", "--k3=-1:1:3", "--k4", "0:2:3", "--out", out
    )
    assert code == 0
    lines = open(out).read().splitlines()
    assert lines[0] == "k2,k3,k4,region"
    assert len(lines) == 1 + 27
    regions = {line.split(",")[3] for line in lines[1:]}
    assert regions <= {"Degenerate", "Singular", "GenericBounded", "GenericUnbounded"}
    for name in ("degenerate", "singular"):
        spath = str(tmp_path / f"grid_{name}_surface.csv")
        slines = open(spath).read().splitlines()
        assert slines[0] == "k2,k3,k4"
        assert len(slines) >= 2


# ---------------------------------------------------------------------------
# plot rendering


def test_plot_files_rendered(tmp_path, capsys):
    out = str(tmp_path / "sw.csv")
    code, _, _ = _run(
        capsys, "sweep", "--theta", "0.2:1.3:4", "--zmag", "0:2:4",
        "--eta", "0.785", "--lambda", "0.785", "--out", out, "--plot",
    )
    assert code == 0
    png = str(tmp_path / "sw.png")
    assert os.path.exists(png)
    with open(png, "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"
    explicit = str(tmp_path / "custom.png")
    code, _, _ = _run(
        capsys, "fit", "--theta", str(3 * math.pi / 4), "--zmin", "10", "--zmax", "30",
        "--points", "5", "--plot", explicit,
    )
    assert code == 0
    assert os.path.exists(explicit)


# ---------------------------------------------------------------------------
# exit codes and the installed entry point


def test_usage_errors_exit_one(capsys):
    assert _run(capsys, "classify", "--k", "1,2,3")[0] == 1
    assert _run(capsys, "classify")[0] == 1
    assert _run(capsys, "state", "--k", "1,1,0,1", "--basis", "A")[0] == 1
    assert _run(capsys, "sweep", "--theta", "0:1:0", "--zmag", "0:1:3",
                "--eta", "0", "--lambda", "0", "--out", "x.csv")[0] == 1


def test_null_operator_exit_one(capsys):
    code, _, err = _run(capsys, "classify", "--k", "0,0,0,0")
    assert code == 1
    assert "null operator" in err


def test_help_exits_zero(capsys):
    assert _run(capsys, "--help")[0] == 0
    assert _run(capsys, "sweep", "--help")[0] == 0


def test_console_script_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "supercoherent.cli", "classify", "--k", "1,1,0,1"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["region"] == "Degenerate"
