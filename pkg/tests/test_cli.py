import json
import math
import subprocess
import sys

import pytest

from spinmirror.cli import main
from spinmirror.series import CorrelationSeries


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    diagnostics = [json.loads(line) for line in err.splitlines()]
    return code, out, diagnostics


def test_design_linear(capsys):
    code, out, diag = run(capsys, "design", "linear", "--levels", "5", "--omega", "1")
    assert code == 0
    assert json.loads(out)["energies"] == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert diag[0]["valid"] is True


def test_design_quadratic(capsys):
    code, out, _ = run(capsys, "design", "quadratic", "--levels", "3", "--p", "1", "--q", "1")
    assert code == 0
    assert json.loads(out)["energies"] == [0.0, 5.0, 12.0]


def test_design_cosine_prints_certificate(capsys):
    code, out, diag = run(capsys, "design", "cosine", "--levels", "31", "--amplitude", "208")
    assert code == 0
    assert diag[0]["message"].startswith("certificate: valid, tau=pi")


def test_design_rejection_exit_code(capsys):
    code, out, diag = run(capsys, "design", "linear", "--levels", "1")
    assert code == 2
    assert out == ""
    assert diag[-1]["level"] == "error" and diag[-1]["error"] == "validation"


def test_design_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "design", "linear", "--levels", "3")
    assert code == 0
    assert out.splitlines()[1:] == ["nu,energy,n_assign", "0,0.0,0", "1,1.0,0", "2,2.0,0"]


def test_certify(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"energies": [-1.0, 1.0], "tau": math.pi}))
    code, out, _ = run(capsys, "certify", str(path))
    assert code == 2
    assert json.loads(out)["valid"] is False
    code, out, _ = run(capsys, "certify", str(path), "--tau", str(math.pi / 2))
    assert code == 0


def test_reconstruct_mirror31_spectrum(tmp_path, capsys):
    spec = tmp_path / "s.json"
    chain = tmp_path / "c.json"
    assert run(capsys, "design", "mirror31", "--output", str(spec))[0] == 0
    code, out, diag = run(capsys, "reconstruct", str(spec), "--output", str(chain))
    assert code == 0 and out == ""
    assert diag[0]["message"] == "J in [101.5, 108.5], variation 3.34%"
    assert json.loads(chain.read_text())["n_sites"] == 31


def test_reconstruct_two_levels(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"energies": [-1.0, 1.0], "tau": math.pi / 2}))
    code, out, _ = run(capsys, "reconstruct", str(spec))
    assert code == 0
    data = json.loads(out)
    assert data["couplings"] == pytest.approx([1.0])


def test_annealing_output_is_byte_identical(tmp_path, capsys):
    spec = tmp_path / "s.json"
    run(capsys, "design", "cosine", "--levels", "7", "-o", str(spec))
    outs = []
    for i in range(2):
        dest = tmp_path / f"c{i}.json"
        code, _, _ = run(capsys, "--seed", "5", "reconstruct", str(spec), "--method", "annealing", "-o", str(dest))
        assert code == 0
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]


def test_annealing_nonconvergence_exit_code(tmp_path, capsys):
    spec = tmp_path / "s.json"
    run(capsys, "design", "cosine", "--levels", "15", "-o", str(spec))
    code, out, diag = run(
        capsys, "reconstruct", str(spec), "--method", "annealing", "--sweeps", "3", "--restarts", "1"
    )
    assert code == 3
    assert diag[-1]["error"] == "convergence"
    assert json.loads(out)["n_sites"] == 15  # best chain still written


@pytest.fixture
def chain31(tmp_path, capsys):
    spec = tmp_path / "s.json"
    chain = tmp_path / "c.json"
    run(capsys, "design", "mirror31", "-o", str(spec))
    run(capsys, "reconstruct", str(spec), "-o", str(chain))
    return chain


def test_correlate_end_to_end_recipe(chain31, capsys):
    for T in ("0", "1000"):
        code, out, _ = run(
            capsys, "correlate", str(chain31), "--observable", "zz", "--sites", "30", "0",
            "--temperature", T, "--grid", f"{math.pi - 0.5}:{math.pi + 0.5}:101",
        )
        assert code == 0
        series = CorrelationSeries.from_csv(out)
        peak = series.values.real.argmax()
        assert series.times[peak] == pytest.approx(math.pi)
        assert series.values[peak].real == pytest.approx(0.25, abs=1e-9)


def test_correlate_empty_grid_gives_header_only(chain31, capsys):
    code, out, _ = run(capsys, "correlate", str(chain31), "--observable", "xx", "--sites", "3", "--grid", "0:1:0")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2 and lines[1] == "t,re,im"


def test_correlate_bad_sites(chain31, capsys):
    code, _, diag = run(capsys, "correlate", str(chain31), "--observable", "zz", "--sites", "3", "--times", "0")
    assert code == 2
    code, _, diag = run(capsys, "correlate", str(chain31), "--observable", "zz", "--sites", "0", "31", "--times", "0")
    assert code == 2


def test_correlate_json_and_grid_union(chain31, capsys):
    code, out, _ = run(
        capsys, "--format", "json", "correlate", str(chain31), "--observable", "xx", "--sites", "2",
        "--temperature", "inf", "--grid", "0:1:3", "--times", "10,0.5",
    )
    assert code == 0
    assert json.loads(out)["t"] == [0.0, 0.5, 1.0, 10.0]
    assert json.loads(out)["temperature"] == "inf"


def test_fidelity(chain31, capsys):
    code, out, _ = run(capsys, "fidelity", str(chain31), "--times", f"0,{math.pi}")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[2:]]
    assert float(rows[1][1]) == pytest.approx(1.0, abs=1e-9)


def test_oracle_check(tmp_path, capsys):
    chain = tmp_path / "c.json"
    chain.write_text(json.dumps({"couplings": [1.0, 0.6, 1.0], "fields": [0.2, -0.1, -0.1, 0.2]}))
    code, out, _ = run(capsys, "oracle-check", str(chain))
    assert code == 0
    report = json.loads(out)
    assert report["passed"] and max(report["zz"], report["xx"]) < 1e-8


def test_missing_file(capsys):
    code, _, diag = run(capsys, "reconstruct", "/nonexistent/spectrum.json")
    assert code == 2


def test_console_script_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "spinmirror.cli", "design", "linear", "--levels", "2"],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["energies"] == [0.0, 1.0]
