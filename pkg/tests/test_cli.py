import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from freemax import MarchenkoPastur, TwoPoint, Uniform01
from freemax.cli import DEFAULT_OUT, EXIT_FAILED, EXIT_OK, EXIT_USAGE, RunConfig, main, parse_args, parse_law
from freemax.errors import ContractError
from freemax.export import export_distribution, read_cdf_table, write_json
from freemax.phi_psi import verify_thm_free
from freemax.plotting import emit_plot, plot_report


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_verify_example():
    cfg = parse_args(["verify", "--theorem", "free", "--law", "twopoint:0.5,2", "--t", "2"])
    assert cfg.command == "verify" and cfg.theorem == "free"
    assert cfg.law_spec == "twopoint:0.5,2" and cfg.t == [2.0]
    assert cfg.law() == TwoPoint(0.5, 2.0)


def test_parse_phi_example():
    cfg = parse_args(["phi", "--law", "mp", "--grid", "1024", "--csv", "out/"])
    assert cfg.grid_points == 1024 and cfg.output_dir == "out/"
    assert cfg.law() == MarchenkoPastur(1.0)


def test_parse_simulate_example():
    cfg = parse_args(["simulate", "--ensemble", "ginibre", "--N", "256", "--n", "32", "--seed", "7"])
    assert cfg.ensemble == "ginibre-product" and cfg.dim == 256 and cfg.n == [32] and cfg.seed == 7


@pytest.mark.parametrize("argv", [
    ["phi", "--law", "mp", "--bogus"],
    ["phi", "--law", "nonsense:1"],
    ["phi", "--law", "twopoint:0.5"],
    ["phi", "--law", "mp", "--grid", "10"],
    ["verify", "--theorem", "free", "--law", "mp", "--tol", "-1"],
    ["verify", "--theorem", "nope"],
    [],
])
def test_malformed_input_exits_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == EXIT_USAGE
    err = capsys.readouterr().err
    assert '"status": "error"' in err


def test_law_grammar():
    assert parse_law("mp:2.5") == MarchenkoPastur(2.5)
    assert parse_law("uniform") == Uniform01()
    d = parse_law("mp@2")
    assert d.cdf(2.0) == pytest.approx(MarchenkoPastur(1.0).cdf(1.0))
    with pytest.raises(ContractError):
        parse_law("poisson:a")


def test_run_config_invariants():
    with pytest.raises(ContractError):
        RunConfig("phi", tolerance=0.0)
    with pytest.raises(ContractError):
        RunConfig("phi", grid_points=32)
    with pytest.raises(ContractError):
        RunConfig("phi", law_spec="mp:-1")


def test_output_dir_precedence(monkeypatch):
    monkeypatch.delenv("FREEMAX_OUT", raising=False)
    assert parse_args(["catalog"]).output_dir == DEFAULT_OUT
    monkeypatch.setenv("FREEMAX_OUT", "/tmp/env_out")
    assert parse_args(["catalog"]).output_dir == "/tmp/env_out"
    assert parse_args(["catalog", "--out", "/tmp/flag_out"]).output_dir == "/tmp/flag_out"


def test_classical_verify_exit_zero(tmp_path):
    code = main(["verify", "--theorem", "classical", "--lambda", "1", "--t", "2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    (rep,) = summary["reports"]
    assert rep["passed"] and rep["sup_norm"] < 1e-10
    assert summary["schema_version"] == 1


def test_phi_of_mp_csv_is_identity(tmp_path):
    assert main(["phi", "--law", "mp", "--csv", str(tmp_path)]) == EXIT_OK
    rows = _read_csv(tmp_path / "phi.csv")
    x = np.array([float(r["x"]) for r in rows])
    y = np.array([float(r["cdf"]) for r in rows])
    assert np.max(np.abs(x - y)) < 1e-6


def test_dirac_verify_is_trivial(tmp_path):
    assert main(["verify", "--theorem", "free", "--law", "dirac:2", "--t", "5", "--out", str(tmp_path)]) == EXIT_OK


def test_failed_verification_exits_1(tmp_path, capsys):
    code = main(["verify", "--theorem", "free", "--law", "mp", "--t", "2", "--path", "grid", "--tol", "1e-14",
                 "--out", str(tmp_path)])
    assert code == EXIT_FAILED
    assert "FAIL" in capsys.readouterr().out


def test_unsupported_law_is_reported(tmp_path, capsys):
    code = main(["psi", "--law", "frechet:1", "--out", str(tmp_path)])
    assert code == EXIT_USAGE
    rec = json.loads((tmp_path / "error.json").read_text())
    assert rec["error"] == "UnsupportedLawError" and rec["exit_code"] == EXIT_USAGE


def test_svg_per_report(tmp_path):
    code = main(["verify", "--theorem", "boolean", "--law", "twopoint:0.5,2", "--t", "2", "--path", "closed",
                 "--svg", "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert len(list(tmp_path.glob("verify_*.svg"))) == 1


def test_transform_and_maxpow_commands(tmp_path):
    assert main(["transform", "--law", "mp", "--kind", "s", "--z", "-0.5", "--out", str(tmp_path)]) == EXIT_OK
    (row,) = _read_csv(tmp_path / "s_transform.csv")
    assert float(row["re_value"]) == pytest.approx(2.0)
    assert main(["maxpow", "--law", "uniform", "--kind", "free", "--t", "2", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "maxpow_free_2.csv").exists()


def test_simulate_command(tmp_path):
    code = main(["simulate", "--ensemble", "wishart", "--N", "64", "--seed", "3", "--out", str(tmp_path)])
    assert code == EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    (rec,) = summary["experiments"]
    assert rec["ks"] < 0.2 and summary["rng"] == "Philox"


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "freemax.cli", "catalog", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "twopoint:0.5,2" in proc.stdout


@pytest.mark.parametrize("law", [MarchenkoPastur(1.0), TwoPoint(0.5, 2.0), MarchenkoPastur(0.4)])
def test_csv_round_trip(tmp_path, law):
    paths = export_distribution(law, tmp_path, "law", n=256)
    back = read_cdf_table(paths["cdf"], atom_zero=law.atom_zero)
    x = np.array([float(r["x"]) for r in _read_csv(paths["cdf"])])
    assert np.max(np.abs(back(x) - law.cdf(x))) < 1e-12
    if law.atoms():
        rows = _read_csv(paths["atoms"])
        assert [(float(r["location"]), float(r["mass"])) for r in rows] == list(law.atoms())


def test_json_handles_special_values(tmp_path):
    path = write_json(tmp_path / "x.json", {"a": np.inf, "b": 1 + 2j, "c": np.float64(0.5), "d": np.arange(2)})
    data = json.loads(path.read_text())
    assert data == {"schema_version": 1, "a": "inf", "b": [1.0, 2.0], "c": 0.5, "d": [0, 1]}


def test_identical_series_plot_flat(tmp_path):
    x = np.linspace(0, 1, 50)
    path = emit_plot([("a", x, x), ("b", x, x)], tmp_path / "flat.svg")
    text = path.read_text()
    assert text.startswith("<?xml") and "<svg" in text


def test_empty_series_is_an_error(tmp_path):
    with pytest.raises(ContractError):
        emit_plot([], tmp_path / "none.svg")
    with pytest.raises(ContractError):
        emit_plot([("a", np.array([]), np.array([]))], tmp_path / "none.svg")


def test_plot_report(tmp_path):
    (rep,) = verify_thm_free(TwoPoint(0.5, 2.0), 2.0, paths=("closed",))
    assert plot_report(rep, tmp_path / "rep.svg").exists()
