"""Tests for the twowell command line: run, validate, preset."""

import json
import sys
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from twowell.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from twowell.runner import format_number


def _write(path: Path, data) -> Path:
    path.write_text(data if isinstance(data, str) else json.dumps(data, indent=2))
    return path


def _adiabatic(tmp_path: Path, **extra) -> Path:
    block = {"N": 10, "Ng_over_kappa": [-2.0, 0.0], "T_nK": [0.0, 50.0], **extra}
    return _write(tmp_path / "adiabatic.json", {"scenario": "adiabatic", "adiabatic": block})


def test_format_number():
    assert format_number(None) == "undefined"
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(3) == "3"
    assert format_number(True) == "true"


def test_run_adiabatic_csv(tmp_path):
    out = tmp_path / "fig2.csv"
    assert main(["run", str(_adiabatic(tmp_path)), "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "Ng_over_kappa,T_nK,E_HZ,E_entropic"
    assert len(lines) == 5
    assert lines[2].startswith("-2,50,")
    assert lines[2].endswith(",undefined")
    assert lines[3].startswith("0,0,")
    assert float(lines[3].split(",")[2]) == pytest.approx(0.9)

    manifest = json.loads((tmp_path / "fig2.csv.manifest.json").read_text())
    assert manifest["rows"] == 4
    assert manifest["config"]["adiabatic"]["N"] == 10
    assert manifest["config"]["adiabatic"]["kappa_scale"] == 50.0
    assert "numpy_version" in manifest and "wall_time_s" in manifest


def test_run_number_squeezing_column(tmp_path):
    out = tmp_path / "squeeze.csv"
    config = _adiabatic(tmp_path, include_number_squeezing=True)
    assert main(["run", str(config), "--out", str(out)]) == EXIT_OK
    assert out.read_text().splitlines()[0] == "Ng_over_kappa,T_nK,E_HZ,E_entropic,number_squeezing_dB"


def test_run_is_deterministic(tmp_path):
    config = _adiabatic(tmp_path)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", str(config), "--out", str(first)]) == EXIT_OK
    assert main(["run", str(config), "--out", str(second), "--threads", "0"]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_run_json_format(tmp_path):
    out = tmp_path / "fig2.json"
    assert main(["run", str(_adiabatic(tmp_path)), "--format", "json", "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["columns"] == ["Ng_over_kappa", "T_nK", "E_HZ", "E_entropic"]
    assert data["rows"][1]["E_entropic"] is None
    assert data["rows"][0]["E_entropic"] is not None


def test_run_dynamic(tmp_path):
    config = _write(
        tmp_path / "dyn.json",
        {"scenario": "dynamic", "dynamic": {"N_A": 200, "tau": [0.0, 0.1]}, "output": {"path": str(tmp_path / "dyn.csv")}},
    )
    assert main(["run", str(config)]) == EXIT_OK
    lines = (tmp_path / "dyn.csv").read_text().splitlines()
    assert lines[0] == "tau,S_plus_dB,S_minus_dB,theta,E_product,E_sum"
    assert len(lines) == 3
    manifest = json.loads((tmp_path / "dyn.csv.manifest.json").read_text())
    assert manifest["config"]["dynamic"]["alpha"] == [10.0, 0.0]
    assert manifest["config"]["dynamic"]["tau"] == [0.0, 0.1]


def test_run_oracle_check(tmp_path, capsys):
    config = _write(
        tmp_path / "oracle.json",
        {"scenario": "oracle-check", "oracle-check": {"alpha_sq": [4.0], "tau": [0.1, 1.0, 5.0]}},
    )
    out = tmp_path / "oracle.csv"
    assert main(["run", str(config), "--out", str(out)]) == EXIT_OK
    assert "Max relative deviation" in capsys.readouterr().out
    manifest = json.loads((tmp_path / "oracle.csv.manifest.json").read_text())
    assert manifest["max_rel_deviation"] < 1e-8
    assert len(out.read_text().splitlines()) == 1 + 2 * 3


def test_run_oracle_insufficient_cutoff(tmp_path, capsys):
    config = _write(
        tmp_path / "oracle.json",
        {"scenario": "oracle-check", "oracle-check": {"alpha_sq": [4.0], "tau": [1.0], "cutoff": 3}},
    )
    assert main(["run", str(config), "--out", str(tmp_path / "o.csv")]) == EXIT_NUMERIC
    assert "cutoff" in capsys.readouterr().err


def test_run_config_errors(tmp_path, capsys):
    broken = _write(tmp_path / "broken.json", '{"scenario": "adiabatic",\n "adiabatic": {')
    assert main(["run", str(broken)]) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err

    cold = _write(tmp_path / "cold.json", {"scenario": "adiabatic", "adiabatic": {"T_nK": [-1]}})
    assert main(["run", str(cold)]) == EXIT_CONFIG
    assert "ThermalSpec" in capsys.readouterr().err


def test_oversized_atom_number_fails_validation(tmp_path, capsys):
    config = _write(tmp_path / "big.json", {"scenario": "adiabatic", "adiabatic": {"N": 300000}})
    assert main(["validate", str(config)]) == EXIT_CONFIG
    assert "adiabatic.N" in capsys.readouterr().err
    assert main(["run", str(config), "--out", str(tmp_path / "big.csv")]) == EXIT_CONFIG
    assert not (tmp_path / "big.csv").exists()


def test_run_maps_library_errors_to_numeric_exit(tmp_path, capsys, monkeypatch):
    import twowell.runner
    from twowell.errors import InvalidStateError

    def broken_run(*args, **kwargs):
        raise InvalidStateError("density matrix trace 0.5 is not 1")

    monkeypatch.setattr(twowell.runner, "run", broken_run)
    assert main(["run", str(_adiabatic(tmp_path))]) == EXIT_NUMERIC
    assert "InvalidStateError" in capsys.readouterr().err


def test_validate_command(tmp_path, capsys):
    assert main(["validate", str(_adiabatic(tmp_path))]) == EXIT_OK
    assert "ok" in capsys.readouterr().out
    bad = _write(tmp_path / "bad.json", {"scenario": "dynamic"})
    assert main(["validate", str(bad)]) == EXIT_CONFIG
    assert "dynamic" in capsys.readouterr().err


def test_preset_command(tmp_path, capsys):
    out = tmp_path / "fig3.json"
    assert main(["preset", "fig3", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["scenario"] == "dynamic"
    assert main(["validate", str(out)]) == EXIT_OK
    capsys.readouterr()
    assert main(["preset", "fig4"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["dynamic"]["g_ratios"][0][1] == 0


def test_preset_unknown_name():
    with pytest.raises(SystemExit):
        main(["preset", "fig9"])


if __name__ == "__main__":
    test_format_number()
    print("\nAll tests passed!")
