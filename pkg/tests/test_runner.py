"""Tests for table rendering, the oracle check and manifests."""

import json
import math
import sys
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from twowell.config import resolve
from twowell.errors import NumericError
from twowell.kerr import RB_SCATTERING_LENGTHS, KerrParams, dynamic_spin_moments, g_ratios_from_scattering_lengths
from twowell.runner import manifest_path, max_relative_deviation, render_csv, render_json, run

RB = g_ratios_from_scattering_lengths(**RB_SCATTERING_LENGTHS)


def test_render_csv_and_json():
    columns = ["tau", "E_product"]
    table = [[0.0, 1.0], [0.5, None]]
    assert render_csv(columns, table) == "tau,E_product\n0,1\n0.5,undefined\n"
    data = json.loads(render_json(columns, table))
    assert data["rows"][1] == {"tau": 0.5, "E_product": None}


def test_max_relative_deviation():
    sm = dynamic_spin_moments(KerrParams.from_atom_number(8, RB, tau=1.0), math.pi / 2)
    assert max_relative_deviation(sm, sm) == 0.0


def test_manifest_path():
    assert manifest_path(Path("out/fig3.csv")) == Path("out/fig3.csv.manifest.json")


def test_oracle_failure_still_writes_report(tmp_path):
    config = resolve(
        {
            "scenario": "oracle-check",
            "oracle-check": {"alpha_sq": [4.0], "tau": [1.0, 5.0], "tolerance": 1e-300},
            "output": {"path": str(tmp_path / "oracle.csv")},
        }
    )
    with pytest.raises(NumericError) as info:
        run(config)
    assert "alpha_sq=4.0" in str(info.value)
    assert (tmp_path / "oracle.csv").exists()
    manifest = json.loads((tmp_path / "oracle.csv.manifest.json").read_text())
    assert manifest["max_rel_deviation"] < 1e-8


def test_dynamic_threads_do_not_change_output(tmp_path):
    config = resolve({"scenario": "dynamic", "dynamic": {"tau": [0.0, 0.2, 0.4]}})
    serial = run(config, output=str(tmp_path / "serial.csv"))
    threaded = run(config, threads=3, output=str(tmp_path / "threaded.csv"))
    assert serial.read_bytes() == threaded.read_bytes()


if __name__ == "__main__":
    test_render_csv_and_json()
    test_manifest_path()
    print("\nAll tests passed!")
