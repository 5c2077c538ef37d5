# Copyright (C) 2026 StarHuntingGames
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import json
import os
import sys
from pathlib import Path

import pytest

SRC_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
if SRC_DIR not in sys.path:
    sys.path.insert(0, SRC_DIR)

from bellkit import cli, config  # noqa: E402
from bellkit.report import SCHEMA  # noqa: E402


@pytest.fixture(autouse=True)
def default_settings(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(config, "_SETTINGS", config.Settings())


def _read(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_bounds_report(tmp_path: Path) -> None:
    out = tmp_path / "bounds.json"
    assert cli.main(["bounds", "--n", "3", "--m", "2", "--seed", "5", "--out", str(out), "--quiet"]) == 0
    payload = _read(out)
    assert payload["schema"] == SCHEMA
    assert payload["command"] == "bounds"
    assert payload["seed"] == 5
    assert payload["params"] == {"n": 3, "m": 2}
    assert payload["result"] == {"B_LR": 2.0, "quantum_max": 4.0, "violation_factor": 2.0}


def test_reports_are_reproducible(tmp_path: Path) -> None:
    for command in ("leak-sweep", "protocols", "freedom"):
        first = tmp_path / f"{command}-1.json"
        second = tmp_path / f"{command}-2.json"
        assert cli.main([command, "--out", str(first), "--quiet"]) == 0
        assert cli.main([command, "--out", str(second), "--quiet"]) == 0
        assert first.read_bytes() == second.read_bytes()


def test_leak_sweep_csv(tmp_path: Path) -> None:
    out = tmp_path / "leak.csv"
    assert cli.main(["leak-sweep", "--format", "csv", "--out", str(out), "--quiet"]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    annotations = [line for line in lines if line.startswith("#")]
    assert [line.split("=")[0] for line in annotations] == ["# q_cl", "# q_0", "# q_qm"]
    header = lines[len(annotations)]
    assert header.split(",")[:3] == ["Q", "S", "D"]
    assert len(lines) - len(annotations) - 1 == 36


def test_protocols_report(tmp_path: Path) -> None:
    out = tmp_path / "protocols.json"
    assert cli.run(cli.ReportRequest(command="protocols", out=str(out))) == 0
    result = _read(out)["result"]
    assert result["dense_coding"]["10"] == [1, 0]
    assert result["dense_coding_orthogonal"] is True
    assert all(branch["fidelity"] == pytest.approx(1.0) for branch in result["teleport"])
    assert result["ghz"]["lr_models"] == 0


def test_qudit_eigen_report(tmp_path: Path) -> None:
    out = tmp_path / "qudit.json"
    assert cli.main(["qudit-eigen", "--d1", "2", "--d0", "3", "--out", str(out), "--quiet"]) == 0
    result = _read(out)["result"]
    assert result["printed_basis_match"] is True
    assert result["fourier_mub"] is True
    assert result["eigensystem"]["f"] == 2
    assert set(result["plan"]["stage2_bases"]) == {"0", "1"}


def test_violation_report(tmp_path: Path) -> None:
    out = tmp_path / "violation.json"
    argv = ["violation", "--n", "2", "--condition", "horodecki", "--restarts", "1", "--out", str(out), "--quiet"]
    assert cli.main(argv) == 0
    conditions = _read(out)["result"]["conditions"]
    assert len(conditions) == 1


def test_dry_run_reports_no_diagnostics(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(["bounds", "--dry-run"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"ok": True, "diagnostics": []}


def test_range_errors_exit_two(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.run(cli.ReportRequest(command="violation", params={"visibility": -0.1})) == 2
    assert cli.run(cli.ReportRequest(command="bounds", format="csv")) == 2
    assert cli.run(cli.ReportRequest(command="qudit-eigen", params={"d": 3, "k": 3})) == 2
    assert cli.run(cli.ReportRequest(command="violation", params={"state": "cat"})) == 2
    assert "\"range\"" in capsys.readouterr().err


def test_unknown_parameter() -> None:
    request = cli.ReportRequest(command="bounds", params={"z": 1})
    diagnostics = cli.validate(request)
    assert [item.kind for item in diagnostics] == ["unknown_key"]
    assert cli.run(request) == 2


def test_malformed_request_values() -> None:
    assert cli.main(["bounds", "--seed", "-1", "--quiet"]) == 2
    with pytest.raises(SystemExit) as raised:
        cli.main(["bounds", "--format", "xml"])
    assert raised.value.code == 2


def test_size_guards_exit_three() -> None:
    diagnostics = cli.validate(cli.ReportRequest(command="violation", params={"n": 12}))
    assert [item.kind for item in diagnostics] == ["guard"]
    assert cli.run(cli.ReportRequest(command="violation", params={"n": 12})) == 3
    assert cli.run(cli.ReportRequest(command="ccp-tables", params={"n_max": 20, "m_values": "5"})) == 3
