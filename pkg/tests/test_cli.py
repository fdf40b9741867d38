import json
from pathlib import Path

import pytest

from covertnav.cli import main


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_full_cli_flow(workdir):
    assert (
        main(
            [
                "gen-scenario",
                "--kind",
                "normal_elevation",
                "--seed",
                "3",
                "--out",
                "scenario.json",
                "--density",
                "0.2",
            ]
        )
        == 0
    )
    assert Path("scenario.json").exists()

    assert (
        main(
            [
                "train",
                "--scenario",
                "scenario.json",
                "--seed",
                "1",
                "--episodes",
                "2",
                "--steps",
                "10",
                "--warmup",
                "5",
                "--out-checkpoint",
                "agent.json",
                "--out-curve",
                "curve.csv",
            ]
        )
        == 0
    )
    assert Path("agent.json").exists()
    curve_rows = Path("curve.csv").read_text().strip().splitlines()
    assert curve_rows[0] == "episode,return"
    assert len(curve_rows) == 3
    assert Path("curve.png").exists()

    assert (
        main(
            [
                "eval",
                "--checkpoint",
                "agent.json",
                "--scenario",
                "scenario.json",
                "--episodes",
                "2",
                "--seed",
                "5",
                "--out-report",
                "report.json",
                "--logs-dir",
                "logs",
            ]
        )
        == 0
    )
    report = json.loads(Path("report.json").read_text())
    assert report["cells"][0]["policy"] == "agent"
    assert Path("report.csv").exists()
    assert Path("report.png").exists()
    assert Path("logs/episode_000.json").exists()
    assert Path("logs/episode_000.csv").exists()

    assert (
        main(
            [
                "replay",
                "--log",
                "logs/episode_000.json",
                "--out-plot",
                "replay.png",
            ]
        )
        == 0
    )
    assert Path("replay.png").exists()

    assert (
        main(
            [
                "compare",
                "--policies",
                "dwa,standstill,agent:agent.json",
                "--scenarios",
                "scenario.json",
                "--episodes",
                "1",
                "--seed",
                "2",
                "--out",
                "cmp.json",
            ]
        )
        == 0
    )
    cmp_data = json.loads(Path("cmp.json").read_text())
    assert {c["policy"] for c in cmp_data["cells"]} == {"dwa", "standstill", "agent:agent.json"}
    assert Path("cmp.csv").exists()
    assert Path("cmp.png").exists()


def test_cli_reports_errors(workdir, capsys):
    assert main(["replay", "--log", "missing.json", "--out-plot", "x.png"]) == 1
    assert "error:" in capsys.readouterr().err

    assert main(["compare", "--policies", "nosuch", "--scenarios", "normal_elevation",
                 "--episodes", "1", "--seed", "0", "--out", "r.json"]) == 1
    assert "unknown policy" in capsys.readouterr().err


def test_gen_scenario_by_kind_name_in_compare(workdir):
    assert (
        main(
            [
                "compare",
                "--policies",
                "standstill",
                "--scenarios",
                "low_elevation",
                "--episodes",
                "1",
                "--seed",
                "0",
                "--out",
                "kind.json",
            ]
        )
        == 0
    )
    data = json.loads(Path("kind.json").read_text())
    assert data["cells"][0]["scenario"] == "low_elevation@0"
