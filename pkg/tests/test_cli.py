import json

import numpy as np
import pytest
from click.testing import CliRunner

from mixopt.campaign import example_constraints
from mixopt.cli import main
from mixopt.datasets import simulate_measurement
from mixopt.design_space import sample_mixtures

CSV_HEADER = ("cement,slag,fly_ash,water,fine_aggregate,coarse_aggregate,"
              "superplasticizer,age_days,strength,strength_unit,batch,replicate\n")


@pytest.fixture()
def runner():
    return CliRunner()


def _write_measurements(path, n_mixtures=6, seed=2, ages=(1.0, 3.0, 28.0)):
    mixtures = sample_mixtures(example_constraints(), n_mixtures, seed=seed)
    rng = np.random.default_rng(seed)
    lines = [CSV_HEADER]
    for i, m in enumerate(mixtures):
        for age in ages:
            q = m.to_dict()
            lines.append(
                f"{q['cement']:.2f},{q['slag']:.2f},{q['fly_ash']:.2f},{q['water']:.2f},"
                f"{q['fine_aggregate']:.2f},{q['coarse_aggregate']:.2f},"
                f"{q['superplasticizer']:.3f},{age},"
                f"{simulate_measurement(m, age, rng):.2f},MPa,batch-1,{i}\n"
            )
    path.write_text("".join(lines))


def _init(runner, store, campaign="demo"):
    result = runner.invoke(main, ["--store", str(store), "init", campaign, "--example"])
    assert result.exit_code == 0, result.output
    return campaign


def test_init_and_reinit_guard(runner, tmp_path):
    store = tmp_path / "store"
    _init(runner, store)
    again = runner.invoke(main, ["--store", str(store), "init", "demo", "--example"])
    assert again.exit_code != 0
    assert "already exists" in again.output


def test_init_requires_config(runner, tmp_path):
    result = runner.invoke(main, ["--store", str(tmp_path), "init", "x"])
    assert result.exit_code != 0


def test_ingest_fit_propose_pareto_cycle(runner, tmp_path):
    store = tmp_path / "store"
    _init(runner, store)
    csv_path = tmp_path / "obs.csv"
    _write_measurements(csv_path)

    result = runner.invoke(main, ["--store", str(store), "ingest", "demo", str(csv_path)])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["n_accepted"] == 18

    result = runner.invoke(main, ["--store", str(store), "fit", "demo", "--restarts", "2"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["snapshot_digest"]

    result = runner.invoke(
        main, ["--store", str(store), "propose", "demo", "--q", "2", "--seed", "1"]
    )
    assert result.exit_code == 0, result.output
    batch = json.loads(result.output)
    assert len(batch["mixtures"]) == 2 and batch["origin"] == "ai"

    result = runner.invoke(
        main, ["--store", str(store), "pareto", "demo", "--age", "28", "--format", "csv"]
    )
    assert result.exit_code == 0, result.output
    header = result.output.splitlines()[0]
    assert "strength_mpa" in header and "gwp_kgco2e_m3" in header


def test_psi_golden_file_through_cli(runner, tmp_path):
    store = tmp_path / "store"
    _init(runner, store)
    csv_path = tmp_path / "psi.csv"
    csv_path.write_text(CSV_HEADER + "300,0,0,160,800,950,2,28,5979,psi,b1,\n")
    result = runner.invoke(main, ["--store", str(store), "ingest", "demo", str(csv_path)])
    assert result.exit_code == 0
    out = runner.invoke(main, ["--store", str(store), "pareto", "demo", "--age", "28"])
    points = json.loads(out.output)["points"]
    assert points[0]["strength_mpa"] == pytest.approx(41.22, abs=0.005)


def test_infer_and_cv_commands(runner, tmp_path):
    store = tmp_path / "store"
    _init(runner, store)
    csv_path = tmp_path / "obs.csv"
    _write_measurements(csv_path, n_mixtures=6)
    runner.invoke(main, ["--store", str(store), "ingest", "demo", str(csv_path)])
    runner.invoke(main, ["--store", str(store), "fit", "demo", "--restarts", "2"])

    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps({"exclude": ["slag"]}))
    result = runner.invoke(main, [
        "--store", str(store), "infer", "demo", "--scenario", str(scenario),
        "--candidates", "800", "--seed", "3",
    ])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["points"] and all(
        p["mixture"].get("slag", 0.0) == 0.0 for p in payload["points"]
    )

    result = runner.invoke(main, [
        "--store", str(store), "cv", "demo", "--folds", "3", "--format", "json",
    ])
    assert result.exit_code == 0, result.output
    summary = json.loads(result.output)
    assert summary["folds"] == 3 and summary["rmse"] > 0


def test_infer_without_fit_fails_cleanly(runner, tmp_path):
    store = tmp_path / "store"
    _init(runner, store)
    result = runner.invoke(main, ["--store", str(store), "infer", "demo"])
    assert result.exit_code != 0
    assert "fit" in result.output.lower()


def test_example_config_command(runner, tmp_path):
    result = runner.invoke(main, ["example-config", str(tmp_path / "cfg")])
    assert result.exit_code == 0
    constraints = json.loads((tmp_path / "cfg" / "constraints.json").read_text())
    assert "bounds" in constraints
    gwp = json.loads((tmp_path / "cfg" / "gwp.json").read_text())
    assert gwp["coefficients"]["cement"] > 0
