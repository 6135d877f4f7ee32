import asyncio
import csv

import pytest

from drlimac.__main__ import main
from drlimac.database import Database
from drlimac.scenario import from_string
from drlimac.simulation import run_scenario

SCENARIO = """
[scenario]
name = tiny
topology = line3
load = 0.2
mode = aloha
epochs = 3
packets_per_epoch = 50
seed = 1
"""


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "tiny.ini"
    path.write_text(SCENARIO, encoding="utf-8")
    return path


def test_run_command(tmp_path, scenario_file, capsys):
    out = tmp_path / "out"
    main(["run", str(scenario_file), "--out-dir", str(out), "--epochs", "2"])
    printed = capsys.readouterr().out.split()
    assert str(out / "epochs.csv") in printed
    with open(out / "epochs.csv", newline="", encoding="utf-8") as fd:
        assert len(list(csv.DictReader(fd))) == 2 * 3


def test_sweep_command_saves_into_the_store(tmp_path, scenario_file):
    db = tmp_path / "store.sqlite3"
    main(
        [
            "sweep", str(scenario_file), "--grid", "0.1,0.2", "--modes", "aloha",
            "--out-dir", str(tmp_path / "sweep"), "--db", str(db),
        ]
    )
    assert (tmp_path / "sweep" / "sweep.csv").exists()

    async def runs():
        async with Database(db) as store:
            return await store.get_runs()

    assert len(asyncio.run(runs())) == 2


def test_plot_command(tmp_path, capsys):
    result = run_scenario(from_string(SCENARIO))
    csv_path = tmp_path / "epochs.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fd:
        writer = csv.writer(fd)
        writer.writerow(("run", *result.rows[0]._fields))
        writer.writerows(("tiny", *row) for row in result.rows)

    main(["plot", str(csv_path), "--kind", "convergence"])
    assert (tmp_path / "epochs-convergence.svg").exists()
    assert capsys.readouterr().out.strip() == str(tmp_path / "epochs-convergence.svg")


def test_export_command(tmp_path):
    db = tmp_path / "store.sqlite3"

    async def save():
        async with Database(db) as store:
            await store.save_run(run_scenario(from_string(SCENARIO)))

    asyncio.run(save())
    main(["export", str(db), "--out-dir", str(tmp_path / "csv")])
    for name in ("epochs.csv", "network.csv", "summary.csv"):
        assert (tmp_path / "csv" / name).exists()


def test_missing_config_is_fatal(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["run", str(tmp_path / "nope.ini")])
    assert e.value.code == 1
    assert capsys.readouterr().err.startswith("fatal: could not open config file")


def test_empty_config_is_fatal(tmp_path, capsys):
    path = tmp_path / "empty.ini"
    path.write_text("\n", encoding="utf-8")
    with pytest.raises(SystemExit):
        main(["run", str(path)])
    assert "is empty" in capsys.readouterr().err


def test_invalid_scenario_is_fatal(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[scenario]\ntopology = hexagon\n", encoding="utf-8")
    with pytest.raises(SystemExit) as e:
        main(["run", str(path), "--out-dir", str(tmp_path)])
    assert e.value.code == 1
    assert capsys.readouterr().err.startswith("fatal: ConfigError")


def test_missing_store_is_fatal(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["export", str(tmp_path / "none.sqlite3")])
    assert "no results store" in capsys.readouterr().err
