import asyncio
import csv

import pytest

from drlimac.database import Database
from drlimac.scenario import ALOHA
from drlimac.simulation import run_scenario


@pytest.fixture
def results(make_scenario):
    return [
        run_scenario(make_scenario(mode=ALOHA, epochs=5, name="aloha")),
        run_scenario(make_scenario(epochs=4, name="drli", seed=2)),
    ]


def test_save_and_read_back(tmp_path, results):
    async def scenario():
        async with Database(tmp_path / "runs.sqlite3") as db:
            ids = [await db.save_run(r) for r in results]
            runs = await db.get_runs()
            summary = await db.get_summary(ids[1])
            network = await db.get_network(ids[0])
        return ids, runs, summary, network

    ids, runs, summary, network = asyncio.run(scenario())
    assert ids == [1, 2]
    assert [(r.name, r.mode) for r in runs] == [("aloha", "aloha"), ("drli", "drli")]
    assert runs[0].config_json == results[0].config.to_json()
    assert [s.node for s in summary] == [0, 1, 2]
    assert summary[0].network_throughput == pytest.approx(results[1].network_throughput)
    assert network == pytest.approx(results[0].network)


def test_reopening_keeps_runs(tmp_path, results):
    path = tmp_path / "runs.sqlite3"

    async def save():
        async with Database(path) as db:
            await db.save_run(results[0])

    async def count():
        async with Database(path) as db:
            await db.save_run(results[1])
            return len(await db.get_runs())

    asyncio.run(save())
    assert asyncio.run(count()) == 2


def test_export_csv(tmp_path, results):
    async def export():
        async with Database(tmp_path / "runs.sqlite3") as db:
            for r in results:
                await db.save_run(r)
            return await db.export_csv(tmp_path / "out")

    written = asyncio.run(export())
    assert [p.rsplit("/", 1)[-1] for p in map(str, written)] == [
        "epochs.csv",
        "network.csv",
        "summary.csv",
    ]

    with open(written[0], newline="", encoding="utf-8") as fd:
        rows = list(csv.DictReader(fd))
    assert len(rows) == 5 * 3 + 4 * 3
    assert rows[0]["run"] == "aloha"
    assert {r["run"] for r in rows} == {"aloha", "drli"}
    assert "run_id" not in rows[0]

    with open(written[2], newline="", encoding="utf-8") as fd:
        summary = list(csv.DictReader(fd))
    assert [(r["run"], r["node"]) for r in summary][:3] == [
        ("aloha", "0"),
        ("aloha", "1"),
        ("aloha", "2"),
    ]
