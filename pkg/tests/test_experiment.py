import asyncio
import csv

import numpy as np
import pytest

from drlimac.database import Database
from drlimac.errors import ConfigError, ValidationError
from drlimac.experiment import SUITES, ResultSet, Runner, emit_outputs, plot_csv
from drlimac.experiment.runner import fair_mask, is_sustaining, oracle_report
from drlimac.experiment.suites import Suite
from drlimac.scenario import ALOHA, DRLI
from drlimac.simulation import run_scenario
from drlimac.utils import derive_seed


def _read(path):
    with open(path, newline="", encoding="utf-8") as fd:
        return list(csv.DictReader(fd))


def _sweep(base, grid, **kwargs):
    async def sweep():
        async with Runner() as runner:
            return await runner.sweep_load(base, grid, **kwargs)

    return asyncio.run(sweep())


def test_sweep_runs_every_point(make_scenario):
    base = make_scenario(epochs=3, packets_per_epoch=50, seed=5, name="line")
    points = _sweep(base, [0.1, 0.3], modes=(ALOHA, DRLI))

    assert [(p.mode, p.load) for p in points] == [
        (ALOHA, 0.1), (ALOHA, 0.3), (DRLI, 0.1), (DRLI, 0.3)
    ]
    assert [p.result.config.name for p in points[:2]] == ["line-aloha-g0.1", "line-aloha-g0.3"]
    for k, (aloha, drli) in enumerate(zip(points[:2], points[2:])):
        assert aloha.result.config.seed == drli.result.config.seed == derive_seed(5, k)
    for p in points:
        assert p.result.config.loads == (p.load,) * 3
        assert p.network_throughput == pytest.approx(sum(p.throughputs))


def test_sweep_of_selected_nodes(make_scenario):
    base = make_scenario(loads=(0.1, 0.5, 0.2), epochs=2, packets_per_epoch=50)
    points = _sweep(base, [0.3, 0.4], nodes=(2,))
    assert [p.result.config.loads for p in points] == [(0.1, 0.5, 0.3), (0.1, 0.5, 0.4)]
    assert all(p.mode == DRLI for p in points)


def test_single_point_sweep_is_a_run(make_scenario):
    base = make_scenario(epochs=3, packets_per_epoch=50)
    (point,) = _sweep(base, [0.2])
    direct = run_scenario(point.result.config)
    assert point.result.rows == direct.rows


def test_sweep_needs_a_grid(make_scenario):
    with pytest.raises(ConfigError):
        _sweep(make_scenario(), [])


def test_negative_workers():
    with pytest.raises(ConfigError):
        Runner(workers=-1)


def test_runner_saves_into_the_store(tmp_path, make_scenario):
    cfgs = [make_scenario(epochs=2, seed=s, name=f"run{s}") for s in range(3)]

    async def run():
        async with Database(tmp_path / "store.sqlite3") as db:
            async with Runner(db=db) as runner:
                await runner.run_all(cfgs)
            return await db.get_runs()

    runs = asyncio.run(run())
    assert sorted(r.name for r in runs) == ["run0", "run1", "run2"]


def test_surface_needs_the_four_node_line(make_scenario):
    async def surface():
        async with Runner() as runner:
            await runner.surface_sweep(make_scenario("full4"), [0.1], [0.1])

    with pytest.raises(ConfigError):
        asyncio.run(surface())


def test_small_surface(make_scenario):
    cfg = make_scenario("line4", epochs=2, packets_per_epoch=50)

    async def surface():
        async with Runner() as runner:
            return await runner.surface_sweep(cfg, [0.0, 0.2], [0.0, 0.3])

    surface = asyncio.run(surface())
    assert surface.network.shape == (2, 2)
    assert surface.throughputs.shape == (2, 2, 4)
    assert surface.network[0, 0] == 0.0
    assert surface.network[1, 1] > 0
    # Only nodes 2 and 3 are loaded at (0, 0.3)
    assert surface.throughputs[0, 1, 0] == surface.throughputs[0, 1, 3] == 0.0
    rows = list(surface.rows())
    assert len(rows) == 4
    assert rows[0][:2] == (0.0, 0.0) and rows[0][-1] == 0


def test_fair_mask():
    throughputs = np.array(
        [
            [[0.06, 0.06, 0.06, 0.06], [0.05, 0.07, 0.07, 0.05]],
            [[0.0, 0.0, 0.0, 0.0], [0.100, 0.102, 0.102, 0.100]],
        ]
    )
    np.testing.assert_array_equal(fair_mask(throughputs), [[True, False], [False, True]])
    np.testing.assert_array_equal(
        fair_mask(throughputs, spread=0.5), [[True, True], [False, True]]
    )


def test_is_sustaining():
    loads = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
    assert is_sustaining(loads, [0.1, 0.2, 0.24, 0.24, 0.23, 0.22])
    assert not is_sustaining(loads, [0.1, 0.2, 0.24, 0.2, 0.15, 0.1])
    # Twice the peak load is off the grid: compare with the last point
    assert is_sustaining([0.1, 0.2, 0.3], [0.05, 0.08, 0.3])


def test_oracle_report_only_for_complete_aloha(make_scenario):
    full = run_scenario(make_scenario("full4", load=0.1, mode=ALOHA, epochs=3))
    report = oracle_report(full)
    assert report is not None
    assert report.simulated == pytest.approx(full.network_throughput)
    assert report.analytic > 0
    assert oracle_report(run_scenario(make_scenario(mode=ALOHA, epochs=2))) is None
    assert oracle_report(run_scenario(make_scenario("full4", epochs=2))) is None


def test_emit_run_outputs(tmp_path, make_scenario):
    result = run_scenario(
        make_scenario(epochs=5, name="single", trace_transmissions=True, trace_ledgers=True)
    )
    written = emit_outputs(ResultSet(runs=[result]), tmp_path)
    names = sorted(p.rsplit("/", 1)[-1] for p in map(str, written))
    assert names == [
        "convergence.svg",
        "epochs.csv",
        "ledgers.csv",
        "network.csv",
        "summary.csv",
        "transmissions.csv",
    ]

    summary = _read(tmp_path / "summary.csv")
    assert len(summary) == 3
    assert {r["run"] for r in summary} == {"single"}
    assert len(_read(tmp_path / "epochs.csv")) == 15
    assert len(_read(tmp_path / "network.csv")) == 5


def test_replotting_a_csv_gives_the_same_svg(tmp_path, make_scenario):
    result = run_scenario(make_scenario(epochs=4))
    emit_outputs(ResultSet(runs=[result]), tmp_path)
    again = plot_csv(tmp_path / "epochs.csv", "convergence", tmp_path / "again.svg")
    with open(tmp_path / "convergence.svg", "rb") as a, open(again, "rb") as b:
        assert a.read() == b.read()


def test_emit_sweep_outputs(tmp_path, make_scenario):
    points = _sweep(make_scenario(epochs=2, packets_per_epoch=50), [0.1, 0.2], modes=(ALOHA, DRLI))
    written = emit_outputs(ResultSet(sweep=points), tmp_path)
    assert str(tmp_path / "load-throughput.svg") in map(str, written)
    assert not (tmp_path / "convergence.svg").exists()
    rows = _read(tmp_path / "sweep.csv")
    assert len(rows) == 4 * 3
    assert {(r["mode"], r["load"]) for r in rows} == {
        (ALOHA, "0.1"), (ALOHA, "0.2"), (DRLI, "0.1"), (DRLI, "0.2")
    }


def test_emit_degradation_outputs(tmp_path, make_scenario):
    cfgs = [
        make_scenario("line3", epochs=2, packets_per_epoch=50),
        make_scenario("star5", epochs=2, packets_per_epoch=50),
    ]

    async def study():
        async with Runner() as runner:
            return await runner.degradation_study(cfgs, [0.1, 0.2])

    curves = asyncio.run(study())
    assert [(c.name, c.node_count, c.max_two_hop_degree) for c in curves] == [
        ("line3", 3, 2),
        ("star5", 5, 4),
    ]
    emit_outputs(ResultSet(degradation=curves), tmp_path)
    assert len(_read(tmp_path / "degradation.csv")) == 4
    assert (tmp_path / "degradation.svg").exists()
    assert (tmp_path / "collision.svg").exists()


def test_emit_nothing(tmp_path):
    with pytest.raises(ValidationError):
        emit_outputs(ResultSet(), tmp_path)


def test_plot_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("mode,load,node,throughput,collision_prob,network_throughput\n")
    with pytest.raises(ValidationError):
        plot_csv(empty, "load-throughput")
    with pytest.raises(ConfigError):
        plot_csv(empty, "histogram")


def test_suite_registry():
    assert list(SUITES) == [
        "line3-homogeneous",
        "line3-heterogeneous",
        "line3-dynamic",
        "full4",
        "line4",
        "line4-heterogeneous",
        "five-node",
        "large-mesh",
        "dense-mesh",
        "degradation",
        "collision-degree",
    ]
    for name, cls in SUITES.items():
        assert issubclass(cls, Suite)
        assert cls.namespace() == name
        assert cls.description()
