"""
Load-throughput experiments on the 3- and 4-node topologies.

Heterogeneous load values are only described relative to the ALOHA optimum
(below or above it), so the concrete values here are reconstructions:
`LOW` stands for a load below the optimum and `HIGH` for one above it.
"""
from ... import utils
from ...scenario import ALOHA
from ..output import ResultSet
from .suite import ALOHA_EPOCHS, CONVERGENCE_EPOCHS, Suite, sweep_both_modes

LOAD_GRID = utils.parse_grid("0.1:1.0:0.1")
SURFACE_GRID = utils.parse_grid("0:0.6:0.05")

LOW = 0.1
HIGH = 0.5

# Dynamic load phases in packet durations: about 2000 epochs at 1.0 Erlang,
# then 2000 at 0.1 and the rest at 0.8
DYNAMIC_SCHEDULE = ((2.0e6, 0.1), (2.2e7, 0.8))
DYNAMIC_EPOCHS = 6000


class HomogeneousLine3(Suite):
    @classmethod
    def namespace(cls):
        return "line3-homogeneous"

    @classmethod
    def description(cls):
        return "3-node line, homogeneous load sweep and convergence at g = 0.75"

    @classmethod
    async def _run(cls, runner, settings):
        sweep = await sweep_both_modes(runner, settings, "line3", "line3", LOAD_GRID[0], LOAD_GRID)
        convergence = await runner.run(
            settings.scenario("line3-g0.75", "line3", 0.75, epochs=CONVERGENCE_EPOCHS)
        )
        return {
            "sweep": ResultSet(sweep=sweep),
            "convergence": ResultSet(runs=[convergence]),
        }


class HeterogeneousLine3(Suite):
    @classmethod
    def namespace(cls):
        return "line3-heterogeneous"

    @classmethod
    def description(cls):
        return "3-node line, node 3 load swept with nodes 1 and 2 fixed below or above the optimum"

    @classmethod
    async def _run(cls, runner, settings):
        sets = {}
        for g1, g2 in ((LOW, LOW), (LOW, HIGH), (HIGH, HIGH)):
            name = f"line3-g1{g1:g}-g2{g2:g}"
            sweep = await sweep_both_modes(
                runner, settings, name, "line3", (g1, g2, LOAD_GRID[0]), LOAD_GRID, nodes=(2,)
            )
            sets[name] = ResultSet(sweep=sweep)
        return sets


class DynamicLoad(Suite):
    @classmethod
    def namespace(cls):
        return "line3-dynamic"

    @classmethod
    def description(cls):
        return "3-node line, load changing 1.0 -> 0.1 -> 0.8 on every node"

    @classmethod
    async def _run(cls, runner, settings):
        cfg = settings.scenario(
            "line3-dynamic",
            "line3",
            1.0,
            epochs=DYNAMIC_EPOCHS,
            schedules={n: DYNAMIC_SCHEDULE for n in range(3)},
        )
        return {"dynamic": ResultSet(runs=[await runner.run(cfg)])}


class CompleteGraph4(Suite):
    @classmethod
    def namespace(cls):
        return "full4"

    @classmethod
    def description(cls):
        return "4-node complete graph, homogeneous load sweep"

    @classmethod
    async def _run(cls, runner, settings):
        sweep = await sweep_both_modes(runner, settings, "full4", "full4", LOAD_GRID[0], LOAD_GRID)
        return {"sweep": ResultSet(sweep=sweep)}


class Line4(Suite):
    @classmethod
    def namespace(cls):
        return "line4"

    @classmethod
    def description(cls):
        return "4-node line, ALOHA throughput surface with its fair line and learned load sweep"

    @classmethod
    async def _run(cls, runner, settings):
        base = settings.scenario("line4", "line4", 0.1, mode=ALOHA, epochs=ALOHA_EPOCHS)
        surface = await runner.surface_sweep(base, SURFACE_GRID, SURFACE_GRID)
        sweep = await sweep_both_modes(runner, settings, "line4", "line4", LOAD_GRID[0], LOAD_GRID)
        return {
            "surface": ResultSet(surface=surface),
            "sweep": ResultSet(sweep=sweep),
        }


class HeterogeneousLine4(Suite):
    @classmethod
    def namespace(cls):
        return "line4-heterogeneous"

    @classmethod
    def description(cls):
        return "4-node line, node 4 load swept with nodes 1 to 3 above the optimum"

    @classmethod
    async def _run(cls, runner, settings):
        sweep = await sweep_both_modes(
            runner,
            settings,
            "line4-heterogeneous",
            "line4",
            (HIGH, HIGH, HIGH, LOAD_GRID[0]),
            LOAD_GRID,
            nodes=(3,),
        )
        return {"sweep": ResultSet(sweep=sweep)}

