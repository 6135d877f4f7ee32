"""
Larger meshes and the effect of the two-hop degree on learning.

Apart from their node count and maximum two-hop degree these topologies are
unknown; the presets used here are reconstructions with those properties.
"""
from ..output import ResultSet
from .suite import Suite, sweep_both_modes
from .throughput import LOAD_GRID

# Denser networks peak at lower per-node loads, so the low end is finer
DENSITY_GRID = (0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.6, 0.8)
DEGRADATION_EPOCHS = 1500

DEGRADATION_TOPOLOGIES = ("mesh8", "mesh12_d7", "mesh12_d9", "mesh12_d10", "ring10_d5", "mesh10_d9")
COLLISION_TOPOLOGIES = (
    "line3",
    "star5",
    "ring10_d5",
    "mesh8",
    "mesh12_d7",
    "mesh12_d9",
    "mesh12_d10",
    "mesh12_d11",
)


async def _sweeps(runner, settings, topologies, grid):
    return {
        name: ResultSet(sweep=await sweep_both_modes(runner, settings, name, name, grid[0], grid))
        for name in topologies
    }


async def _degradation(runner, settings, topologies):
    cfgs = [
        settings.scenario(name, name, DENSITY_GRID[0], epochs=DEGRADATION_EPOCHS)
        for name in topologies
    ]
    return ResultSet(degradation=await runner.degradation_study(cfgs, DENSITY_GRID))


class FiveNodeMeshes(Suite):
    @classmethod
    def namespace(cls):
        return "five-node"

    @classmethod
    def description(cls):
        return "5-node meshes, load sweeps"

    @classmethod
    async def _run(cls, runner, settings):
        return await _sweeps(runner, settings, ("star5", "ring5", "line5"), LOAD_GRID)


class LargeMeshes(Suite):
    @classmethod
    def namespace(cls):
        return "large-mesh"

    @classmethod
    def description(cls):
        return "8- and 12-node meshes with maximum two-hop degree 7, load sweeps"

    @classmethod
    async def _run(cls, runner, settings):
        return await _sweeps(runner, settings, ("mesh8", "mesh12_d7"), DENSITY_GRID)


class DenseMesh(Suite):
    @classmethod
    def namespace(cls):
        return "dense-mesh"

    @classmethod
    def description(cls):
        return "12-node mesh with maximum two-hop degree 11, load sweep"

    @classmethod
    async def _run(cls, runner, settings):
        return await _sweeps(runner, settings, ("mesh12_d11",), DENSITY_GRID)


class Degradation(Suite):
    @classmethod
    def namespace(cls):
        return "degradation"

    @classmethod
    def description(cls):
        return "sustaining or degrading throughput against network size and two-hop degree"

    @classmethod
    async def _run(cls, runner, settings):
        return {"degradation": await _degradation(runner, settings, DEGRADATION_TOPOLOGIES)}


class CollisionByDegree(Suite):
    @classmethod
    def namespace(cls):
        return "collision-degree"

    @classmethod
    def description(cls):
        return "collision probability against load and maximum two-hop degree"

    @classmethod
    async def _run(cls, runner, settings):
        return {"collision": await _degradation(runner, settings, COLLISION_TOPOLOGIES)}
