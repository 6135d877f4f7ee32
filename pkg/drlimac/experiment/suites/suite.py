import abc
import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional

from ...scenario import ALOHA, DRLI, ScenarioConfig
from ...topology import preset
from ..output import ResultSet, emit_outputs
from ..runner import Runner, SweepPoint

# Learned runs need many more epochs than ALOHA runs to settle
CONVERGENCE_EPOCHS = 5000
SWEEP_EPOCHS = 2000
ALOHA_EPOCHS = 200

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteSettings:
    seed: int = 0
    # Overrides every default epoch count of the suite when set
    epochs: Optional[int] = None
    ground_truth_info: bool = False

    def scenario(
        self, name, topology, loads, *, mode=DRLI, epochs=SWEEP_EPOCHS, schedules=None
    ) -> ScenarioConfig:
        topo = preset(topology)
        if isinstance(loads, (int, float)):
            loads = (loads,) * topo.node_count
        return ScenarioConfig(
            topology=topo,
            topology_name=topology,
            loads=tuple(float(g) for g in loads),
            mode=mode,
            epochs=self.epochs or epochs,
            seed=self.seed,
            name=name,
            schedules=schedules or {},
            ground_truth_info=self.ground_truth_info,
        )


async def sweep_both_modes(
    runner: Runner, settings: SuiteSettings, name, topology, loads, grid, nodes=None
) -> List[SweepPoint]:
    # Same grid and seeds for both modes, ALOHA with its shorter run length
    aloha = settings.scenario(name, topology, loads, mode=ALOHA, epochs=ALOHA_EPOCHS)
    drli = settings.scenario(name, topology, loads, mode=DRLI)
    return [
        *await runner.sweep_load(aloha, grid, nodes=nodes),
        *await runner.sweep_load(drli, grid, nodes=nodes),
    ]


class Suite(abc.ABC):
    """
    One family of experiments. Suites are stateless; every call to `run`
    builds its scenarios from the settings it is given.
    """

    @classmethod
    @abc.abstractmethod
    def namespace(cls) -> str:
        raise NotImplementedError

    @classmethod
    @abc.abstractmethod
    def description(cls) -> str:
        raise NotImplementedError

    @classmethod
    @abc.abstractmethod
    async def _run(cls, runner: Runner, settings: SuiteSettings) -> Dict[str, ResultSet]:
        # Should return `{output subdirectory: results}`
        raise NotImplementedError

    @classmethod
    async def run(cls, runner: Runner, out_dir, settings=SuiteSettings()) -> List[str]:
        _log.info("running suite %s: %s", cls.namespace(), cls.description())
        written = []
        for part, results in (await cls._run(runner, settings)).items():
            written.extend(emit_outputs(results, os.path.join(out_dir, cls.namespace(), part)))
        return written
