import os

import hypothesis
import numpy as np
import pytest

from drlimac.agent import AgentConfig
from drlimac.scenario import DRLI, ScenarioConfig
from drlimac.topology import Topology, preset

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)
hypothesis.settings.register_profile("dev", deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def line3() -> Topology:
    return preset("line3")


@pytest.fixture
def full4() -> Topology:
    return preset("full4")


@pytest.fixture
def make_scenario():
    """
    Small scenarios for fast tests: short epochs of 100 arrivals unless the
    test asks otherwise.
    """

    def make(topology="line3", load=0.2, *, mode=DRLI, epochs=20, **kwargs):
        topo = preset(topology) if isinstance(topology, str) else topology
        loads = kwargs.pop("loads", (load,) * topo.node_count)
        kwargs.setdefault("packets_per_epoch", 100)
        kwargs.setdefault("agent", AgentConfig())
        return ScenarioConfig(
            topology=topo,
            topology_name=topology if isinstance(topology, str) else "custom",
            loads=tuple(loads),
            mode=mode,
            epochs=epochs,
            **kwargs,
        )

    return make

