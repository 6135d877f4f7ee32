import configparser
import dataclasses
import json
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

from . import utils
from .agent import AgentConfig
from .errors import ConfigError
from .topology import PRESETS, Topology, preset
from .traffic import TrafficSource

ALOHA = "aloha"
DRLI = "drli"
MODES = (ALOHA, DRLI)

PACKETS_PER_EPOCH = 1000


@dataclass(frozen=True)
class ScenarioConfig:
    topology: Topology
    loads: Tuple[float, ...]
    mode: str = DRLI
    agent: AgentConfig = field(default_factory=AgentConfig)
    epochs: int = 5000
    packets_per_epoch: int = PACKETS_PER_EPOCH
    seed: int = 0
    # `{node: ((time, load), ...)}`
    schedules: Mapping[int, Tuple[Tuple[float, float], ...]] = field(default_factory=dict)
    name: str = "scenario"
    # Feed the learners simulator ground truth instead of piggybacked values
    ground_truth_info: bool = False
    trace_transmissions: bool = False
    trace_ledgers: bool = False
    # Fraction of the final epochs summarized as the converged value
    summary_fraction: float = 0.1
    # Label of the topology (preset name or "custom")
    topology_name: str = "custom"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if len(self.loads) != self.topology.node_count:
            raise ConfigError(
                f"{len(self.loads)} loads given for {self.topology.node_count} nodes"
            )
        if any(not g >= 0 for g in self.loads):
            raise ConfigError(f"loads must be non-negative: {self.loads}")
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if not isinstance(self.packets_per_epoch, int) or self.packets_per_epoch < 1:
            raise ConfigError(
                f"packets per epoch must be at least 1, got {self.packets_per_epoch}"
            )
        if not 0 < self.summary_fraction <= 1:
            raise ConfigError(f"summary fraction must be in (0, 1], got {self.summary_fraction}")
        for node in self.schedules:
            if not 0 <= node < self.topology.node_count:
                raise ConfigError(f"schedule given for unknown node {node}")

        # Validates every node's schedule eagerly
        self.sources()
        if not any(s.ever_active() for s in self.sources()):
            raise ConfigError("every node has zero load, nothing would be simulated")

    def sources(self) -> Tuple[TrafficSource, ...]:
        return tuple(
            TrafficSource(
                node=n,
                load_erlang=self.loads[n],
                schedule=tuple(self.schedules.get(n, ())),
            )
            for n in self.topology.nodes
        )

    @property
    def learning(self) -> bool:
        return self.mode == DRLI

    def with_loads(self, loads) -> "ScenarioConfig":
        if isinstance(loads, (int, float)):
            loads = (float(loads),) * self.topology.node_count
        return dataclasses.replace(self, loads=tuple(float(g) for g in loads))

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "topology": self.topology_name,
                "nodes": self.topology.node_count,
                "edges": sorted(self.topology.edges),
                "loads": list(self.loads),
                "schedules": {str(n): list(s) for n, s in sorted(self.schedules.items())},
                "mode": self.mode,
                "agent": dataclasses.asdict(self.agent),
                "epochs": self.epochs,
                "packets_per_epoch": self.packets_per_epoch,
                "seed": self.seed,
                "ground_truth_info": self.ground_truth_info,
                "summary_fraction": self.summary_fraction,
            },
            sort_keys=True,
        )


def parse_topology(text, node_count=None) -> Tuple[Topology, str]:
    text = (text or "").strip()
    if not text:
        raise ConfigError("scenario has no topology")
    if text in PRESETS:
        return preset(text), text
    if "-" not in text:
        raise ConfigError(f"unknown topology preset {text!r}, known: {', '.join(PRESETS)}")
    return Topology.from_edges(utils.parse_edges(text), node_count), "custom"


def _parse_schedule(section) -> Tuple[Tuple[float, float], ...]:
    try:
        pairs = sorted((float(t), float(g)) for t, g in section.items())
    except ValueError as e:
        raise ConfigError(f"invalid schedule in [{section.name}]: {e}") from None
    return tuple(pairs)


def _agent_config(section) -> AgentConfig:
    if section is None:
        return AgentConfig()

    fields = {f.name: f for f in dataclasses.fields(AgentConfig)}
    kwargs = {}
    for key, value in section.items():
        if key not in fields:
            raise ConfigError(f"unknown agent setting {key!r}")
        kwargs[key] = value if key == "learner" else float(value)

    if kwargs.get("learner") == "classic" and "beta" not in kwargs:
        kwargs["beta"] = kwargs.get("alpha", AgentConfig.alpha)
    return AgentConfig(**kwargs)


def from_parser(config: configparser.ConfigParser, **overrides) -> ScenarioConfig:
    """
    Build a scenario from a parsed INI file. ``overrides`` are applied on top
    (only the ones that are not ``None``), which is how command-line flags win
    over file values.
    """
    if not config.has_section("scenario"):
        raise ConfigError("config has no [scenario] section")
    sc = config["scenario"]

    try:
        node_count = sc.getint("nodes") if sc.get("nodes") else None
        topology, topology_name = parse_topology(sc.get("topology"), node_count)

        load = sc.getfloat("load", 0.0)
        loads = [load] * topology.node_count
        if config.has_section("loads"):
            for node, value in config.items("loads"):
                node = int(node)
                if not 0 <= node < topology.node_count:
                    raise ConfigError(f"load given for unknown node {node}")
                loads[node] = float(value)

        schedules: Dict[int, Tuple[Tuple[float, float], ...]] = {}
        if config.has_section("schedule"):
            shared = _parse_schedule(config["schedule"])
            schedules = {n: shared for n in topology.nodes}
        for name in config.sections():
            if name.startswith("schedule."):
                schedules[int(name.split(".", 1)[1])] = _parse_schedule(config[name])

        kwargs = dict(
            name=sc.get("name", "scenario"),
            topology=topology,
            topology_name=topology_name,
            loads=tuple(loads),
            schedules=schedules,
            mode=sc.get("mode", DRLI).strip().lower(),
            agent=_agent_config(config["agent"] if config.has_section("agent") else None),
            epochs=sc.getint("epochs", 5000),
            packets_per_epoch=sc.getint("packets_per_epoch", PACKETS_PER_EPOCH),
            seed=sc.getint("seed", 0),
            ground_truth_info=sc.getboolean("ground_truth_info", False),
            summary_fraction=sc.getfloat("summary_fraction", 0.1),
            trace_transmissions=config.getboolean("output", "trace", fallback=False),
            trace_ledgers=config.getboolean("output", "ledgers", fallback=False),
        )
    except (ValueError, configparser.Error) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"invalid scenario: {e}") from None

    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(**kwargs)


def load(path, **overrides) -> ScenarioConfig:
    config = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fd:
            config.read_file(fd)
    except configparser.Error as e:
        raise ConfigError(f"could not parse {path}: {e}") from None
    return from_parser(config, **overrides)


def from_string(text, **overrides) -> ScenarioConfig:
    config = configparser.ConfigParser()
    try:
        config.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"could not parse scenario: {e}") from None
    return from_parser(config, **overrides)
