"""
Runs many scenarios, in parallel when asked to, and turns their results into
the sweep, surface and degradation tables.

Grid points are independent runs with their own derived seed; a single run is
always sequential. Results come back in grid order and are saved to the
results store one by one as they complete.
"""
import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .. import utils
from ..database import Database
from ..errors import ConfigError
from ..oracle import OracleReport, aloha_throughput
from ..scenario import ALOHA, ScenarioConfig
from ..simulation import RunResult, run_scenario
from ..topology import max_two_hop_degree, preset

# Relative spread of per-node throughputs under which a surface point is fair
FAIR_SPREAD = 0.05
# A topology sustains if S at twice its peak load keeps this share of the peak
SUSTAIN_RATIO = 0.85

_log = logging.getLogger(__name__)


class SweepPoint(NamedTuple):
    mode: str
    load: float
    throughputs: Tuple[float, ...]
    network_throughput: float
    collision_prob: float
    result: RunResult


class FairPoint(NamedTuple):
    g14: float
    g23: float
    throughput: float


@dataclass
class Surface:
    g14: List[float]
    g23: List[float]
    # `[i, k]` is the network throughput at `(g14[i], g23[k])`
    network: np.ndarray
    # `[i, k, node]`
    throughputs: np.ndarray

    def fair_mask(self, spread=FAIR_SPREAD) -> np.ndarray:
        return fair_mask(self.throughputs, spread)

    def fair_line(self, spread=FAIR_SPREAD) -> List[FairPoint]:
        mask = self.fair_mask(spread)
        return [
            FairPoint(self.g14[i], self.g23[k], float(self.throughputs[i, k].mean()))
            for i, k in zip(*np.nonzero(mask))
        ]

    def fair_maximum(self, spread=FAIR_SPREAD) -> Optional[FairPoint]:
        line = self.fair_line(spread)
        if not line:
            return None
        return max(line, key=lambda p: p.throughput)

    def rows(self):
        mask = self.fair_mask()
        for i, g14 in enumerate(self.g14):
            for k, g23 in enumerate(self.g23):
                yield (
                    g14,
                    g23,
                    float(self.network[i, k]),
                    *(float(s) for s in self.throughputs[i, k]),
                    int(mask[i, k]),
                )


class DegradationCurve(NamedTuple):
    name: str
    node_count: int
    max_two_hop_degree: int
    loads: Tuple[float, ...]
    network: Tuple[float, ...]
    collision_probs: Tuple[float, ...]
    sustaining: bool

    def rows(self):
        for g, s, pc in zip(self.loads, self.network, self.collision_probs):
            yield (
                self.name,
                self.node_count,
                self.max_two_hop_degree,
                g,
                s,
                pc,
                int(self.sustaining),
            )


def fair_mask(throughputs: np.ndarray, spread=FAIR_SPREAD) -> np.ndarray:
    """
    Points whose per-node throughputs (last axis) differ by at most ``spread``
    relative to their mean. Points where every node has zero throughput are
    never fair.
    """
    throughputs = np.asarray(throughputs, dtype=float)
    mean = throughputs.mean(axis=-1)
    width = throughputs.max(axis=-1) - throughputs.min(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(mean > 0, width / mean, np.inf)
    return relative <= spread


def is_sustaining(loads: Sequence[float], network: Sequence[float], ratio=SUSTAIN_RATIO) -> bool:
    # S at the grid point nearest twice the peak load against the peak itself
    loads = np.asarray(loads, dtype=float)
    network = np.asarray(network, dtype=float)
    peak = int(np.argmax(network))
    target = int(np.argmin(np.abs(loads - 2 * loads[peak])))
    return bool(network[target] >= ratio * network[peak])


def _is_line4(cfg: ScenarioConfig) -> bool:
    return cfg.topology == preset("line4")


def _mean_collision_prob(result: RunResult) -> float:
    values = [s.collision_prob for s in result.summary.values()]
    return sum(values) / len(values) if values else 0.0


def oracle_report(result: RunResult) -> Optional[OracleReport]:
    """
    Compare an ALOHA run on a complete graph with the unslotted ALOHA curve,
    `None` for any other run.
    """
    cfg = result.config
    topo = cfg.topology
    complete = all(topo.degree(n) == topo.node_count - 1 for n in topo.nodes)
    if cfg.mode != ALOHA or not complete:
        return None

    total = sum(s.load for s in result.summary.values())
    return OracleReport(
        quantity=f"{cfg.name} S at G={sum(cfg.loads):g}",
        analytic=aloha_throughput(total),
        simulated=result.network_throughput,
    )


class Runner:
    """
    Execute scenarios with up to ``workers`` processes, or inline in the event
    loop when ``workers`` is 0. Results are saved to ``db`` when given.
    """

    def __init__(self, *, workers=0, db: Optional[Database] = None):
        if workers < 0:
            raise ConfigError(f"workers must be non-negative, got {workers}")
        self._workers = workers
        self._db = db
        self._pool = None
        self._save_lock = None

    async def __aenter__(self):
        _log.info("entering runner with %d workers", self._workers)
        if self._workers:
            self._pool = ProcessPoolExecutor(max_workers=self._workers)
        self._save_lock = asyncio.Lock()
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        _log.info("exiting runner")
        if self._pool is not None:
            # Pending points of a failed sweep are dropped
            self._pool.shutdown(wait=exc_type is None, cancel_futures=exc_type is not None)
            self._pool = None

    async def run(self, cfg: ScenarioConfig) -> RunResult:
        if self._pool is None:
            result = run_scenario(cfg)
        else:
            loop = asyncio.get_running_loop()
            result = await loop.run_in_executor(self._pool, run_scenario, cfg)

        if self._db is not None:
            # One transaction at a time on the shared connection
            async with self._save_lock:
                await self._db.save_run(result)
        _log.info("completed %s: S = %.4f", cfg.name, result.network_throughput)
        return result

    async def run_all(self, cfgs: Sequence[ScenarioConfig]) -> List[RunResult]:
        return list(await asyncio.gather(*(self.run(cfg) for cfg in cfgs)))

    async def sweep_load(
        self,
        base: ScenarioConfig,
        grid: Sequence[float],
        *,
        modes: Optional[Sequence[str]] = None,
        nodes: Optional[Sequence[int]] = None,
    ) -> List[SweepPoint]:
        """
        One run per ``(mode, load)``. The grid load is given to ``nodes`` (every
        node by default) while the others keep their base load. Point ``k``
        uses the same derived seed in every mode so modes compare on equal
        traffic.
        """
        if not grid:
            raise ConfigError("load sweep needs at least one grid point")
        modes = tuple(modes or (base.mode,))
        nodes = tuple(base.topology.nodes if nodes is None else nodes)

        cfgs = []
        for mode in modes:
            for k, g in enumerate(grid):
                loads = list(base.loads)
                for n in nodes:
                    loads[n] = g
                cfgs.append(
                    base.with_loads(loads).replace(
                        mode=mode,
                        seed=utils.derive_seed(base.seed, k),
                        name=f"{base.name}-{mode}-g{g:g}",
                    )
                )

        results = await self.run_all(cfgs)
        return [
            SweepPoint(
                mode=r.config.mode,
                load=g,
                throughputs=tuple(s.throughput for s in r.summary.values()),
                network_throughput=r.network_throughput,
                collision_prob=_mean_collision_prob(r),
                result=r,
            )
            for r, g in zip(results, [g for _ in modes for g in grid])
        ]

    async def surface_sweep(
        self, cfg: ScenarioConfig, g14_grid: Sequence[float], g23_grid: Sequence[float]
    ) -> Surface:
        """
        ALOHA throughput of the 4-node line over ``g1 = g4`` and ``g2 = g3``.
        """
        if not _is_line4(cfg):
            raise ConfigError("the surface sweep needs the 4-node line topology")
        if not g14_grid or not g23_grid:
            raise ConfigError("surface sweep needs non-empty grids")

        points, cfgs = [], []
        for i, a in enumerate(g14_grid):
            for k, b in enumerate(g23_grid):
                if a == 0 and b == 0:
                    continue
                points.append((i, k))
                cfgs.append(
                    cfg.with_loads((a, b, b, a)).replace(
                        mode=ALOHA,
                        seed=utils.derive_seed(cfg.seed, i, k),
                        name=f"{cfg.name}-g14={a:g}-g23={b:g}",
                    )
                )

        network = np.zeros((len(g14_grid), len(g23_grid)))
        throughputs = np.zeros((len(g14_grid), len(g23_grid), 4))
        for (i, k), result in zip(points, await self.run_all(cfgs)):
            network[i, k] = result.network_throughput
            for n, s in result.summary.items():
                throughputs[i, k, n] = s.throughput

        return Surface(list(g14_grid), list(g23_grid), network, throughputs)

    async def degradation_study(
        self, cfgs: Sequence[ScenarioConfig], grid: Sequence[float]
    ) -> List[DegradationCurve]:
        """
        Learned load sweep per topology. A topology is sustaining when its
        network throughput at twice its peak load stays within 15% of the
        peak, degrading otherwise.
        """
        curves = []
        for cfg in cfgs:
            points = await self.sweep_load(cfg, grid)
            curve = DegradationCurve(
                name=cfg.topology_name if cfg.topology_name != "custom" else cfg.name,
                node_count=cfg.topology.node_count,
                max_two_hop_degree=max_two_hop_degree(cfg.topology),
                loads=tuple(grid),
                network=tuple(p.network_throughput for p in points),
                collision_probs=tuple(p.collision_prob for p in points),
                sustaining=is_sustaining(grid, [p.network_throughput for p in points]),
            )
            _log.info(
                "%s (max two-hop degree %d): %s",
                curve.name,
                curve.max_two_hop_degree,
                "sustaining" if curve.sustaining else "degrading",
            )
            curves.append(curve)
        return curves
