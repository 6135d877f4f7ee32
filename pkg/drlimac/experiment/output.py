"""
CSV tables and SVG plots of a set of results.

Every plot is drawn from the CSV file that was just written, never from the
in-memory results, so plotting a saved CSV again gives the same SVG.
"""
import csv
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..errors import ConfigError, ValidationError  # noqa: E402
from ..simulation import EpochRow, RunResult  # noqa: E402
from .runner import DegradationCurve, Surface, SweepPoint, oracle_report  # noqa: E402

EPOCHS_HEADER = ("run", *EpochRow._fields)
NETWORK_HEADER = ("run", "epoch", "network_throughput")
SUMMARY_HEADER = (
    "run",
    "mode",
    "node",
    "load",
    "throughput",
    "collision_prob",
    "effective_load",
    "action",
    "network_throughput",
)
SWEEP_HEADER = ("mode", "load", "node", "throughput", "collision_prob", "network_throughput")
SURFACE_HEADER = ("g14", "g23", "network_throughput", "s1", "s2", "s3", "s4", "fair")
DEGRADATION_HEADER = (
    "topology",
    "nodes",
    "max_two_hop_degree",
    "load",
    "network_throughput",
    "collision_prob",
    "sustaining",
)
TRANSMISSIONS_HEADER = ("run", "time", "sender", "receiver", "outcome")
LEDGERS_HEADER = (
    "run",
    "time",
    "owner",
    "neighbor",
    "neighbor_throughput",
    "freshness",
    "reported_rate",
    "own_component",
)
ORACLE_HEADER = ("quantity", "analytic", "simulated", "relative_error")

PLOT_KINDS = ("load-throughput", "convergence", "surface", "degradation", "collision")

_SVG_SALT = "drlimac"

_log = logging.getLogger(__name__)


@dataclass
class ResultSet:
    runs: List[RunResult] = field(default_factory=list)
    sweep: List[SweepPoint] = field(default_factory=list)
    surface: Optional[Surface] = None
    degradation: List[DegradationCurve] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.runs or self.sweep or self.surface or self.degradation)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fd:
        writer = csv.writer(fd)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fd:
        reader = csv.DictReader(fd)
        rows = list(reader)
    if not rows:
        raise ValidationError(f"{path} has no rows to plot")
    return rows


def _save(fig, path):
    with plt.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    _log.info("wrote %s", path)
    return path


def _epoch_rows(runs):
    for r in runs:
        for row in r.rows:
            yield (r.config.name, *row)


def _network_rows(runs):
    for r in runs:
        for t, s in enumerate(r.network):
            yield r.config.name, t, s


def _summary_rows(runs):
    for r in runs:
        total = r.network_throughput
        for s in r.summary.values():
            yield (
                r.config.name,
                r.config.mode,
                s.node,
                s.load,
                s.throughput,
                s.collision_prob,
                s.effective_load,
                s.action,
                total,
            )


def _sweep_rows(points):
    for p in points:
        for node, s in sorted(p.result.summary.items()):
            yield p.mode, p.load, node, s.throughput, s.collision_prob, p.network_throughput


def emit_outputs(results: ResultSet, out_dir) -> List[str]:
    """
    Write the CSV tables and SVG plots of ``results`` into ``out_dir`` and
    return the paths written. An empty result set is an error.
    """
    if results.is_empty():
        raise ValidationError("no results to emit")
    os.makedirs(out_dir, exist_ok=True)

    def path(name):
        return os.path.join(out_dir, name)

    runs = list(results.runs) or [p.result for p in results.sweep]
    written = []
    if runs:
        written.append(_write_csv(path("epochs.csv"), EPOCHS_HEADER, _epoch_rows(runs)))
        written.append(_write_csv(path("network.csv"), NETWORK_HEADER, _network_rows(runs)))
        written.append(_write_csv(path("summary.csv"), SUMMARY_HEADER, _summary_rows(runs)))

        transmissions = [
            (r.config.name, *tx) for r in runs for tx in r.transmissions
        ]
        if transmissions:
            written.append(
                _write_csv(path("transmissions.csv"), TRANSMISSIONS_HEADER, transmissions)
            )
        ledgers = [(r.config.name, *row) for r in runs for row in r.ledgers]
        if ledgers:
            written.append(_write_csv(path("ledgers.csv"), LEDGERS_HEADER, ledgers))

        reports = [rep for rep in map(oracle_report, runs) if rep is not None]
        if reports:
            written.append(
                _write_csv(path("oracle.csv"), ORACLE_HEADER, (rep.row() for rep in reports))
            )

        if not results.sweep:
            written.append(
                plot_csv(path("epochs.csv"), "convergence", path("convergence.svg"))
            )

    if results.sweep:
        sweep_csv = _write_csv(path("sweep.csv"), SWEEP_HEADER, _sweep_rows(results.sweep))
        written.append(sweep_csv)
        written.append(plot_csv(sweep_csv, "load-throughput", path("load-throughput.svg")))

    if results.surface is not None:
        surface_csv = _write_csv(path("surface.csv"), SURFACE_HEADER, results.surface.rows())
        written.append(surface_csv)
        written.append(plot_csv(surface_csv, "surface", path("surface.svg")))

    if results.degradation:
        degradation_csv = _write_csv(
            path("degradation.csv"),
            DEGRADATION_HEADER,
            (row for curve in results.degradation for row in curve.rows()),
        )
        written.append(degradation_csv)
        written.append(plot_csv(degradation_csv, "degradation", path("degradation.svg")))
        written.append(plot_csv(degradation_csv, "collision", path("collision.svg")))

    _log.info("emitted %d files into %s", len(written), out_dir)
    return written


# Plotting


def _plot_load_throughput(rows, ax):
    by_mode = defaultdict(lambda: defaultdict(dict))
    for row in rows:
        by_mode[row["mode"]][float(row["load"])][int(row["node"])] = float(row["throughput"])

    for mode, points in sorted(by_mode.items()):
        loads = sorted(points)
        nodes = sorted({n for per_node in points.values() for n in per_node})
        ax.plot(
            loads,
            [sum(points[g].values()) for g in loads],
            marker="o",
            label=f"S ({mode})",
        )
        for n in nodes:
            ax.plot(
                loads,
                [points[g].get(n, np.nan) for g in loads],
                linestyle="--",
                linewidth=0.8,
                label=f"node {n + 1} ({mode})",
            )

    ax.set_xlabel("offered load per node g (Erlang)")
    ax.set_ylabel("throughput (Erlang)")
    ax.legend(fontsize="small")


def _plot_convergence(rows, axes):
    network = defaultdict(lambda: defaultdict(float))
    per_node = defaultdict(lambda: defaultdict(list))
    for row in rows:
        run, epoch, node = row["run"], int(row["epoch"]), int(row["node"])
        network[run][epoch] += float(row["throughput"])
        per_node[run, node]["epoch"].append(epoch)
        per_node[run, node]["throughput"].append(float(row["throughput"]))
        per_node[run, node]["action"].append(int(row["action"]))
        per_node[run, node]["effective_load"].append(float(row["effective_load"]))

    top, middle, bottom = axes
    for run, series in sorted(network.items()):
        epochs = sorted(series)
        top.plot(epochs, [series[t] for t in epochs], linewidth=0.8, label=f"S {run}")
    for (run, node), series in sorted(per_node.items()):
        label = f"node {node + 1}" if len(network) == 1 else f"{run} node {node + 1}"
        middle.plot(series["epoch"], series["action"], linewidth=0.5, label=label)
        bottom.plot(series["epoch"], series["effective_load"], linewidth=0.5, label=label)

    top.set_ylabel("network throughput S")
    middle.set_ylabel("action ID")
    bottom.set_ylabel("effective load g*")
    bottom.set_xlabel("epoch")
    for ax in axes:
        ax.legend(fontsize="x-small")


def _plot_surface(rows, ax):
    g14 = sorted({float(r["g14"]) for r in rows})
    g23 = sorted({float(r["g23"]) for r in rows})
    grid = np.full((len(g23), len(g14)), np.nan)
    fair_x, fair_y = [], []
    for r in rows:
        x, y = g14.index(float(r["g14"])), g23.index(float(r["g23"]))
        grid[y, x] = float(r["network_throughput"])
        if int(r["fair"]):
            fair_x.append(float(r["g14"]))
            fair_y.append(float(r["g23"]))

    mesh = ax.pcolormesh(g14, g23, grid, shading="nearest", cmap="viridis")
    ax.figure.colorbar(mesh, ax=ax, label="network throughput S")
    if fair_x:
        ax.scatter(fair_x, fair_y, color="red", marker="x", label="fair points")
        ax.legend(fontsize="small")
    ax.set_xlabel("g1 = g4 (Erlang)")
    ax.set_ylabel("g2 = g3 (Erlang)")


def _degradation_series(rows, column):
    # Ordered by max two-hop degree, then name
    curves = defaultdict(list)
    labels = {}
    for r in rows:
        key = (int(r["max_two_hop_degree"]), r["topology"])
        curves[key].append((float(r["load"]), float(r[column])))
        state = "sustaining" if int(r["sustaining"]) else "degrading"
        labels[key] = f"{key[1]}, {r['nodes']} nodes, degree {key[0]} ({state})"
    return [(labels[key], sorted(curves[key])) for key in sorted(curves)]


def _plot_degradation(rows, ax):
    for label, points in _degradation_series(rows, "network_throughput"):
        ax.plot(*zip(*points), marker="o", label=label)
    ax.set_xlabel("offered load per node g (Erlang)")
    ax.set_ylabel("network throughput S")
    ax.legend(fontsize="x-small")


def _plot_collision(rows, ax):
    for label, points in _degradation_series(rows, "collision_prob"):
        ax.plot(*zip(*points), marker="o", label=label)
    ax.set_xlabel("offered load per node g (Erlang)")
    ax.set_ylabel("collision probability")
    ax.legend(fontsize="x-small")


def plot_csv(csv_path, kind, svg_path=None) -> str:
    """
    Draw ``kind`` from a CSV file written by `emit_outputs` and return the
    SVG path (next to the CSV unless ``svg_path`` is given).
    """
    if kind not in PLOT_KINDS:
        raise ConfigError(f"unknown plot kind {kind!r}, expected one of {PLOT_KINDS}")
    rows = _read_csv(csv_path)
    if svg_path is None:
        svg_path = os.path.splitext(csv_path)[0] + f"-{kind}.svg"

    if kind == "convergence":
        fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
        _plot_convergence(rows, axes)
    else:
        fig, ax = plt.subplots(figsize=(8, 6))
        {
            "load-throughput": _plot_load_throughput,
            "surface": _plot_surface,
            "degradation": _plot_degradation,
            "collision": _plot_collision,
        }[kind](rows, ax)

    fig.tight_layout()
    return _save(fig, svg_path)
