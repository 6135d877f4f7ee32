import asyncio
import configparser
import contextlib
import logging
import os
import sys

from . import helpers, scenario, utils
from .database import Database
from .errors import ConfigError
from .experiment import SUITES, ResultSet, Runner, SuiteSettings, emit_outputs, plot_csv
from .scenario import ScenarioConfig

_log = logging.getLogger(__name__)


def read_config(config_path) -> configparser.ConfigParser:
    # Open and read config
    try:
        with open(config_path, encoding="utf-8") as fd:
            config_str = fd.read()
            if not config_str or config_str.isspace():
                print(
                    f"fatal: config file {config_path} is empty, "
                    f"please copy and modify the template",
                    file=sys.stderr,
                )
                exit(1)
    except OSError as e:
        print(
            f"fatal: could not open config file {config_path}:\n"
            f"       {e.__class__.__name__} {e}".strip(),
            file=sys.stderr,
        )
        exit(1)

    # Parse config
    try:
        config = configparser.ConfigParser()
        config.read_string(config_str, source=config_path)
    except configparser.Error as e:
        print(
            f"fatal: could not load config file {config_path}:\n"
            f"       {e.__class__.__name__} {e}".strip(),
            file=sys.stderr,
        )
        exit(1)

    return config


def setup_logging(config=None, level=None):
    section = config["logging"] if config is not None and config.has_section("logging") else {}
    logging.basicConfig(
        level=helpers.get_log_level(level or section.get("level") or "WARNING"),
        filename=section.get("file") or None,
        format="[%(levelname) 5s/%(asctime)s] %(name)s: %(message)s",
    )

    if config is not None and config.has_section("logging.levels"):
        for option, value in config.items("logging.levels"):
            logging.getLogger(option).setLevel(level=helpers.get_log_level(value))

    # Font lookups are noisy at INFO
    logging.getLogger("matplotlib").setLevel(
        max(logging.getLogger("matplotlib").getEffectiveLevel(), logging.WARNING)
    )


class App:
    """
    One command-line invocation. Scenario files given on the command line are
    read up front, so that a bad file fails before any run starts.
    """

    def __init__(self, args):
        self._args = args
        paths = list(getattr(args, "configs", None) or [])
        if getattr(args, "config", None):
            paths.insert(0, args.config)

        self._configs = [(path, read_config(path)) for path in paths]
        setup_logging(self._configs[0][1] if self._configs else None, args.log_level)

    def _overrides(self):
        args = self._args
        return dict(
            seed=args.seed,
            epochs=args.epochs,
            ground_truth_info=True if args.ground_truth_info else None,
            trace_transmissions=True if args.trace else None,
            trace_ledgers=True if args.trace else None,
        )

    def _scenarios(self):
        return [scenario.from_parser(config, **self._overrides()) for _, config in self._configs]

    def _out_dir(self, cfg: ScenarioConfig = None):
        if self._args.out_dir:
            return self._args.out_dir
        return os.path.join("results", cfg.name if cfg else self._args.command)

    def run(self):
        try:
            return asyncio.run(getattr(self, f"_{self._args.command}")())
        except KeyboardInterrupt:
            _log.warning("interrupted, completed runs are kept in the results store")
            return None

    @contextlib.asynccontextmanager
    async def _runner(self):
        async with contextlib.AsyncExitStack() as stack:
            db = None
            if self._args.db:
                db = await stack.enter_async_context(Database(self._args.db))
            yield await stack.enter_async_context(
                Runner(workers=self._args.workers, db=db)
            )

    # Commands

    async def _run(self):
        (cfg,) = self._scenarios()
        async with self._runner() as runner:
            result = await runner.run(cfg)
        return emit_outputs(ResultSet(runs=[result]), self._out_dir(cfg))

    async def _sweep(self):
        (cfg,) = self._scenarios()
        grid = utils.parse_grid(self._args.grid)
        modes = [m.strip().lower() for m in self._args.modes.split(",") if m.strip()]
        async with self._runner() as runner:
            points = await runner.sweep_load(cfg, grid, modes=modes)
        return emit_outputs(ResultSet(sweep=points), self._out_dir(cfg))

    async def _surface(self):
        (cfg,) = self._scenarios()
        async with self._runner() as runner:
            surface = await runner.surface_sweep(
                cfg, utils.parse_grid(self._args.grid14), utils.parse_grid(self._args.grid23)
            )
        best = surface.fair_maximum()
        if best is not None:
            _log.info(
                "fair line maximum s = %.4f at g1 = g4 = %g, g2 = g3 = %g",
                best.throughput,
                best.g14,
                best.g23,
            )
        return emit_outputs(ResultSet(surface=surface), self._out_dir(cfg))

    async def _degrade(self):
        cfgs = self._scenarios()
        async with self._runner() as runner:
            curves = await runner.degradation_study(cfgs, utils.parse_grid(self._args.grid))
        return emit_outputs(ResultSet(degradation=curves), self._out_dir())

    async def _suite(self):
        suite = SUITES[self._args.name]
        settings = SuiteSettings(
            seed=self._args.seed or 0,
            epochs=self._args.epochs,
            ground_truth_info=bool(self._args.ground_truth_info),
        )
        async with self._runner() as runner:
            return await suite.run(runner, self._args.out_dir or "results", settings)

    async def _plot(self):
        return [plot_csv(self._args.csv, self._args.kind, self._args.output)]

    async def _export(self):
        if not os.path.isfile(self._args.database):
            raise ConfigError(f"no results store at {self._args.database}")
        async with Database(self._args.database) as db:
            return await db.export_csv(self._out_dir())

