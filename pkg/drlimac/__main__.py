import argparse
import sys


def _parser():
    from .experiment import SUITES
    from .experiment.output import PLOT_KINDS

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, help="override the scenario seed")
    shared.add_argument("--epochs", type=int, help="override the number of epochs")
    shared.add_argument("--out-dir", help="directory for CSV and SVG files")
    shared.add_argument(
        "--trace", action="store_true", help="also write per-transmission and ledger CSVs"
    )
    shared.add_argument(
        "--ground-truth-info",
        action="store_true",
        help="feed learners the simulator's own throughputs instead of piggybacked ones",
    )
    shared.add_argument("--db", help="SQLite results store to save every run into")
    shared.add_argument(
        "--workers", type=int, default=0, help="worker processes, 0 runs inline (default)"
    )
    shared.add_argument("--log-level", help="overrides [logging] level of the config")

    parser = argparse.ArgumentParser(
        prog="python -m drlimac",
        description="Learned random access MAC simulator",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[shared], help="run a single scenario")
    run.add_argument("config")

    sweep = commands.add_parser("sweep", parents=[shared], help="offered load sweep")
    sweep.add_argument("config")
    sweep.add_argument("--grid", required=True, help="start:stop:step or a comma list")
    sweep.add_argument("--modes", default="aloha,drli")

    surface = commands.add_parser(
        "surface", parents=[shared], help="ALOHA throughput surface of the 4-node line"
    )
    surface.add_argument("config")
    surface.add_argument("--grid14", required=True, help="loads of nodes 1 and 4")
    surface.add_argument("--grid23", required=True, help="loads of nodes 2 and 3")

    degrade = commands.add_parser(
        "degrade", parents=[shared], help="throughput degradation against density"
    )
    degrade.add_argument("configs", nargs="+")
    degrade.add_argument("--grid", required=True)

    suite = commands.add_parser("suite", parents=[shared], help="run a predefined suite")
    suite.add_argument("name", choices=list(SUITES))

    plot = commands.add_parser("plot", parents=[shared], help="plot a written CSV file")
    plot.add_argument("csv")
    plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plot.add_argument("--output", help="SVG path, next to the CSV by default")

    export = commands.add_parser(
        "export", parents=[shared], help="dump a results store as CSV"
    )
    export.add_argument("database")

    return parser


def main(argv=None):
    from .app import App
    from .errors import DrliMacError

    args = _parser().parse_args(argv)
    try:
        written = App(args).run()
    except (DrliMacError, OSError) as e:
        print(f"fatal: {e.__class__.__name__} {e}", file=sys.stderr)
        exit(1)

    for path in written or ():
        print(path)


if __name__ == "__main__":
    main()
