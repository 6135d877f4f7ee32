import csv
import functools
import logging
import os
import sqlite3
from collections import namedtuple

import aiosqlite

from .simulation import RunResult

DB_VERSION = 1
Version = namedtuple("Version", "version")
Run = namedtuple("Run", "run_id name mode seed config_json")
EpochRow = namedtuple(
    "EpochRow",
    "run_id epoch node generated transmitted collided delivered duration "
    "collision_prob throughput observed_throughput offered_load effective_load "
    "state action probability reward epsilon fairness",
)
Network = namedtuple("Network", "run_id epoch network_throughput")
Summary = namedtuple(
    "Summary",
    "run_id mode node load throughput collision_prob effective_load action network_throughput",
)

# `(file name, table, columns, order)`; the `run` column holds the run name
EXPORTS = (
    ("epochs.csv", EpochRow, EpochRow._fields[1:], "run_id, epoch, node"),
    ("network.csv", Network, Network._fields[1:], "run_id, epoch"),
    ("summary.csv", Summary, Summary._fields[1:], "run_id, node"),
)

_log = logging.getLogger(__name__)


def _transaction(func):
    @functools.wraps(func)
    async def wrapped(self, *args, **kwargs):
        if "cursor" in kwargs:
            # Already in a transaction
            return await func(self, *args, **kwargs)

        async with self._db.execute("BEGIN") as cursor:
            try:
                ret = await func(self, *args, cursor=cursor, **kwargs)
            except sqlite3.Error:
                await cursor.execute("ROLLBACK")
                raise
            else:
                await cursor.execute("COMMIT")
            return ret

    return wrapped


class Select:
    def __init__(self, db: aiosqlite.Connection, table: type, query: str, args: tuple):
        if query.count("?") != len(args):
            raise ValueError("query parameters count mismatch with arguments")

        self._db = db
        self._table = table
        self._query = query
        self._args = args
        self._cursor = None

    async def one(self):
        tup = await self._cursor.fetchone()
        if tup:
            return self._table(*tup)

    async def all(self):
        result = []
        async for item in self:
            result.append(item)
        return result

    def __aiter__(self):
        return self

    async def __anext__(self):
        tup = await self._cursor.fetchone()
        if tup is None:
            raise StopAsyncIteration
        return self._table(*tup)

    async def __aenter__(self):
        self._cursor = await self._db.execute(
            f"SELECT * FROM {self._table.__name__} {self._query}", self._args
        )
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        await self._cursor.close()


class Database:
    """
    Results store. Every finished run is saved in its own transaction, so an
    interrupted sweep keeps the points that completed.
    """

    # Setup

    def __init__(self, path):
        self._path = path
        self._db = aiosqlite.connect(path, isolation_level=None)

    async def __aenter__(self):
        await self._db
        await self._db.execute("PRAGMA foreign_keys = ON;")

        try:
            tup = await self._select_one(Version)
        except sqlite3.OperationalError:
            await self._create_tables()
        else:
            if tup.version != DB_VERSION:
                await self._upgrade_tables()

        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        await self._db.close()

    @_transaction
    async def _create_tables(self, cursor=None):
        await cursor.execute(
            """CREATE TABLE Version (
            version INTEGER,
            PRIMARY KEY(version)
        ) WITHOUT ROWID"""
        )
        await cursor.execute(
            """CREATE TABLE Run (
            run_id INTEGER PRIMARY KEY,
            name TEXT NOT NULL,
            mode TEXT NOT NULL,
            seed INTEGER NOT NULL,
            config_json TEXT NOT NULL
        )"""
        )
        await cursor.execute(
            """CREATE TABLE EpochRow (
            run_id INTEGER,
            epoch INTEGER,
            node INTEGER,
            generated INTEGER NOT NULL,
            transmitted INTEGER NOT NULL,
            collided INTEGER NOT NULL,
            delivered INTEGER NOT NULL,
            duration REAL NOT NULL,
            collision_prob REAL NOT NULL,
            throughput REAL NOT NULL,
            observed_throughput REAL NOT NULL,
            offered_load REAL NOT NULL,
            effective_load REAL NOT NULL,
            state INTEGER NOT NULL,
            action INTEGER NOT NULL,
            probability REAL NOT NULL,
            reward REAL NOT NULL,
            epsilon REAL NOT NULL,
            fairness REAL NOT NULL,
            FOREIGN KEY(run_id) REFERENCES Run(run_id) ON DELETE CASCADE,
            PRIMARY KEY(run_id, epoch, node)
        ) WITHOUT ROWID"""
        )
        await cursor.execute(
            """CREATE TABLE Network (
            run_id INTEGER,
            epoch INTEGER,
            network_throughput REAL NOT NULL,
            FOREIGN KEY(run_id) REFERENCES Run(run_id) ON DELETE CASCADE,
            PRIMARY KEY(run_id, epoch)
        ) WITHOUT ROWID"""
        )
        await cursor.execute(
            """CREATE TABLE Summary (
            run_id INTEGER,
            mode TEXT NOT NULL,
            node INTEGER,
            load REAL NOT NULL,
            throughput REAL NOT NULL,
            collision_prob REAL NOT NULL,
            effective_load REAL NOT NULL,
            action INTEGER NOT NULL,
            network_throughput REAL NOT NULL,
            FOREIGN KEY(run_id) REFERENCES Run(run_id) ON DELETE CASCADE,
            PRIMARY KEY(run_id, node)
        ) WITHOUT ROWID"""
        )
        await cursor.execute("INSERT INTO Version VALUES (?)", (DB_VERSION,))

    @_transaction
    async def _upgrade_tables(self, cursor=None):
        pass

    # Convenience

    def _select(self, table: type, query: str = "", *args) -> Select:
        return Select(self._db, table, query, args)

    async def _select_one(self, table: type, query: str = "", *args):
        async with Select(self._db, table, query, args) as select:
            return await select.one()

    async def _select_all(self, table: type, query: str = "", *args):
        async with Select(self._db, table, query, args) as select:
            return await select.all()

    @_transaction
    async def _insert(self, *tuples, cursor=None):
        for tup in tuples:
            fields = ",".join("?" * len(tup))
            await cursor.execute(
                f"INSERT INTO {tup.__class__.__name__} VALUES ({fields})", tup
            )

    # Public methods

    @_transaction
    async def save_run(self, result: RunResult, *, cursor=None) -> int:
        cfg = result.config
        await cursor.execute(
            "INSERT INTO Run (name, mode, seed, config_json) VALUES (?, ?, ?, ?)",
            (cfg.name, cfg.mode, cfg.seed, cfg.to_json()),
        )
        run_id = cursor.lastrowid

        await self._insert(
            *(EpochRow(run_id, *row) for row in result.rows), cursor=cursor
        )
        await self._insert(
            *(Network(run_id, t, s) for t, s in enumerate(result.network)),
            cursor=cursor,
        )
        total = result.network_throughput
        await self._insert(
            *(
                Summary(
                    run_id=run_id,
                    mode=cfg.mode,
                    node=s.node,
                    load=s.load,
                    throughput=s.throughput,
                    collision_prob=s.collision_prob,
                    effective_load=s.effective_load,
                    action=s.action,
                    network_throughput=total,
                )
                for s in result.summary.values()
            ),
            cursor=cursor,
        )
        _log.info("saved run %d (%s) with %d epoch rows", run_id, cfg.name, len(result.rows))
        return run_id

    async def get_runs(self):
        return await self._select_all(Run, "ORDER BY run_id ASC")

    async def get_summary(self, run_id):
        return await self._select_all(Summary, "WHERE run_id = ? ORDER BY node ASC", run_id)

    async def get_network(self, run_id):
        return [
            row.network_throughput
            for row in await self._select_all(
                Network, "WHERE run_id = ? ORDER BY epoch ASC", run_id
            )
        ]

    async def export_csv(self, out_dir):
        """
        Write ``epochs.csv``, ``network.csv`` and ``summary.csv`` with every
        stored run into ``out_dir`` and return the written paths.
        """
        os.makedirs(out_dir, exist_ok=True)
        names = {run.run_id: run.name for run in await self.get_runs()}

        written = []
        for filename, table, fields, order in EXPORTS:
            path = os.path.join(out_dir, filename)
            with open(path, "w", newline="", encoding="utf-8") as fd:
                writer = csv.writer(fd)
                writer.writerow(("run", *fields))
                async with self._select(table, f"ORDER BY {order}") as select:
                    async for row in select:
                        writer.writerow(
                            (names[row.run_id], *(getattr(row, f) for f in fields))
                        )
            written.append(path)

        _log.info("exported %d runs into %s", len(names), out_dir)
        return written
