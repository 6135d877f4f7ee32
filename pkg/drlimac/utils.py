import re
from typing import List, Tuple

import numpy as np

from .errors import ConfigError


def parse_grid(grid) -> List[float]:
    """
    Parse a load grid, either ``start:stop:step`` (stop included when it falls
    on the grid, within rounding) or a comma separated list of values.
    """
    if not grid or not grid.strip():
        raise ConfigError("empty grid")

    grid = grid.strip()
    try:
        if ":" in grid:
            start, stop, step = map(float, grid.split(":"))
            if step <= 0:
                raise ConfigError(f"grid step must be positive: {grid}")

            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 10) for i in range(max(count, 0))]
        else:
            values = [float(v) for v in grid.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid grid {grid}: {e}") from None

    if not values:
        raise ConfigError(f"grid {grid} has no points")
    return values


def parse_edges(text) -> List[Tuple[int, int]]:
    # "0-1, 1-2", "0-1 1-2" or one edge per line
    edges = []
    for token in re.split(r"[,\s]+", text.strip()):
        if not token:
            continue
        try:
            u, v = map(int, token.split("-"))
        except ValueError:
            raise ConfigError(f"invalid edge {token!r}, expected 'u-v'") from None
        edges.append((u, v))
    return edges


def derive_seed(seed, *keys) -> int:
    # Independent child seed per (seed, keys); adding keys never perturbs others
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
