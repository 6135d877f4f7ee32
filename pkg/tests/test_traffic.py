import math

import numpy as np
import pytest

from drlimac.errors import ConfigError
from drlimac.traffic import TrafficSource, next_interarrival, node_rng, pick_destination


def test_interarrival_mean():
    rng = node_rng(1, 0)
    draws = [next_interarrival(rng, 0.5) for _ in range(200_000)]
    assert np.mean(draws) == pytest.approx(2.0, rel=0.01)


def test_interarrival_variance():
    rng = node_rng(2, 0)
    draws = [next_interarrival(rng, 1.0) for _ in range(200_000)]
    assert np.var(draws) == pytest.approx(1.0, rel=0.02)


def test_zero_load_never_arrives():
    assert math.isinf(next_interarrival(node_rng(0, 0), 0.0))


def test_negative_load():
    with pytest.raises(ValueError):
        next_interarrival(node_rng(0, 0), -0.1)


def test_arrival_counts_are_poisson():
    # 1000 windows of length 100 at g = 0.5, so 50 expected arrivals per window
    rng = node_rng(3, 0)
    counts = []
    for _ in range(1000):
        t, count = next_interarrival(rng, 0.5), 0
        while t < 100:
            count += 1
            t += next_interarrival(rng, 0.5)
        counts.append(count)
    assert np.mean(counts) == pytest.approx(50, rel=0.02)
    assert np.var(counts) == pytest.approx(50, rel=0.2)


def test_single_neighbour_destination():
    rng = node_rng(0, 0)
    assert all(pick_destination(rng, (1,)) == 1 for _ in range(100))


def test_empty_neighbour_set():
    with pytest.raises(ConfigError):
        pick_destination(node_rng(0, 0), ())


@pytest.mark.parametrize("k", [1, 2, 3, 7, 11])
def test_destinations_are_uniform(k):
    rng = node_rng(k, 0)
    nbrs = tuple(range(10, 10 + k))
    draws = [pick_destination(rng, nbrs) for _ in range(20_000 * k)]
    values, counts = np.unique(draws, return_counts=True)
    assert tuple(values) == nbrs
    np.testing.assert_allclose(counts / len(draws), 1 / k, atol=0.01)


def test_per_neighbour_directed_load():
    # K = 3 neighbours at g = 0.6 gives 0.2 Erlang towards each one
    rng = node_rng(5, 0)
    horizon = 50_000.0
    t, sent = 0.0, {0: 0, 2: 0, 3: 0}
    while True:
        t += next_interarrival(rng, 0.6)
        if t >= horizon:
            break
        sent[pick_destination(rng, (0, 2, 3))] += 1
    for count in sent.values():
        assert count / horizon == pytest.approx(0.2, abs=0.01)


def test_streams_are_reproducible_and_independent():
    a = node_rng(42, 1).random(5)
    b = node_rng(42, 1).random(5)
    c = node_rng(42, 2).random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_source_schedule():
    src = TrafficSource(0, 1.0, ((100.0, 0.1), (200.0, 0.8)))
    assert src.ever_active()
    assert TrafficSource(1, 0.0, ((50.0, 0.3),)).ever_active()
    assert not TrafficSource(2, 0.0, ((50.0, 0.0),)).ever_active()


def test_source_validation():
    with pytest.raises(ConfigError):
        TrafficSource(0, -1.0)
    with pytest.raises(ConfigError):
        TrafficSource(0, 1.0, ((5.0, 0.1), (5.0, 0.2)))
    with pytest.raises(ConfigError):
        TrafficSource(0, 1.0, ((5.0, -0.1),))


def test_idle_source():
    assert not TrafficSource(0, 0.0).ever_active()
    assert TrafficSource(0, 0.0, ((10.0, 0.3),)).ever_active()
