# Tests/test_oracle.py
from collections import deque

import pytest

from Models.timetable import DAY, Timetable
from Services.oracle import effective_departures, oracle_ea, oracle_profile
from Services.pareto import pareto_arrivals, pareto_profile
from Services.query_common import destination_entries, source_entries
from Services.synthetic import SyntheticSpec, generate_timetable
from Services.transfer_precompute import transfer_feasible
from Services.verification import random_queries
from Tests.conftest import A, B, C, D


def test_f1_values(f1):
    assert oracle_ea(f1, A, C, 28800) == {(30600, 1)}
    assert oracle_ea(f1, A, C, 30000) == {(34200, 1)}
    assert oracle_ea(f1, A, D, 28800) == {(30780, 1)}
    assert oracle_ea(f1, A, A, 28800) == set()
    assert oracle_profile(f1, A, C, 0, DAY) == {(28800, 30600, 1), (32400, 34200, 1)}
    assert oracle_profile(f1, A, D, 0, DAY) == {(28800, 30780, 1), (32400, 34380, 1)}
    assert oracle_profile(f1, A, B, 0, DAY) == {(28800, 29400, 0), (32400, 33000, 0)}


def test_effective_departures(f1):
    assert effective_departures(f1, A, 0, DAY) == [32400, 28800]
    assert effective_departures(f1, B, 0, 30000) == [29700]
    assert effective_departures(f1, C, 0, DAY) == []


def _enumerate(tt: Timetable, src: int, dst: int, departure: int, max_trips: int):
    """Every (arrival, transfers) of journeys with at most max_trips trips, by exhaustive search."""
    targets = destination_entries(tt, dst)
    boardings = [
        (u, b) for u, trip in enumerate(tt.trips) for b in range(len(trip.stops) - 1)
    ]
    start = set()
    for stop, walk in source_entries(tt, src):
        for u, b in boardings:
            if tt.trips[u].stops[b] == stop and tt.trips[u].departures[b] >= departure + walk:
                start.add((u, b, 0))
    seen = set(start)
    queue = deque(start)
    found = set()
    while queue:
        trip, board, n = queue.popleft()
        t = tt.trips[trip]
        for e in range(board + 1, len(t.stops)):
            if t.stops[e] in targets:
                found.add((t.arrivals[e] + targets[t.stops[e]], n))
            if n + 1 >= max_trips:
                continue
            for u, b in boardings:
                state = (u, b, n + 1)
                if state not in seen and (u, b) != (trip, e) and transfer_feasible(tt, trip, e, u, b):
                    seen.add(state)
                    queue.append(state)
    return found


@pytest.mark.parametrize("spec", [
    "kind=random,stops=10,lines=3,trips=3,seed=21",
    "kind=grid,stops=9,lines=4,trips=3,seed=22",
])
def test_oracle_matches_exhaustive_enumeration(spec):
    tt = generate_timetable(SyntheticSpec.from_string(spec))
    for src, dst, departure in random_queries(tt.num_stops, 25, seed=4):
        if src == dst:
            continue
        expected = {r for r in pareto_arrivals(_enumerate(tt, src, dst, departure, 4)) if r.transfers <= 2}
        actual = {r for r in oracle_ea(tt, src, dst, departure) if r.transfers <= 2}
        assert actual == expected


def test_profile_is_filtered_union_of_earliest_arrivals(synthetic_dataset):
    tt = synthetic_dataset.timetable
    for src, dst, _ in random_queries(tt.num_stops, 8, seed=9):
        if src == dst:
            continue
        tagged = [
            (d, a, n)
            for d in effective_departures(tt, src, 0, DAY)
            for a, n in oracle_ea(tt, src, dst, d)
        ]
        assert oracle_profile(tt, src, dst, 0, DAY) == pareto_profile(tagged)
