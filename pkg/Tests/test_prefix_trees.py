# Tests/test_prefix_trees.py
import pytest

from Models.timetable import DAY, Timetable
from Models.transfers import TransferSet
from Services.oracle import oracle_profile
from Services.prefix_tree_builder import (
    StopLabelFrontier,
    build_prefix_tree,
    build_prefix_trees,
    optimal_line_sequences,
)
from Services.preprocess import preprocess
from Services.query_common import destination_entries, source_entries
from Services.synthetic import SyntheticSpec, generate_timetable
from Services.transfer_precompute import compute_initial_transfers
from Services.verification import random_queries
from Tests.conftest import A, B, C, D


def test_f1_prefix_tree_of_a(f1, f1_transfers):
    tree = build_prefix_tree(f1, f1_transfers, A)
    assert [n.key for n in tree.nodes()] == [(0, 0), (1, 0)]
    first = tree.root.child(0, 0)
    second = first.child(1, 0)
    assert first.destinations == {B}
    assert second.destinations == {C, D}
    assert second.entry_exit == 1
    assert [n.key for n in second.path()] == [(0, 0), (1, 0)]


def test_f1_prefix_tree_of_b_and_bare_trees(f1, f1_transfers):
    tree = build_prefix_tree(f1, f1_transfers, B)
    assert [(n.key, n.destinations) for n in tree.nodes()] == [((1, 0), {C, D})]
    assert build_prefix_tree(f1, f1_transfers, C).is_bare()
    assert build_prefix_tree(f1, f1_transfers, D).is_bare()


def test_optimal_line_sequences(f1_dataset):
    ptree = f1_dataset.prefix_trees[A]
    assert optimal_line_sequences(ptree, C) == {((0, 0), (1, 0))}
    assert optimal_line_sequences(ptree, B) == {((0, 0),)}
    assert optimal_line_sequences(ptree, A) == set()


def test_frontier_keeps_pareto_labels():
    frontier = StopLabelFrontier()
    assert frontier.insert(5, 1000, 2)
    assert not frontier.insert(5, 1000, 2)
    assert not frontier.insert(5, 1100, 3)
    assert frontier.insert(5, 900, 3)
    assert frontier.insert(5, 800, 1)
    assert frontier.labels(5) == [(800, 1)]
    assert frontier.labels(6) == []


def test_parallel_build_matches_serial(synthetic_dataset):
    tt, ts = synthetic_dataset.timetable, synthetic_dataset.transfers
    trees, seconds = build_prefix_trees(tt, ts, threads=2)
    assert trees == synthetic_dataset.prefix_trees
    assert len(seconds) == tt.num_stops


def test_tree_annotations_match_reachability(synthetic_dataset):
    tt = synthetic_dataset.timetable
    for src, dst, _ in random_queries(tt.num_stops, 40, seed=3):
        if src == dst:
            continue
        reachable = bool(oracle_profile(tt, src, dst, 0, DAY))
        assert bool(optimal_line_sequences(synthetic_dataset.prefix_trees[src], dst)) == reachable


def _witnesses(tt: Timetable, ts: TransferSet, src: int, dst: int, journey) -> set:
    """(line, board) sequences of every journey leaving src at d and reaching dst at a on n + 1 trips."""
    departure, arrival, transfers = journey
    targets = destination_entries(tt, dst)
    found = set()

    def extend(trip_id, board, keys):
        trip = tt.trips[trip_id]
        keys = keys + ((trip.line, board),)
        for e in range(board + 1, len(trip.stops)):
            if trip.arrivals[e] > arrival:
                break
            stop = trip.stops[e]
            if len(keys) == transfers + 1 and stop in targets and trip.arrivals[e] + targets[stop] == arrival:
                found.add(keys)
            if len(keys) <= transfers:
                for u, b in ts.outgoing(trip_id, e):
                    extend(u, b, keys)

    for stop, walk in source_entries(tt, src):
        for trip_id, trip in enumerate(tt.trips):
            for b in range(len(trip.stops) - 1):
                if trip.stops[b] == stop and trip.departures[b] - walk == departure:
                    extend(trip_id, b, ())
    return found


@pytest.mark.parametrize("text", [
    "kind=random,stops=10,lines=3,trips=3,seed=21",
    "kind=grid,stops=9,lines=4,trips=3,seed=22",
    "kind=hub,stops=12,lines=4,trips=3,seed=23",
])
def test_every_optimal_journey_follows_an_annotated_path(text):
    tt = generate_timetable(SyntheticSpec.from_string(text))
    dataset, _ = preprocess(tt)
    initial = compute_initial_transfers(tt)
    checked = 0
    for src, dst, _ in random_queries(tt.num_stops, 200, seed=4):
        if src == dst:
            continue
        annotated = optimal_line_sequences(dataset.prefix_trees[src], dst)
        for journey in oracle_profile(tt, src, dst, 0, tt.last_departure()):
            assert _witnesses(tt, initial, src, dst, journey) & annotated, (src, dst, journey)
            checked += 1
    assert checked > 0
