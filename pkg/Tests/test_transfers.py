# Tests/test_transfers.py
import pytest

from Models.timetable import RawTrip, Stop, Timetable
from Models.transfers import Transfer, TransferSet
from Services.oracle import oracle_ea, oracle_profile
from Services.tb_query import tb_earliest_arrival, tb_profile
from Services.transfer_precompute import (
    ReductionRules,
    compute_initial_transfers,
    is_u_turn,
    reduce_transfers,
    reduction_breakdown,
    transfer_feasible,
)
from Services.verification import random_queries


def test_feasibility(f1):
    # t1 reaches B at 29400, change time 120, u1 leaves 29700
    assert transfer_feasible(f1, 0, 1, 2, 0)
    assert not transfer_feasible(f1, 1, 1, 2, 0)
    assert transfer_feasible(f1, 1, 1, 3, 0)


def test_initial_transfers(f1_initial):
    assert set(f1_initial) == {(0, 1, 2, 0), (0, 1, 3, 0), (1, 1, 3, 0)}
    # A has no arriving trips, so nothing boards line 0
    assert not any(t.to_trip in (0, 1) for t in f1_initial)


def test_reduced_transfers(f1_transfers):
    assert set(f1_transfers) == {(0, 1, 2, 0), (1, 1, 3, 0)}
    assert f1_transfers.initial_count == 3
    assert f1_transfers.removed_fraction == pytest.approx(1 / 3)


def test_rules_off_keeps_everything(f1, f1_initial):
    off = ReductionRules(same_line=False, earliest_per_line=False, u_turn=False, improvement=False)
    assert set(reduce_transfers(f1, f1_initial, off)) == set(f1_initial)


def test_rules_are_immutable():
    with pytest.raises(TypeError):
        ReductionRules().same_line = False


def test_transfer_set_lookups(f1_transfers):
    assert f1_transfers.outgoing(0, 1) == ((2, 0),)
    assert f1_transfers.outgoing(2, 1) == ()
    assert (0, 1, 2, 0) in f1_transfers
    assert Transfer(0, 1, 3, 0) not in f1_transfers
    smaller = f1_transfers.without((0, 1, 2, 0))
    assert list(smaller) == [Transfer(1, 1, 3, 0)]
    assert smaller.initial_count == 3
    assert len(TransferSet.empty()) == 0


def test_breakdown_reports_every_rule(f1, f1_initial):
    fractions = reduction_breakdown(f1, f1_initial)
    assert set(fractions) == {"same_line", "earliest_per_line", "u_turn", "improvement", "combined"}
    assert fractions["combined"] == pytest.approx(1 / 3)
    assert all(0.0 <= value <= 1.0 for value in fractions.values())


def test_parallel_matches_serial(synthetic_dataset):
    tt = synthetic_dataset.timetable
    serial = compute_initial_transfers(tt)
    assert compute_initial_transfers(tt, threads=2) == serial
    assert reduce_transfers(tt, serial, threads=2) == reduce_transfers(tt, serial)


def _out_and_back(change_time: int = 0) -> Timetable:
    """A -> B departing 100, then B -> A departing 300."""
    stops = [Stop(0, "A", change_time), Stop(1, "B")]
    trips = [
        RawTrip((0, 1), (100, 200), (100, 200), "out"),
        RawTrip((1, 0), (300, 400), (300, 400), "back"),
    ]
    return Timetable.from_raw(stops, [], trips)


def test_u_turn_is_removed():
    tt = _out_and_back()
    initial = compute_initial_transfers(tt)
    assert list(initial) == [Transfer(0, 1, 1, 0)]
    assert is_u_turn(tt, 0, 1, 1, 0)
    assert list(reduce_transfers(tt, initial)) == []
    only_u_turn = ReductionRules(same_line=False, earliest_per_line=False, improvement=False)
    assert list(reduce_transfers(tt, initial, only_u_turn)) == []
    assert list(reduce_transfers(tt, initial, ReductionRules(u_turn=False, improvement=False))) == [
        Transfer(0, 1, 1, 0)
    ]


def test_u_turn_needs_the_change_time_at_the_previous_stop():
    # Staying at A from 100 until 400 needs 301 s of change time
    tt = _out_and_back(change_time=301)
    assert not is_u_turn(tt, 0, 1, 1, 0)
    tt = _out_and_back(change_time=300)
    assert is_u_turn(tt, 0, 1, 1, 0)


def test_f1_has_no_u_turns(f1, f1_initial):
    assert not any(is_u_turn(f1, *t) for t in f1_initial)


def test_empty_input_gives_empty_output(f1):
    assert len(reduce_transfers(f1, TransferSet.empty())) == 0


RULE_SETS = {
    "same_line": ReductionRules(earliest_per_line=False, u_turn=False, improvement=False),
    "earliest_per_line": ReductionRules(same_line=False, u_turn=False, improvement=False),
    "u_turn": ReductionRules(same_line=False, earliest_per_line=False, improvement=False),
    "improvement": ReductionRules(same_line=False, earliest_per_line=False, u_turn=False),
    "combined": ReductionRules(),
}


@pytest.mark.parametrize("name", list(RULE_SETS))
def test_reduction_keeps_answers(synthetic_dataset, name):
    tt = synthetic_dataset.timetable
    initial = compute_initial_transfers(tt)
    reduced = reduce_transfers(tt, initial, RULE_SETS[name])
    assert set(reduced) <= set(initial)
    for src, dst, departure in random_queries(tt.num_stops, 40, seed=11):
        expected = oracle_ea(tt, src, dst, departure)
        assert tb_earliest_arrival(tt, initial, src, dst, departure) == expected
        assert tb_earliest_arrival(tt, reduced, src, dst, departure) == expected

    window = (0, tt.last_departure())
    for src, dst, _ in random_queries(tt.num_stops, 8, seed=12):
        expected = oracle_profile(tt, src, dst, *window)
        assert tb_profile(tt, initial, src, dst, *window) == expected
        assert tb_profile(tt, reduced, src, dst, *window) == expected


def test_combined_reduction_is_a_strict_subset(synthetic_dataset):
    tt = synthetic_dataset.timetable
    assert len(tt.lines) >= 2
    initial = compute_initial_transfers(tt)
    reduced = reduce_transfers(tt, initial)
    assert set(reduced) < set(initial)
    assert reduced.initial_count == len(initial)
