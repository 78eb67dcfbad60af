# Services/transfer_precompute.py
import logging
from typing import Dict, List, Tuple

from pydantic import BaseModel

from Models.timetable import INF, Timetable
from Models.transfers import TransferSet
from Services.workers import map_shared

logger = logging.getLogger(__name__)

Row = Tuple[int, int, int, int]


class ReductionRules(BaseModel):
    """
    Toggles for the transfer reduction rules.

    Attributes:
        same_line: Drop transfers replaceable by staying on the trip
        earliest_per_line: Keep only the earliest target per (line, index) and exit
        u_turn: Drop transfers whose target rides back to the stop just left
        improvement: Keep only transfers that improve an arrival or change time
    """
    same_line: bool = True
    earliest_per_line: bool = True
    u_turn: bool = True
    improvement: bool = True

    class Config:
        allow_mutation = False


def transfer_feasible(tt: Timetable, t1: int, e: int, t2: int, b: int) -> bool:
    """Can a passenger leave t1 at index e and board t2 at index b?"""
    source, target = tt.trips[t1], tt.trips[t2]
    here, there = source.stops[e], target.stops[b]
    arrival, departure = source.arrivals[e], target.departures[b]
    if here == there:
        return arrival + tt.min_change_time(here) <= departure
    walk = tt.footpath(here, there)
    return walk is not None and arrival + walk <= departure


def _initial_for_trip(tt: Timetable, trip_id: int) -> List[Row]:
    trip = tt.trips[trip_id]
    rows: List[Row] = []
    for e in range(1, len(trip.stops)):
        stop, arrival = trip.stops[e], trip.arrivals[e]
        reachable = [(stop, arrival + tt.min_change_time(stop))]
        reachable.extend((q, arrival + walk) for q, walk in tt.footpaths_from(stop))
        targets = set()
        for board_stop, ready in reachable:
            for line_id, j in tt.lines_at(board_stop):
                if j == tt.lines[line_id].last_index:
                    continue
                for u in tt.trips_from(line_id, j, ready):
                    if u == trip_id and j == e:
                        continue
                    targets.add((u, j))
        rows.extend((trip_id, e, u, j) for u, j in sorted(targets))
    return rows


def compute_initial_transfers(tt: Timetable, threads: int = 1) -> TransferSet:
    """Every feasible transfer t@e → u@b with e ≥ 1 and b before u's last stop."""
    chunks = map_shared(_initial_for_trip, tt, list(range(len(tt.trips))), threads)
    rows = [row for chunk in chunks for row in chunk]
    logger.info(f"Computed {len(rows)} initial transfers for {len(tt.trips)} trips")
    return TransferSet.from_transfers(rows)


def is_u_turn(tt: Timetable, t1: int, e: int, t2: int, b: int) -> bool:
    """
    t2's next stop is t1's previous one, and t2 can be caught there
    straight from t1, so the transfer t1@e → t2@b only loops back.
    """
    source, target = tt.trips[t1], tt.trips[t2]
    stop = source.stops[e - 1]
    if target.stops[b + 1] != stop:
        return False
    return source.arrivals[e - 1] + tt.min_change_time(stop) <= target.departures[b + 1]


def _improve(table: Dict[int, int], stop: int, value: int) -> bool:
    if value < table.get(stop, INF):
        table[stop] = value
        return True
    return False


def _reduce_trip(shared: Tuple[Timetable, TransferSet, ReductionRules], trip_id: int) -> List[Row]:
    tt, ts, rules = shared
    trip = tt.trips[trip_id]
    line, position = trip.line, tt.position(trip_id)
    arrival: Dict[int, int] = {}
    change: Dict[int, int] = {}
    kept: List[Row] = []

    for e in range(trip.last_index, 0, -1):
        stop, reached = trip.stops[e], trip.arrivals[e]
        _improve(arrival, stop, reached)
        _improve(change, stop, reached + tt.min_change_time(stop))
        for q, walk in tt.footpaths_from(stop):
            _improve(arrival, q, reached + walk)
            _improve(change, q, reached + walk)

        candidates = list(ts.outgoing(trip_id, e))
        if rules.same_line:
            candidates = [
                (u, j) for u, j in candidates
                if not (tt.trips[u].line == line and j >= e and tt.position(u) >= position)
            ]
        if rules.earliest_per_line:
            earliest: Dict[Tuple[int, int], Tuple[int, int]] = {}
            for u, j in candidates:
                key = (tt.trips[u].line, j)
                if key not in earliest or tt.position(u) < tt.position(earliest[key][0]):
                    earliest[key] = (u, j)
            candidates = list(earliest.values())
        if rules.u_turn:
            candidates = [(u, j) for u, j in candidates if not is_u_turn(tt, trip_id, e, u, j)]
        if not rules.improvement:
            kept.extend((trip_id, e, u, j) for u, j in candidates)
            continue

        candidates.sort(key=lambda c: (tt.trips[c[0]].arrivals[c[1] + 1], c[0], c[1]))
        for u, j in candidates:
            target = tt.trips[u]
            improved = False
            for k in range(j + 1, len(target.stops)):
                s, a = target.stops[k], target.arrivals[k]
                improved |= _improve(arrival, s, a)
                improved |= _improve(change, s, a + tt.min_change_time(s))
                for r, walk in tt.footpaths_from(s):
                    improved |= _improve(arrival, r, a + walk)
                    improved |= _improve(change, r, a + walk)
            if improved:
                kept.append((trip_id, e, u, j))
    return kept


def reduce_transfers(
    tt: Timetable,
    ts: TransferSet,
    rules: ReductionRules | None = None,
    threads: int = 1,
) -> TransferSet:
    """Drop transfers that no optimal journey needs; the result is a subset of ts."""
    rules = rules or ReductionRules()
    trips = sorted({int(t) for t in ts.from_trip})
    chunks = map_shared(_reduce_trip, (tt, ts, rules), trips, threads)
    reduced = TransferSet.from_transfers(
        [row for chunk in chunks for row in chunk], initial_count=ts.initial_count
    )
    logger.info(
        f"Reduced transfers {len(ts)} -> {len(reduced)} "
        f"({100 * (1 - len(reduced) / max(len(ts), 1)):.1f}% removed)"
    )
    return reduced


def reduction_breakdown(tt: Timetable, initial: TransferSet) -> Dict[str, float]:
    """Removed fraction per rule applied alone, and for all rules combined."""
    alone = ReductionRules(same_line=False, earliest_per_line=False, u_turn=False, improvement=False)
    variants = {
        "same_line": alone.copy(update={"same_line": True}),
        "earliest_per_line": alone.copy(update={"earliest_per_line": True}),
        "u_turn": alone.copy(update={"u_turn": True}),
        "improvement": alone.copy(update={"improvement": True}),
        "combined": ReductionRules(),
    }
    return {name: reduce_transfers(tt, initial, rules).removed_fraction for name, rules in variants.items()}
