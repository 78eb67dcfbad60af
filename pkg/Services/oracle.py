# Services/oracle.py
"""
Reference answers computed by brute force over the raw timetable.

Round k scans every trip once, boarding wherever the readiness left by
round k-1 allows, so after round k each stop holds the earliest arrival
using at most k trips. No transfer set, tree or query graph is consulted.
"""
import logging
from typing import List, Set, Tuple

import numpy as np

from Models.query import ArrivalTuple, ResultTuple
from Models.timetable import INF, Timetable
from Services.accel import njit
from Services.pareto import pareto_arrivals, pareto_profile
from Services.query_common import check_range, check_stop, destination_entries, source_entries

logger = logging.getLogger(__name__)


@njit(cache=True)
def scan_trips(offsets, stops, arrivals, departures, ready, shift, latest, out):
    """
    Ride every trip from its first boardable index and lower out[] with
    the arrivals seen afterwards. Boarding at flat position i needs
    departures[i] >= ready[stop] and departures[i] - shift[stop] <= latest.
    Returns True if any entry of out improved.
    """
    improved = False
    for t in range(offsets.shape[0] - 1):
        start = offsets[t]
        end = offsets[t + 1]
        boarded = False
        for i in range(start, end):
            s = stops[i]
            if boarded:
                if arrivals[i] < out[s]:
                    out[s] = arrivals[i]
                    improved = True
            elif i < end - 1 and departures[i] >= ready[s] and departures[i] - shift[s] <= latest:
                boarded = True
    return improved


def _rounds(tt: Timetable, src: int, dst: int, departure: int, latest: int) -> List[Tuple[int, int]]:
    """(arrival at dst, transfers) after each round that improved anything."""
    flat = tt.flat
    n = tt.num_stops
    ready = np.full(n, INF, dtype=np.int64)
    shift = np.zeros(n, dtype=np.int64)
    for stop, walk in source_entries(tt, src):
        ready[stop] = departure + walk
        shift[stop] = walk
    targets = destination_entries(tt, dst)
    target_stops = np.array(list(targets), dtype=np.int64)
    target_walks = np.array(list(targets.values()), dtype=np.int64)

    best = np.full(n, INF, dtype=np.int64)
    values: List[Tuple[int, int]] = []
    k = 1
    while scan_trips(flat.offsets, flat.stops, flat.arrivals, flat.departures, ready, shift, latest, best):
        value = int(np.min(best[target_stops] + target_walks))
        if value < INF:
            values.append((value, k - 1))
        walked = np.full(n, INF, dtype=np.int64)
        if flat.walk_from.size:
            np.minimum.at(walked, flat.walk_to, best[flat.walk_from] + flat.walk_duration)
        ready = np.minimum(best + flat.change_times, walked)
        shift = np.zeros(n, dtype=np.int64)
        latest = INF
        k += 1
    return values


def oracle_ea(tt: Timetable, src: int, dst: int, departure: int) -> Set[ArrivalTuple]:
    check_stop(tt, src)
    check_stop(tt, dst)
    if src == dst:
        return set()
    return pareto_arrivals(_rounds(tt, src, dst, departure, INF))


def effective_departures(tt: Timetable, src: int, edt: int, ldt: int) -> List[int]:
    """Distinct times of leaving src for a first boarding, latest first."""
    flat = tt.flat
    boardable = np.ones(flat.stops.size, dtype=bool)
    if flat.offsets.size > 1:
        boardable[flat.offsets[1:] - 1] = False
    times = set()
    for stop, walk in source_entries(tt, src):
        leave = flat.departures[boardable & (flat.stops == stop)] - walk
        times.update(int(d) for d in leave[(leave >= edt) & (leave <= ldt)])
    return sorted(times, reverse=True)


def oracle_profile(tt: Timetable, src: int, dst: int, edt: int, ldt: int) -> Set[ResultTuple]:
    check_stop(tt, src)
    check_stop(tt, dst)
    check_range(edt, ldt)
    if src == dst:
        return set()
    tagged = []
    for departure in effective_departures(tt, src, edt, ldt):
        tagged.extend((departure, a, n) for a, n in _rounds(tt, src, dst, departure, ldt))
    return pareto_profile(tagged)
