# Services/query_common.py
from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Tuple

import numpy as np

from Models.errors import InvalidRangeError, UnknownStopError
from Models.timetable import INF, Timetable


def check_stop(tt: Timetable, stop: int) -> None:
    if not isinstance(stop, (int, np.integer)) or not tt.has_stop(int(stop)):
        raise UnknownStopError(stop)


def check_range(edt: int, ldt: int) -> None:
    if edt > ldt:
        raise InvalidRangeError(f"inverted departure range: {edt} > {ldt}")


def source_entries(tt: Timetable, src: int) -> List[Tuple[int, int]]:
    """Stops a journey can start boarding at, with the walk needed from src."""
    return [(src, 0)] + [(q, w) for q, w in tt.footpaths_from(src) if q != src]


def destination_entries(tt: Timetable, dst: int) -> Dict[int, int]:
    """Stops a journey can finish its last trip at, with the walk still needed."""
    entries = {q: w for q, w in tt.footpaths_to(dst) if q != dst}
    entries[dst] = 0
    return entries


class DestinationIndex:
    """Arrival at one destination from any trip, via the trip's tail."""

    def __init__(self, tt: Timetable, dst: int):
        self._tt = tt
        self._entries = destination_entries(tt, dst)
        self._by_line: Dict[int, Tuple[Tuple[int, int], ...]] = {}

    def _line(self, line: int) -> Tuple[Tuple[int, int], ...]:
        cached = self._by_line.get(line)
        if cached is None:
            stops = self._tt.lines[line].stops
            cached = tuple((i, self._entries[s]) for i, s in enumerate(stops) if s in self._entries)
            self._by_line[line] = cached
        return cached

    def arrival(self, trip: int, board: int) -> int:
        """Earliest arrival at the destination after boarding trip at board, INF if none."""
        t = self._tt.trips[trip]
        best = INF
        for i, walk in self._line(t.line):
            if i > board and t.arrivals[i] + walk < best:
                best = t.arrivals[i] + walk
        return best


class ReachedIndex:
    """
    Per transfer level, the smallest index each trip has been boarded at.

    Marking (n, t, i) lowers the entry of t and of every later trip of its
    line, on level n and all higher levels. Unreached trips hold their last
    index.
    """

    def __init__(self, tt: Timetable):
        self._tt = tt
        self._slots = tt.line_slots
        self._unreached = np.concatenate(
            [np.full(len(line.trips), line.last_index, dtype=np.int64) for line in tt.lines]
        ) if tt.lines else np.zeros(0, dtype=np.int64)
        self._levels: List[np.ndarray] = []

    def _level(self, n: int) -> np.ndarray:
        while len(self._levels) <= n:
            base = self._levels[-1] if self._levels else self._unreached
            self._levels.append(base.copy())
        return self._levels[n]

    def get(self, n: int, trip: int) -> int:
        return int(self._level(n)[self._tt.slot(trip)])

    def mark(self, n: int, trip: int, index: int) -> None:
        self._level(n)
        start = self._tt.slot(trip)
        end = int(self._slots[self._tt.trips[trip].line + 1])
        for level in self._levels[n:]:
            window = level[start:end]
            np.minimum(window, index, out=window)

    @property
    def depth(self) -> int:
        return len(self._levels)


class BestArrivals:
    """Best destination arrival found per transfer count."""

    def __init__(self):
        self._exact: List[int] = []

    def at(self, n: int) -> int:
        """Best arrival using at most n transfers."""
        return min(self._exact[: n + 1], default=INF)

    def record(self, arrival: int, n: int) -> bool:
        if arrival >= self.at(n):
            return False
        while len(self._exact) <= n:
            self._exact.append(INF)
        self._exact[n] = arrival
        return True


def earliest_seeds(tt: Timetable, src: int, departure: int) -> List[Tuple[int, int]]:
    """Earliest boardable trip per (line, index) around src, as (trip, index)."""
    seeds = set()
    for stop, walk in source_entries(tt, src):
        for line_id, j in tt.lines_at(stop):
            if j == tt.lines[line_id].last_index:
                continue
            trip = tt.earliest_trip(line_id, j, departure + walk)
            if trip is not None:
                seeds.add((trip, j))
    return sorted(seeds)


def boardable_seeds(tt: Timetable, src: int, departure: int) -> List[Tuple[int, int, int]]:
    """Every boardable (trip, index) around src with its departure time at the stop."""
    seeds = set()
    for stop, walk in source_entries(tt, src):
        for line_id, j in tt.lines_at(stop):
            if j == tt.lines[line_id].last_index:
                continue
            for trip in tt.trips_from(line_id, j, departure + walk):
                seeds.add((tt.trips[trip].departures[j], trip, j))
    return sorted(seeds)


def departure_groups(
    tt: Timetable, src: int, edt: int = 0, ldt: int = INF
) -> Dict[int, List[Tuple[int, int]]]:
    """
    Map each distinct departure from src in [edt, ldt] to the (trip, index)
    boardings leaving src exactly then. Keys iterate latest first.
    """
    groups: Dict[int, set] = defaultdict(set)
    for stop, walk in source_entries(tt, src):
        for line_id, j in tt.lines_at(stop):
            line = tt.lines[line_id]
            if j == line.last_index:
                continue
            leave = tt.line_departures(line_id)[:, j] - walk
            for p in np.flatnonzero((leave >= edt) & (leave <= ldt)):
                groups[int(leave[p])].add((line.trips[int(p)], j))
    return {d: sorted(groups[d]) for d in sorted(groups, reverse=True)}


def last_departure_from(tt: Timetable, src: int) -> int:
    groups = departure_groups(tt, src)
    return next(iter(groups), -1)
