# Models/timetable.py
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

DAY = 86400
INF = 2**62  # "unreachable" for int64 time arrays


@dataclass(frozen=True)
class Stop:
    id: int
    name: str = ""
    min_change_time: int = 0


@dataclass(frozen=True)
class Footpath:
    """Directed walking link; absent pairs mean walking is impossible."""
    from_stop: int
    to_stop: int
    duration: int


@dataclass(frozen=True)
class RawTrip:
    stops: Tuple[int, ...]
    arrivals: Tuple[int, ...]
    departures: Tuple[int, ...]
    name: str = ""


@dataclass(frozen=True)
class Trip:
    id: int
    line: int
    stops: Tuple[int, ...]
    arrivals: Tuple[int, ...]
    departures: Tuple[int, ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.stops)

    @property
    def last_index(self) -> int:
        return len(self.stops) - 1

    def precedes(self, other: "Trip | RawTrip") -> bool:
        """t ⪯ u: never arrives later than u at any index."""
        return all(a <= b for a, b in zip(self.arrivals, other.arrivals))


@dataclass(frozen=True)
class Line:
    id: int
    stops: Tuple[int, ...]
    trips: Tuple[int, ...]

    @property
    def last_index(self) -> int:
        return len(self.stops) - 1


class Timetable:
    """
    Immutable, aperiodic timetable.

    Trip ids are dense and line ids follow build order. Derived indexes
    (footpath maps, per-line time matrices, flat arrays) are computed on
    first use, so an inconsistent timetable can still be constructed and
    handed to validation.
    """

    def __init__(
        self,
        stops: Sequence[Stop],
        footpaths: Iterable[Footpath],
        trips: Sequence[Trip],
        lines: Sequence[Line],
        num_days: int = 1,
    ):
        self.stops: Tuple[Stop, ...] = tuple(stops)
        self.footpaths: Tuple[Footpath, ...] = tuple(
            sorted(footpaths, key=lambda f: (f.from_stop, f.to_stop))
        )
        self.trips: Tuple[Trip, ...] = tuple(trips)
        self.lines: Tuple[Line, ...] = tuple(lines)
        self.num_days = num_days

    @classmethod
    def from_raw(
        cls,
        stops: Sequence[Stop],
        footpaths: Iterable[Footpath],
        raw_trips: Sequence[RawTrip],
        num_days: int = 1,
    ) -> "Timetable":
        from Services.line_builder import build_lines

        lines = build_lines(raw_trips)
        line_of: Dict[int, int] = {}
        for line in lines:
            for trip_id in line.trips:
                line_of[trip_id] = line.id
        trips = [
            Trip(i, line_of[i], tuple(r.stops), tuple(r.arrivals), tuple(r.departures), r.name)
            for i, r in enumerate(raw_trips)
        ]
        return cls(stops, footpaths, trips, lines, num_days)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Timetable):
            return NotImplemented
        return (
            self.stops == other.stops
            and self.footpaths == other.footpaths
            and self.trips == other.trips
            and self.lines == other.lines
            and self.num_days == other.num_days
        )

    def __repr__(self) -> str:
        return (
            f"<Timetable stops={len(self.stops)} trips={len(self.trips)} "
            f"lines={len(self.lines)} footpaths={len(self.footpaths)} days={self.num_days}>"
        )

    @property
    def num_stops(self) -> int:
        return len(self.stops)

    def has_stop(self, stop: int) -> bool:
        return 0 <= stop < len(self.stops)

    def min_change_time(self, stop: int) -> int:
        return self.stops[stop].min_change_time

    # Footpaths

    @cached_property
    def _walk(self) -> Dict[Tuple[int, int], int]:
        return {(f.from_stop, f.to_stop): f.duration for f in self.footpaths}

    @cached_property
    def _walk_out(self) -> Dict[int, Tuple[Tuple[int, int], ...]]:
        out: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
        for f in self.footpaths:
            out[f.from_stop].append((f.to_stop, f.duration))
        return {s: tuple(v) for s, v in out.items()}

    @cached_property
    def _walk_in(self) -> Dict[int, Tuple[Tuple[int, int], ...]]:
        into: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
        for f in self.footpaths:
            into[f.to_stop].append((f.from_stop, f.duration))
        return {s: tuple(sorted(v)) for s, v in into.items()}

    def footpath(self, a: int, b: int) -> int | None:
        return self._walk.get((a, b))

    def footpaths_from(self, stop: int) -> Tuple[Tuple[int, int], ...]:
        return self._walk_out.get(stop, ())

    def footpaths_to(self, stop: int) -> Tuple[Tuple[int, int], ...]:
        return self._walk_in.get(stop, ())

    # Lines

    def line_of(self, trip: int) -> Line:
        return self.lines[self.trips[trip].line]

    @cached_property
    def _positions(self) -> Tuple[int, ...]:
        pos = [0] * len(self.trips)
        for line in self.lines:
            for p, trip_id in enumerate(line.trips):
                pos[trip_id] = p
        return tuple(pos)

    def position(self, trip: int) -> int:
        """Rank of the trip inside its line's total order."""
        return self._positions[trip]

    @cached_property
    def line_slots(self) -> np.ndarray:
        """Offset of each line in a line-major enumeration of all trips."""
        sizes = np.array([len(line.trips) for line in self.lines], dtype=np.int64)
        return np.concatenate(([0], np.cumsum(sizes))).astype(np.int64)

    def slot(self, trip: int) -> int:
        return int(self.line_slots[self.trips[trip].line]) + self._positions[trip]

    @cached_property
    def _stop_lines(self) -> Dict[int, Tuple[Tuple[int, int], ...]]:
        at: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
        for line in self.lines:
            for i, stop in enumerate(line.stops):
                at[stop].append((line.id, i))
        return {s: tuple(v) for s, v in at.items()}

    def lines_at(self, stop: int) -> Tuple[Tuple[int, int], ...]:
        """(line, index) pairs serving the stop, ordered by line then index."""
        return self._stop_lines.get(stop, ())

    @cached_property
    def _line_times(self) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
        matrices = []
        for line in self.lines:
            arr = np.array([self.trips[t].arrivals for t in line.trips], dtype=np.int64)
            dep = np.array([self.trips[t].departures for t in line.trips], dtype=np.int64)
            matrices.append((arr, dep))
        return tuple(matrices)

    def line_arrivals(self, line: int) -> np.ndarray:
        """Arrival matrix of shape (trips, stops), rows in line order."""
        return self._line_times[line][0]

    def line_departures(self, line: int) -> np.ndarray:
        return self._line_times[line][1]

    def earliest_trip(self, line: int, index: int, ready: int) -> int | None:
        """First trip of the line (in ⪯ order) departing index at or after ready."""
        column = self.line_departures(line)[:, index]
        hits = np.flatnonzero(column >= ready)
        if hits.size == 0:
            return None
        return self.lines[line].trips[int(hits[0])]

    def trips_from(self, line: int, index: int, ready: int) -> List[int]:
        """Every trip of the line boardable at index from ready, in line order."""
        column = self.line_departures(line)[:, index]
        trips = self.lines[line].trips
        return [trips[int(p)] for p in np.flatnonzero(column >= ready)]

    # Flat arrays for scanning all trips at once

    @cached_property
    def flat(self) -> "FlatTrips":
        lengths = [len(t.stops) for t in self.trips]
        offsets = np.zeros(len(self.trips) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum(lengths)
        return FlatTrips(
            offsets=offsets,
            stops=np.fromiter((s for t in self.trips for s in t.stops), dtype=np.int64, count=int(offsets[-1])),
            arrivals=np.fromiter((a for t in self.trips for a in t.arrivals), dtype=np.int64, count=int(offsets[-1])),
            departures=np.fromiter((d for t in self.trips for d in t.departures), dtype=np.int64, count=int(offsets[-1])),
            change_times=np.array([s.min_change_time for s in self.stops], dtype=np.int64),
            walk_from=np.array([f.from_stop for f in self.footpaths], dtype=np.int64),
            walk_to=np.array([f.to_stop for f in self.footpaths], dtype=np.int64),
            walk_duration=np.array([f.duration for f in self.footpaths], dtype=np.int64),
        )

    def last_departure(self) -> int:
        return max((max(t.departures[:-1]) for t in self.trips if len(t.stops) > 1), default=0)


@dataclass(frozen=True, eq=False)
class FlatTrips:
    offsets: np.ndarray
    stops: np.ndarray
    arrivals: np.ndarray
    departures: np.ndarray
    change_times: np.ndarray
    walk_from: np.ndarray
    walk_to: np.ndarray
    walk_duration: np.ndarray = field(repr=False)
