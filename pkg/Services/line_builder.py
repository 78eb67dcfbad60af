# Services/line_builder.py
import logging
from typing import Dict, List, Sequence, Tuple

from Models.errors import MalformedTripError
from Models.timetable import Line, RawTrip

logger = logging.getLogger(__name__)


def check_trip_times(trip: RawTrip, label: str = "") -> None:
    """Raise MalformedTripError unless the trip's times are monotone."""
    n = len(trip.stops)
    if n < 2:
        raise MalformedTripError(f"trip {label} has {n} stops, needs at least 2")
    if len(trip.arrivals) != n or len(trip.departures) != n:
        raise MalformedTripError(f"trip {label} has mismatched stop and time counts")
    for i in range(n):
        if trip.departures[i] < trip.arrivals[i]:
            raise MalformedTripError(f"trip {label} departs before it arrives at index {i}")
        if i + 1 < n and trip.arrivals[i + 1] < trip.departures[i]:
            raise MalformedTripError(f"trip {label} arrives at index {i + 1} before departing index {i}")


def _precedes(a: RawTrip, b: RawTrip) -> bool:
    return all(x <= y for x, y in zip(a.arrivals, b.arrivals))


def build_lines(trips: Sequence[RawTrip]) -> List[Line]:
    """
    Partition trips into lines.

    Trips are grouped by stop sequence (groups in order of first
    appearance). Inside a group they are sorted by (first departure, last
    arrival, trip id) and each is appended to the first line whose last
    trip precedes it at every index, or opens a new line.

    Trip ids are positions in the input sequence.
    """
    groups: Dict[Tuple[int, ...], List[int]] = {}
    for trip_id, trip in enumerate(trips):
        check_trip_times(trip, str(trip_id))
        groups.setdefault(tuple(trip.stops), []).append(trip_id)

    lines: List[Line] = []
    for stops, members in groups.items():
        members.sort(key=lambda t: (trips[t].departures[0], trips[t].arrivals[-1], t))
        chains: List[List[int]] = []
        for trip_id in members:
            for chain in chains:
                if _precedes(trips[chain[-1]], trips[trip_id]):
                    chain.append(trip_id)
                    break
            else:
                chains.append([trip_id])
        for chain in chains:
            lines.append(Line(id=len(lines), stops=stops, trips=tuple(chain)))
        if len(chains) > 1:
            logger.debug(f"stop sequence of {len(members)} trips split into {len(chains)} lines")
    return lines
