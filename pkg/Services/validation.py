# Services/validation.py
from typing import List, Set, Tuple

from pydantic import BaseModel

from Models.timetable import Timetable


class ValidationIssue(BaseModel):
    kind: str
    detail: str


class ValidationReport(BaseModel):
    """
    Result of validate_timetable.

    Attributes:
        issues: Every invariant violation found, in check order
    """
    issues: List[ValidationIssue] = []

    @property
    def ok(self) -> bool:
        return not self.issues

    def kinds(self) -> Set[str]:
        return {issue.kind for issue in self.issues}

    def add(self, kind: str, detail: str) -> None:
        self.issues.append(ValidationIssue(kind=kind, detail=detail))


def validate_timetable(tt: Timetable) -> ValidationReport:
    """Collect invariant violations without touching derived indexes."""
    report = ValidationReport()
    num_stops = len(tt.stops)
    known = range(num_stops)

    for i, stop in enumerate(tt.stops):
        if stop.id != i:
            report.add("non-contiguous stop ids", f"stop at position {i} has id {stop.id}")
        if stop.min_change_time < 0:
            report.add("negative change time", f"stop {stop.id}")

    seen: Set[Tuple[int, int]] = set()
    for fp in tt.footpaths:
        pair = (fp.from_stop, fp.to_stop)
        if fp.from_stop not in known or fp.to_stop not in known:
            report.add("dangling stop reference", f"footpath {pair}")
        if fp.from_stop == fp.to_stop:
            report.add("footpath loop", f"footpath at stop {fp.from_stop}")
        if fp.duration <= 0:
            report.add("non-positive footpath", f"footpath {pair} takes {fp.duration}s")
        if pair in seen:
            report.add("duplicate footpath", f"footpath {pair}")
        seen.add(pair)

    membership = [0] * len(tt.trips)
    for line in tt.lines:
        if not line.trips:
            report.add("empty line", f"line {line.id}")
        for trip_id in line.trips:
            if not 0 <= trip_id < len(tt.trips):
                report.add("dangling trip reference", f"line {line.id} lists trip {trip_id}")
                continue
            membership[trip_id] += 1
            trip = tt.trips[trip_id]
            if trip.line != line.id:
                report.add("line membership mismatch", f"trip {trip_id} on line {line.id}")
            if tuple(trip.stops) != tuple(line.stops):
                report.add("line stop sequence mismatch", f"trip {trip_id} on line {line.id}")
        for a, b in zip(line.trips, line.trips[1:]):
            if 0 <= a < len(tt.trips) and 0 <= b < len(tt.trips) and not tt.trips[a].precedes(tt.trips[b]):
                report.add("line order violated", f"trips {a} and {b} overtake on line {line.id}")

    for trip in tt.trips:
        if membership[trip.id] != 1:
            report.add("line membership mismatch", f"trip {trip.id} is in {membership[trip.id]} lines")
        n = len(trip.stops)
        if n < 2:
            report.add("trip too short", f"trip {trip.id} has {n} stops")
        if len(trip.arrivals) != n or len(trip.departures) != n:
            report.add("shape mismatch", f"trip {trip.id}")
            continue
        if any(s not in known for s in trip.stops):
            report.add("dangling stop reference", f"trip {trip.id}")
        for i in range(n):
            if trip.departures[i] < trip.arrivals[i] or (i + 1 < n and trip.arrivals[i + 1] < trip.departures[i]):
                report.add("time order violated", f"trip {trip.id} at index {i}")
                break

    if not tt.trips:
        report.add("empty timetable", "no trips to route on")
    if tt.num_days not in (1, 2):
        report.add("bad day count", f"num_days = {tt.num_days}")
    return report
