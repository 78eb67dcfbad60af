# Models/errors.py
from typing import Any


class RoutingError(Exception):
    """Base class for every error raised by the router."""


class UnknownStopError(RoutingError, KeyError):
    def __init__(self, stop: Any):
        super().__init__(f"unknown stop: {stop}")
        self.stop = stop

    def __str__(self) -> str:
        return self.args[0]


class InvalidRangeError(RoutingError, ValueError):
    pass


class MalformedTripError(RoutingError, ValueError):
    pass


class ClockFormatError(RoutingError, ValueError):
    pass


class SyntheticSpecError(RoutingError, ValueError):
    pass


class InvalidTimetableError(RoutingError):
    def __init__(self, report):
        issues = "; ".join(f"{i.kind}: {i.detail}" for i in report.issues[:5])
        super().__init__(f"invalid timetable ({len(report.issues)} issues): {issues}")
        self.report = report


# GTFS
class GtfsError(RoutingError):
    pass


class MissingTableError(GtfsError):
    pass


class TimeParseError(GtfsError, ValueError):
    pass


class StopTimesOrderError(GtfsError):
    pass


# Dataset file
class DatasetError(RoutingError):
    pass


class NotADatasetError(DatasetError):
    def __init__(self, detail: str = ""):
        super().__init__(f"not a dataset file{': ' + detail if detail else ''}")


class UnsupportedVersionError(DatasetError):
    def __init__(self, version: int):
        super().__init__(f"unsupported version: {version}")
        self.version = version


class TruncatedDatasetError(DatasetError):
    pass


class ChecksumError(DatasetError):
    pass
