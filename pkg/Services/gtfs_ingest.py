# Services/gtfs_ingest.py
import logging
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

import pandas as pd
from pydantic import BaseModel, conint, validator

from Models.errors import GtfsError, MissingTableError, StopTimesOrderError, TimeParseError
from Models.timetable import DAY, Footpath, RawTrip, Stop, Timetable

logger = logging.getLogger(__name__)

MANDATORY_TABLES = ("stops", "routes", "trips", "stop_times")
SAME_STOP_MIN_TIME = "2"
NOT_POSSIBLE = "3"


class IngestConfig(BaseModel):
    """
    Attributes:
        feed_dir: Directory holding the GTFS .txt tables
        service_days: One or two consecutive calendar dates to instantiate
        default_min_change_time: Change time for stops without a transfers.txt entry
    """
    feed_dir: Path
    service_days: List[date]
    default_min_change_time: conint(ge=0) = 0

    @validator('service_days')
    def one_or_two_consecutive(cls, days: List[date]) -> List[date]:
        if not 1 <= len(days) <= 2:
            raise ValueError("select one or two service days")
        if len(days) == 2 and days[1] - days[0] != timedelta(days=1):
            raise ValueError("service days must be consecutive")
        return days


def parse_gtfs_time(text: str) -> int:
    """'H:MM:SS' (hours may exceed 23) to seconds after midnight."""
    parts = text.strip().split(":")
    try:
        if len(parts) != 3:
            raise ValueError(text)
        hours, minutes, seconds = (int(p) for p in parts)
    except ValueError:
        raise TimeParseError(f"unparseable time: {text!r}") from None
    if hours < 0 or not 0 <= minutes < 60 or not 0 <= seconds < 60:
        raise TimeParseError(f"unparseable time: {text!r}")
    return hours * 3600 + minutes * 60 + seconds


def format_gtfs_time(seconds: int) -> str:
    hours, rest = divmod(seconds, 3600)
    minutes, secs = divmod(rest, 60)
    return f"{hours:02d}:{minutes:02d}:{secs:02d}"


def _read(feed_dir: Path, name: str, required: bool = True) -> Optional[pd.DataFrame]:
    path = feed_dir / f"{name}.txt"
    if not path.exists():
        if required:
            raise MissingTableError(f"missing mandatory table: {name}.txt")
        return None
    table = pd.read_csv(path, dtype=str, keep_default_na=False)
    table.columns = [c.strip() for c in table.columns]
    return table


def _active_services(calendar: Optional[pd.DataFrame], calendar_dates: Optional[pd.DataFrame], day: date) -> Set[str]:
    stamp = day.strftime("%Y%m%d")
    weekday = day.strftime("%A").lower()
    active: Set[str] = set()
    if calendar is not None and len(calendar):
        running = calendar[
            (calendar["start_date"] <= stamp) & (calendar["end_date"] >= stamp) & (calendar[weekday] == "1")
        ]
        active.update(running["service_id"])
    if calendar_dates is not None and len(calendar_dates):
        today = calendar_dates[calendar_dates["date"] == stamp]
        active.update(today.loc[today["exception_type"] == "1", "service_id"])
        active.difference_update(today.loc[today["exception_type"] == "2", "service_id"])
    return active


def _stop_patterns(stop_times: pd.DataFrame, stop_index: Dict[str, int]) -> Dict[str, Tuple[list, list, list]]:
    try:
        stop_times = stop_times.assign(seq=stop_times["stop_sequence"].astype(int))
    except ValueError as err:
        raise GtfsError(f"stop_times.txt has a non-integer stop_sequence: {err}") from None
    stop_times = stop_times.sort_values(["trip_id", "seq"], kind="stable")
    patterns = {}
    for trip_id, rows in stop_times.groupby("trip_id", sort=False):
        stops, arrivals, departures = [], [], []
        for stop_id, arr_text, dep_text in zip(rows["stop_id"], rows["arrival_time"], rows["departure_time"]):
            if stop_id not in stop_index:
                raise GtfsError(f"trip {trip_id} references unknown stop {stop_id}")
            arr_text = arr_text or dep_text
            dep_text = dep_text or arr_text
            if not arr_text:
                raise TimeParseError(f"unparseable time: trip {trip_id} has a stop without times")
            stops.append(stop_index[stop_id])
            arrivals.append(parse_gtfs_time(arr_text))
            departures.append(parse_gtfs_time(dep_text))
        for i in range(len(stops)):
            if departures[i] < arrivals[i] or (i + 1 < len(stops) and arrivals[i + 1] < departures[i]):
                raise StopTimesOrderError(f"stop_times out of order for trip {trip_id} at position {i}")
        patterns[trip_id] = (stops, arrivals, departures)
    return patterns


def load_gtfs(cfg: IngestConfig) -> Timetable:
    """Instantiate the trips running on the selected day(s) as a Timetable."""
    tables = {name: _read(cfg.feed_dir, name) for name in MANDATORY_TABLES}
    transfers = _read(cfg.feed_dir, "transfers", required=False)
    calendar = _read(cfg.feed_dir, "calendar", required=False)
    calendar_dates = _read(cfg.feed_dir, "calendar_dates", required=False)

    stops_table = tables["stops"]
    stop_index = {stop_id: i for i, stop_id in enumerate(stops_table["stop_id"])}
    names = stops_table["stop_name"] if "stop_name" in stops_table else stops_table["stop_id"]
    change_times = [cfg.default_min_change_time] * len(stop_index)

    footpaths: Dict[Tuple[int, int], int] = {}
    if transfers is not None:
        for row in transfers.itertuples(index=False):
            a, b = stop_index.get(row.from_stop_id), stop_index.get(row.to_stop_id)
            kind = getattr(row, "transfer_type", "")
            if kind == NOT_POSSIBLE:
                logger.info(f"Ignoring forbidden transfer {row.from_stop_id}->{row.to_stop_id}")
                continue
            seconds_text = getattr(row, "min_transfer_time", "")
            if a is None or b is None or not seconds_text:
                logger.warning(f"Skipping transfers.txt row {row.from_stop_id}->{row.to_stop_id}")
                continue
            try:
                duration = int(float(seconds_text))
            except ValueError:
                raise GtfsError(f"transfers.txt has an unparseable min_transfer_time: {seconds_text!r}") from None
            if a == b:
                if kind == SAME_STOP_MIN_TIME:
                    change_times[a] = duration
            elif duration > 0:
                footpaths[(a, b)] = min(duration, footpaths.get((a, b), duration))
            else:
                logger.warning(f"Skipping zero-length footpath {row.from_stop_id}->{row.to_stop_id}")

    stops = [Stop(i, str(name), change_times[i]) for i, name in enumerate(names)]
    patterns = _stop_patterns(tables["stop_times"], stop_index)

    if calendar is None and calendar_dates is None:
        schedule = [(0, None)]
    else:
        schedule = [(k, _active_services(calendar, calendar_dates, day)) for k, day in enumerate(cfg.service_days)]

    raw_trips: List[RawTrip] = []
    for day_index, services in schedule:
        for trip_id, service_id in zip(tables["trips"]["trip_id"], tables["trips"]["service_id"]):
            if services is not None and service_id not in services:
                continue
            pattern = patterns.get(trip_id)
            if pattern is None or len(pattern[0]) < 2:
                logger.warning(f"Skipping trip {trip_id} with fewer than two stop times")
                continue
            shift = day_index * DAY
            raw_trips.append(RawTrip(
                stops=tuple(pattern[0]),
                arrivals=tuple(t + shift for t in pattern[1]),
                departures=tuple(t + shift for t in pattern[2]),
                name=trip_id if day_index == 0 else f"{trip_id}+{day_index}d",
            ))

    num_days = len(schedule)
    tt = Timetable.from_raw(
        stops, [Footpath(a, b, d) for (a, b), d in sorted(footpaths.items())], raw_trips, num_days
    )
    logger.info(f"Loaded GTFS feed {cfg.feed_dir}: {tt}")
    return tt


def write_gtfs(tt: Timetable, out_dir: Path) -> Path:
    """Write the timetable as a calendar-less GTFS feed that load_gtfs reads back."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trip_ids = [trip.name or f"T{trip.id}" for trip in tt.trips]

    pd.DataFrame({
        "stop_id": [str(s.id) for s in tt.stops],
        "stop_name": [s.name or str(s.id) for s in tt.stops],
    }).to_csv(out_dir / "stops.txt", index=False)
    pd.DataFrame({
        "route_id": [f"L{line.id}" for line in tt.lines],
        "route_short_name": [f"L{line.id}" for line in tt.lines],
        "route_type": ["3"] * len(tt.lines),
    }).to_csv(out_dir / "routes.txt", index=False)
    pd.DataFrame({
        "route_id": [f"L{trip.line}" for trip in tt.trips],
        "service_id": ["ALL"] * len(tt.trips),
        "trip_id": trip_ids,
    }).to_csv(out_dir / "trips.txt", index=False)
    pd.DataFrame(
        [
            (trip_ids[trip.id], format_gtfs_time(a), format_gtfs_time(d), str(s), i)
            for trip in tt.trips
            for i, (s, a, d) in enumerate(zip(trip.stops, trip.arrivals, trip.departures))
        ],
        columns=["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"],
    ).to_csv(out_dir / "stop_times.txt", index=False)
    rows = [(str(s.id), str(s.id), SAME_STOP_MIN_TIME, s.min_change_time) for s in tt.stops if s.min_change_time > 0]
    rows += [(str(f.from_stop), str(f.to_stop), SAME_STOP_MIN_TIME, f.duration) for f in tt.footpaths]
    pd.DataFrame(rows, columns=["from_stop_id", "to_stop_id", "transfer_type", "min_transfer_time"]).to_csv(
        out_dir / "transfers.txt", index=False
    )
    return out_dir
