# Services/clock.py
import re

from Models.errors import ClockFormatError
from Models.timetable import DAY

_CLOCK = re.compile(r"^(\d{1,2}):(\d{2})(?::(\d{2}))?(\+1d)?$")


def parse_clock(text: str) -> int:
    """
    "HH:MM[:SS][+1d]" to seconds since midnight of day 1. Hours up to 47
    are accepted, so "24:00" is midnight at the end of day 1.
    """
    match = _CLOCK.match(text.strip())
    if not match:
        raise ClockFormatError(f"malformed time: {text!r} (expected HH:MM[:SS][+1d])")
    hours, minutes, seconds = int(match[1]), int(match[2]), int(match[3] or 0)
    if minutes > 59 or seconds > 59 or hours > 47:
        raise ClockFormatError(f"malformed time: {text!r}")
    return hours * 3600 + minutes * 60 + seconds + (DAY if match[4] else 0)


def format_clock(seconds: int) -> str:
    day, rest = divmod(seconds, DAY)
    hours, rest = divmod(rest, 3600)
    minutes, secs = divmod(rest, 60)
    text = f"{hours:02d}:{minutes:02d}" + (f":{secs:02d}" if secs else "")
    return text + (f"+{day}d" if day else "")
