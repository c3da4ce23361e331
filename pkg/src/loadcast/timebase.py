"""Hourly time axis with US Central wall-clock handling.

Internally every instant is an integer count of whole hours since the Unix
epoch (UTC).  That makes the hourly axis uniform across daylight-saving
transitions; Central wall time exists only when parsing input text and when
rendering output.  Offsets for America/Chicago are whole hours, so an
on-the-hour wall time is on-the-hour in UTC as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from zoneinfo import ZoneInfo

import numpy as np

from .errors import TimestampError

CENTRAL = ZoneInfo("America/Chicago")
_SECONDS_PER_HOUR = 3600


def parse_hour(text: str) -> int:
    """Parse an ISO 8601 timestamp to an epoch hour.

    Offset-aware timestamps are taken literally.  Offset-free timestamps are
    read as Central wall time, which is rejected when the wall time does not
    exist (spring-forward gap) or is ambiguous (fall-back repeat); those hours
    need an explicit offset to be meaningful.
    """
    try:
        dt = datetime.fromisoformat(text.strip())
    except ValueError as exc:
        raise TimestampError(f"unparseable timestamp {text!r}: {exc}") from None

    if dt.tzinfo is None:
        dt = _attach_central(dt, text)

    utc = dt.astimezone(timezone.utc)
    if utc.minute or utc.second or utc.microsecond:
        raise TimestampError(f"timestamp {text!r} is not on the hour")
    return int(utc.timestamp()) // _SECONDS_PER_HOUR


def _attach_central(naive: datetime, text: str) -> datetime:
    early = naive.replace(tzinfo=CENTRAL, fold=0)
    late = naive.replace(tzinfo=CENTRAL, fold=1)
    # A wall time inside the spring-forward gap does not survive a round trip
    # through UTC; a fall-back wall time exists twice with different offsets.
    round_trip = early.astimezone(timezone.utc).astimezone(CENTRAL)
    if round_trip.replace(tzinfo=None) != naive:
        raise TimestampError(
            f"local time {text!r} does not exist in US Central (DST spring-forward)"
        )
    if early.utcoffset() != late.utcoffset():
        raise TimestampError(
            f"local time {text!r} is ambiguous in US Central (DST fall-back); "
            "an explicit UTC offset is required"
        )
    return early


def render_hour(hour: int) -> str:
    """Canonical text form: ISO 8601 in Central wall time with offset."""
    dt = datetime.fromtimestamp(hour * _SECONDS_PER_HOUR, tz=CENTRAL)
    return dt.isoformat()


def to_utc(hour: int) -> datetime:
    return datetime.fromtimestamp(hour * _SECONDS_PER_HOUR, tz=timezone.utc)


def to_central(hour: int) -> datetime:
    return datetime.fromtimestamp(hour * _SECONDS_PER_HOUR, tz=CENTRAL)


@dataclass(frozen=True, order=True)
class Timestamp:
    """An absolute hour, comparable and round-trip safe through its text form."""

    hour: int

    @classmethod
    def parse(cls, text: str) -> "Timestamp":
        return cls(parse_hour(text))

    def isoformat(self) -> str:
        return render_hour(self.hour)

    def __str__(self) -> str:
        return self.isoformat()


def hour_range(start: int, n: int) -> np.ndarray:
    """Contiguous hourly axis as int64 epoch hours."""
    return np.arange(start, start + n, dtype=np.int64)


def local_fields(axis: np.ndarray) -> dict[str, np.ndarray]:
    """Central-time calendar fields for every hour on the axis.

    Returns int arrays: year, month (1-12), day, hour (0-23),
    dayofweek (0=Monday), and the Gregorian ordinal of the local date.
    """
    n = len(axis)
    out = {
        name: np.empty(n, dtype=np.int64)
        for name in ("year", "month", "day", "hour", "dayofweek", "ordinal")
    }
    for i, h in enumerate(axis):
        dt = datetime.fromtimestamp(int(h) * _SECONDS_PER_HOUR, tz=CENTRAL)
        out["year"][i] = dt.year
        out["month"][i] = dt.month
        out["day"][i] = dt.day
        out["hour"][i] = dt.hour
        out["dayofweek"][i] = dt.weekday()
        out["ordinal"][i] = dt.date().toordinal()
    return out
