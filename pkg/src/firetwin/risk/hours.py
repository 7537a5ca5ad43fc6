"""Local-hour statistics under a fixed per-city UTC offset rule.

Cities carry a standard-time offset and a DST flag instead of a tz
database entry. The daylight rule is hardcoded to the post-2007 US
schedule (second Sunday of March 02:00 to first Sunday of November
02:00 local); cities elsewhere should disable DST and accept the
one-hour summer skew. Documented limitation, not a general tz engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone

from firetwin.ingest.models import FireIncident


@dataclass(frozen=True)
class TimeRule:
    """Fixed offset rule: standard UTC offset hours plus optional US DST."""

    std_offset_h: float = -6.0  # US Central
    uses_dst: bool = True


def _first_sunday(year: int, month: int) -> int:
    return 1 + (6 - date(year, month, 1).weekday()) % 7


def _dst_active(t_std: datetime) -> bool:
    # Transitions expressed in local standard time: forward jump at
    # 02:00 standard in March, fall back at 01:00 standard (02:00
    # daylight) in November.
    year = t_std.year
    start = datetime(year, 3, _first_sunday(year, 3) + 7, 2)
    end = datetime(year, 11, _first_sunday(year, 11), 1)
    return start <= t_std.replace(tzinfo=None) < end


def local_hour(ts: datetime, rule: TimeRule) -> int:
    """Wall-clock hour [0, 24) of a UTC timestamp under the rule."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    t_std = ts.astimezone(timezone.utc) + timedelta(hours=rule.std_offset_h)
    if rule.uses_dst and _dst_active(t_std):
        t_std += timedelta(hours=1)
    return t_std.hour


def hourly_histogram(incidents: list[FireIncident], rule: TimeRule | None = None) -> list[int]:
    """Incident counts by local hour; 24 buckets summing to the input size."""
    if rule is None:
        rule = TimeRule()
    buckets = [0] * 24
    for inc in incidents:
        buckets[local_hour(inc.timestamp, rule)] += 1
    return buckets
