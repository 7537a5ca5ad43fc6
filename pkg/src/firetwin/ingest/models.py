"""Unified incident schema, adapter configuration, and poll diffing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

FEED_FORMATS = ("json", "rss", "html_table", "plain_text")
STATUS_VALUES = ("active", "resolved")

# Unified fields an adapter must map. city comes from the adapter, id is
# derived, status defaults to active.
MAPPED_FIELDS = ("name", "timestamp", "lat", "lon", "address", "department")


def incident_id(city: str, name: str, timestamp: datetime, address: str) -> str:
    """Deterministic identity: content hash over the fields a feed cannot
    change between polls without describing a different event. The
    timestamp is truncated to the minute so second-level jitter in a
    re-published record does not mint a new fire."""
    ts = timestamp
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc)
    minute = ts.strftime("%Y-%m-%dT%H:%M")
    payload = "\x1f".join(
        [city.strip().lower(), name.strip().lower(), minute, address.strip().lower()]
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class FireIncident:
    id: str
    city: str
    name: str
    timestamp: datetime
    lat: float
    lon: float
    address: str
    department: str
    status: str = "active"

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"lon {self.lon} outside [-180, 180]")
        if self.status not in STATUS_VALUES:
            raise ValueError(f"status {self.status!r} not in {STATUS_VALUES}")
        if self.timestamp.tzinfo is None:
            object.__setattr__(
                self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc)
            )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "city": self.city,
            "name": self.name,
            "timestamp": self.timestamp.astimezone(timezone.utc).isoformat(),
            "lat": self.lat,
            "lon": self.lon,
            "address": self.address,
            "department": self.department,
            "status": self.status,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FireIncident":
        return cls(
            id=doc["id"],
            city=doc["city"],
            name=doc["name"],
            timestamp=datetime.fromisoformat(doc["timestamp"]),
            lat=float(doc["lat"]),
            lon=float(doc["lon"]),
            address=doc["address"],
            department=doc["department"],
            status=doc.get("status", "active"),
        )


@dataclass(frozen=True)
class FeedAdapterConfig:
    """How one city's feed becomes FireIncident records.

    field_map maps each unified field to the source's key, column
    header, tag name, or token index. A "tag:N" source key splits the
    tag text on whitespace and takes token N (for combined lat/lon
    fields). categories is the fire whitelist matched as
    case-insensitive substrings of the incident name.
    """

    city: str
    url: str
    format: str
    field_map: dict
    datetime_format: str = "iso8601"
    poll_interval: float = 300.0
    categories: tuple = ("fire",)
    geocode_fallback: bool = False
    records_path: str = ""
    delimiter: str = "|"

    def __post_init__(self):
        if self.format not in FEED_FORMATS:
            raise ValueError(f"format {self.format!r} not one of {FEED_FORMATS}")
        missing = [f for f in MAPPED_FIELDS if f not in self.field_map]
        if self.geocode_fallback:
            missing = [f for f in missing if f not in ("lat", "lon")]
        if missing:
            raise ValueError(
                f"field_map for {self.city} missing {missing} and no fallback covers them"
            )


def adapter_from_dict(doc: dict) -> FeedAdapterConfig:
    return FeedAdapterConfig(
        city=doc["city"],
        url=doc["url"],
        format=doc["format"],
        field_map=dict(doc["field_map"]),
        datetime_format=doc.get("datetime_format", "iso8601"),
        poll_interval=float(doc.get("poll_interval", 300.0)),
        categories=tuple(doc.get("categories", ("fire",))),
        geocode_fallback=bool(doc.get("geocode_fallback", False)),
        records_path=doc.get("records_path", ""),
        delimiter=doc.get("delimiter", "|"),
    )


def load_adapters(source: str | Path) -> list[FeedAdapterConfig]:
    """Adapter config entries from a JSON list document."""
    docs = json.loads(Path(source).read_text())
    return [adapter_from_dict(d) for d in docs]


@dataclass(frozen=True)
class ActiveDelta:
    new: tuple
    resolved: tuple  # ids
    ongoing: tuple  # ids


def diff_active(previous, current) -> ActiveDelta:
    """Membership diff by incident id between two polls of one city."""
    prev_ids = {i.id for i in previous}
    cur_by_id = {i.id: i for i in current}
    new = tuple(i for i in current if i.id not in prev_ids)
    resolved = tuple(i.id for i in previous if i.id not in cur_by_id)
    ongoing = tuple(i.id for i in current if i.id in prev_ids)
    return ActiveDelta(new=new, resolved=resolved, ongoing=ongoing)
