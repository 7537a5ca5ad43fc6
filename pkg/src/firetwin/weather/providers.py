"""Weather providers, unit normalization, and the (cell, hour) cache.

A provider answers (lat, lon, time) with its nearest raw observation,
units declared. fetch_weather normalizes units, enforces the +/-90
minute staleness window, and memoizes per 0.05 degree grid cell and
UTC hour so clustered fires share one provider call.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Protocol

from firetwin.errors import OutOfCoverage, ProviderUnavailable
from firetwin.weather.models import WeatherSample

MPS_PER_MPH = 0.44704
MPS_PER_KNOT = 0.514444

CACHE_CELL_DEG = 0.05
MAX_SAMPLE_AGE = timedelta(minutes=90)

_SPEED_FACTORS = {
    "m/s": 1.0,
    "mps": 1.0,
    "mph": MPS_PER_MPH,
    "kt": MPS_PER_KNOT,
    "knots": MPS_PER_KNOT,
    "km/h": 1.0 / 3.6,
}


@dataclass(frozen=True)
class RawObservation:
    """Provider response before unit normalization."""

    lat: float
    lon: float
    timestamp: datetime
    wind_speed: float
    wind_from_direction: float
    humidity: float
    cloud_cover: float
    wind_speed_unit: str = "m/s"
    cloud_cover_unit: str = "fraction"


class WeatherProvider(Protocol):
    def observe(self, lat: float, lon: float, when: datetime) -> RawObservation: ...


def _normalize(raw: RawObservation) -> WeatherSample:
    try:
        factor = _SPEED_FACTORS[raw.wind_speed_unit.lower()]
    except KeyError:
        raise ProviderUnavailable(
            f"unknown wind speed unit {raw.wind_speed_unit!r}"
        ) from None
    cloud = raw.cloud_cover
    if raw.cloud_cover_unit == "percent":
        cloud = cloud / 100.0
    return WeatherSample(
        wind_speed=max(0.0, raw.wind_speed * factor),
        wind_from_direction=raw.wind_from_direction,
        humidity=min(100.0, max(0.0, raw.humidity)),
        cloud_cover=min(1.0, max(0.0, cloud)),
        timestamp=raw.timestamp,
        lat=raw.lat,
        lon=raw.lon,
    )


def _parse_timestamp(value: str) -> datetime:
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_records(doc: dict) -> list[RawObservation]:
    out = []
    for rec in doc.get("samples", []):
        out.append(
            RawObservation(
                lat=float(rec["lat"]),
                lon=float(rec["lon"]),
                timestamp=_parse_timestamp(rec["timestamp"]),
                wind_speed=float(rec["wind_speed"]),
                wind_from_direction=float(rec["wind_from_direction"]),
                humidity=float(rec.get("humidity", 50.0)),
                cloud_cover=float(rec.get("cloud_cover", 0.0)),
                wind_speed_unit=rec.get("wind_speed_unit", "m/s"),
                cloud_cover_unit=rec.get("cloud_cover_unit", "fraction"),
            )
        )
    return out


class FixtureWeatherProvider:
    """Recorded observations from a JSON document {"samples": [...]}."""

    def __init__(self, source: str | Path | dict, coverage_radius_deg: float = 1.0):
        if isinstance(source, dict):
            doc = source
        else:
            try:
                doc = json.loads(Path(source).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ProviderUnavailable(f"cannot load fixture {source}: {exc}") from exc
        self.records = _parse_records(doc)
        self.coverage_radius_deg = coverage_radius_deg

    def observe(self, lat: float, lon: float, when: datetime) -> RawObservation:
        nearby = [
            r
            for r in self.records
            if abs(r.lat - lat) <= self.coverage_radius_deg
            and abs(r.lon - lon) <= self.coverage_radius_deg
        ]
        if not nearby:
            raise OutOfCoverage(f"no recorded weather near ({lat:.3f}, {lon:.3f})")
        return min(nearby, key=lambda r: abs(r.timestamp - when))


class HttpWeatherAdapter:
    """Live provider hitting a URL template that returns fixture-shaped JSON.

    Enabled per deployment by config; tests never reach the network.
    """

    def __init__(self, url_template: str, timeout: float = 10.0):
        self.url_template = url_template
        self.timeout = timeout

    def observe(self, lat: float, lon: float, when: datetime) -> RawObservation:
        import httpx

        url = self.url_template.format(lat=lat, lon=lon, time=when.isoformat())
        try:
            resp = httpx.get(url, timeout=self.timeout)
            resp.raise_for_status()
            records = _parse_records(resp.json())
        except (httpx.HTTPError, ValueError, KeyError) as exc:
            raise ProviderUnavailable(f"weather request failed: {exc}") from exc
        if not records:
            raise OutOfCoverage(f"empty weather response for ({lat:.3f}, {lon:.3f})")
        return min(records, key=lambda r: abs(r.timestamp - when))


class WeatherCache:
    """Thread-safe insert-if-absent cache keyed by (grid cell, UTC hour)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[tuple, WeatherSample] = {}

    @staticmethod
    def key(lat: float, lon: float, when: datetime) -> tuple:
        t = when if when.tzinfo else when.replace(tzinfo=timezone.utc)
        hour = int(t.astimezone(timezone.utc).timestamp() // 3600)
        return (round(lat / CACHE_CELL_DEG), round(lon / CACHE_CELL_DEG), hour)

    def get(self, key: tuple) -> WeatherSample | None:
        with self._lock:
            return self._entries.get(key)

    def put_if_absent(self, key: tuple, sample: WeatherSample) -> WeatherSample:
        with self._lock:
            return self._entries.setdefault(key, sample)


def fetch_weather(
    lat: float,
    lon: float,
    when: datetime,
    provider: WeatherProvider,
    cache: WeatherCache | None = None,
) -> WeatherSample:
    """Nearest-in-time sample within 90 minutes, cached per (cell, hour)."""
    if when.tzinfo is None:
        when = when.replace(tzinfo=timezone.utc)
    key = WeatherCache.key(lat, lon, when) if cache is not None else None
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit

    raw = provider.observe(lat, lon, when)
    if abs(raw.timestamp - when) > MAX_SAMPLE_AGE:
        raise ProviderUnavailable(
            f"nearest observation is {abs(raw.timestamp - when)} from query time"
        )
    sample = _normalize(raw)
    if cache is not None:
        sample = cache.put_if_absent(key, sample)
    return sample
