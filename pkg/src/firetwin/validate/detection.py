"""Did nearby air-quality sensors see the predicted smoke?

Readings are grouped per sensor, sensors located inside the predicted
footprint are checked for a concentration rise over their pre-event
baseline, and the absence of any in-footprint sensor is itself a
result (coverage sparsity), reported rather than raised.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from firetwin.errors import InsufficientBaseline, MalformedFeed
from firetwin.geo.polygons import point_in_polygon
from firetwin.plume2d.footprint import PlumeFootprint

# A sensor "responds" when its event peak exceeds baseline by both an
# absolute floor (instrument noise) and a relative margin.
RESPONSE_FLOOR_UGM3 = 5.0
RESPONSE_FRACTION = 0.25

MIN_BASELINE_SPAN = timedelta(hours=2)


@dataclass(frozen=True)
class SensorReading:
    """One timestamped PM2.5 sample from a stationary sensor."""

    sensor_id: str
    lat: float
    lon: float
    timestamp: datetime
    pm25: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"lon {self.lon} outside [-180, 180]")
        if not math.isfinite(self.pm25) or self.pm25 < 0:
            raise ValueError(f"pm25 {self.pm25} must be finite and non-negative")
        if self.timestamp.tzinfo is None:
            object.__setattr__(
                self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc)
            )


@dataclass(frozen=True)
class SensorDetection:
    """Per-sensor outcome within the footprint."""

    sensor_id: str
    band: float
    baseline: float
    event_max: float
    delta: float
    responds: bool


@dataclass(frozen=True)
class DetectionReport:
    """Aggregate validation outcome for one event.

    n_in_footprint = 0 with sensors present is the sparsity finding:
    the network cannot confirm or refute the prediction.
    """

    n_sensors: int
    n_in_footprint: int
    n_responding: int
    sparse: bool
    sensors: tuple[SensorDetection, ...]

    def __post_init__(self) -> None:
        if self.n_responding > self.n_in_footprint:
            raise ValueError("more responders than sensors in footprint")


def load_readings(source: str | Path) -> list[SensorReading]:
    """Parse a line-delimited JSON readings file."""
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise MalformedFeed(f"cannot read readings from {source}: {exc}") from exc
    readings = []
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            ts = datetime.fromisoformat(rec["ts"])
            readings.append(
                SensorReading(
                    sensor_id=str(rec["sensor_id"]),
                    lat=float(rec["lat"]),
                    lon=float(rec["lon"]),
                    timestamp=ts,
                    pm25=float(rec["pm25"]),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise MalformedFeed(f"{source}:{n}: bad reading: {exc}") from exc
    return readings


def highest_band(lon: float, lat: float, footprint: PlumeFootprint) -> float | None:
    """Largest threshold whose isopleth contains the point, if any."""
    for threshold, ring in footprint.isopleths:
        if ring and point_in_polygon(lon, lat, [ring]):
            return threshold
    return None


def sensors_in_footprint(
    readings: list[SensorReading], footprint: PlumeFootprint
) -> list[tuple[SensorReading, float]]:
    """One (reading, band) entry per distinct sensor inside the footprint.

    The first reading supplies each sensor's position; sensors are
    stationary by assumption.
    """
    seen: dict[str, SensorReading] = {}
    for r in readings:
        seen.setdefault(r.sensor_id, r)
    out = []
    for sensor_id in sorted(seen):
        r = seen[sensor_id]
        band = highest_band(r.lon, r.lat, footprint)
        if band is not None:
            out.append((r, band))
    return out


def detection_report(
    readings: list[SensorReading],
    footprint: PlumeFootprint,
    event_window: tuple[datetime, datetime],
    floor_ugm3: float = RESPONSE_FLOOR_UGM3,
    fraction: float = RESPONSE_FRACTION,
) -> DetectionReport:
    """Score each in-footprint sensor's event response over its baseline.

    Baseline is the median of readings before the event start, which
    must span at least two hours for every scored sensor; the event
    statistic is the maximum reading inside the window.
    """
    start, end = event_window
    if start >= end:
        raise ValueError("event window start must precede end")

    by_sensor: dict[str, list[SensorReading]] = {}
    for r in readings:
        by_sensor.setdefault(r.sensor_id, []).append(r)

    inside = sensors_in_footprint(readings, footprint)
    detections = []
    for first_reading, band in inside:
        series = by_sensor[first_reading.sensor_id]
        pre = [r for r in series if r.timestamp < start]
        if not pre or start - min(r.timestamp for r in pre) < MIN_BASELINE_SPAN:
            raise InsufficientBaseline(
                f"sensor {first_reading.sensor_id} lacks a 2 h pre-event baseline"
            )
        event = [r for r in series if start <= r.timestamp < end]
        baseline = statistics.median(r.pm25 for r in pre)
        event_max = max((r.pm25 for r in event), default=baseline)
        delta = event_max - baseline
        responds = delta > max(floor_ugm3, fraction * baseline)
        detections.append(
            SensorDetection(
                sensor_id=first_reading.sensor_id,
                band=band,
                baseline=baseline,
                event_max=event_max,
                delta=delta,
                responds=responds,
            )
        )

    return DetectionReport(
        n_sensors=len(by_sensor),
        n_in_footprint=len(detections),
        n_responding=sum(d.responds for d in detections),
        sparse=len(detections) == 0,
        sensors=tuple(detections),
    )
