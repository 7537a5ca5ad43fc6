"""Weather domain types."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import datetime


class PasquillClass(enum.Enum):
    """Atmospheric stability class, A (most unstable) through F (most stable)."""

    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"

    @property
    def rank(self) -> int:
        """0 for A up to 5 for F; higher means more stable."""
        return "ABCDEF".index(self.value)


@dataclass(frozen=True)
class WeatherSample:
    """One observation: wind in m/s, direction the wind blows FROM in
    degrees clockwise from north, humidity in percent, cloud cover as a
    fraction, UTC timestamp."""

    wind_speed: float
    wind_from_direction: float
    humidity: float
    cloud_cover: float
    timestamp: datetime
    lat: float
    lon: float

    def __post_init__(self):
        if self.wind_speed < 0:
            raise ValueError(f"wind_speed {self.wind_speed} < 0")
        if not 0 <= self.humidity <= 100:
            raise ValueError(f"humidity {self.humidity} outside [0, 100]")
        if not 0 <= self.cloud_cover <= 1:
            raise ValueError(f"cloud_cover {self.cloud_cover} outside [0, 1]")
        object.__setattr__(
            self, "wind_from_direction", self.wind_from_direction % 360.0
        )


def wind_vector(sample: WeatherSample) -> tuple[float, float]:
    """(vx east, vy north) in m/s of the direction the wind blows TOWARD."""
    d = math.radians(sample.wind_from_direction)
    return (-sample.wind_speed * math.sin(d), -sample.wind_speed * math.cos(d))
