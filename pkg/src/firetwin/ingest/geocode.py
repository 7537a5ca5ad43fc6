"""Address geocoding contract with a fixture-backed implementation."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Protocol


class Geocoder(Protocol):
    def geocode(self, address: str, city: str) -> tuple[float, float] | None: ...


def _normalize(address: str) -> str:
    return re.sub(r"\s+", " ", address.strip().lower())


class FixtureGeocoder:
    """Lookup table {city: {address: [lat, lon]}} from a dict or JSON file."""

    def __init__(self, source: str | Path | dict):
        if isinstance(source, dict):
            table = source
        else:
            table = json.loads(Path(source).read_text())
        self.table = {
            city.lower(): {_normalize(a): tuple(ll) for a, ll in entries.items()}
            for city, entries in table.items()
        }

    def geocode(self, address: str, city: str) -> tuple[float, float] | None:
        hit = self.table.get(city.lower(), {}).get(_normalize(address))
        return (float(hit[0]), float(hit[1])) if hit else None
