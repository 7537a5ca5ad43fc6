"""Service configuration: one YAML file describing cities, storage, and
solver settings, with environment overrides for port and storage root.

Relative paths in the file resolve against the directory containing the
config file, so a checked-in demo config can reference checked-in
fixtures regardless of the working directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from firetwin.ingest import FeedAdapterConfig, adapter_from_dict, load_adapters
from firetwin.plume2d import DEFAULT_THRESHOLDS
from firetwin.risk import TimeRule

ENV_PORT = "FIRETWIN_PORT"
ENV_STORAGE_ROOT = "FIRETWIN_STORAGE_ROOT"

DEFAULT_HORIZONS = (1, 2, 3)


@dataclass(frozen=True)
class SolverSettings:
    """Grid dimensions and mesh threshold for the 3D forecast runs."""

    shape: tuple[int, int, int] = (128, 128, 64)
    cell: float = 8.0
    mesh_threshold: float = 35.5

    def __post_init__(self):
        if len(self.shape) != 3 or any(int(n) < 8 for n in self.shape):
            raise ValueError(f"grid shape {self.shape} must be three axes of >= 8 cells")
        if self.cell <= 0:
            raise ValueError(f"cell size {self.cell} must be positive")
        if self.mesh_threshold <= 0:
            raise ValueError(f"mesh threshold {self.mesh_threshold} must be positive")


@dataclass(frozen=True)
class CityConfig:
    name: str
    adapter: FeedAdapterConfig
    center_lat: float
    center_lon: float
    domain_radius_m: float = 30_000.0
    tracts_path: Path | None = None
    weather_fixture: Path | None = None
    weather_url: str | None = None
    time_rule: TimeRule = field(default_factory=TimeRule)

    def __post_init__(self):
        if not -90.0 <= self.center_lat <= 90.0:
            raise ValueError(f"center lat {self.center_lat} outside [-90, 90]")
        if not -180.0 <= self.center_lon <= 180.0:
            raise ValueError(f"center lon {self.center_lon} outside [-180, 180]")
        if self.domain_radius_m <= 0:
            raise ValueError("domain radius must be positive")


@dataclass(frozen=True)
class ServiceConfig:
    storage_root: Path
    cities: dict[str, CityConfig]
    port: int = 8080
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    horizons: tuple[int, ...] = DEFAULT_HORIZONS
    risk_window_days: int = 365
    queue_limit: int = 8
    workers_3d: int = 2
    poll_interval_s: float = 300.0
    solver: SolverSettings = field(default_factory=SolverSettings)
    geocode_fixture: Path | None = None

    def __post_init__(self):
        if not self.cities:
            raise ValueError("at least one city must be configured")
        if not 0 < self.port < 65536:
            raise ValueError(f"port {self.port} outside (0, 65536)")
        if self.queue_limit < 1 or self.workers_3d < 1:
            raise ValueError("queue limit and worker count must be >= 1")
        if self.risk_window_days < 1:
            raise ValueError("risk window must cover at least one day")
        if any(h < 1 for h in self.horizons):
            raise ValueError(f"horizons {self.horizons} must be positive hours")

    def city(self, name: str) -> CityConfig:
        from firetwin.errors import UnknownCity

        try:
            return self.cities[name]
        except KeyError:
            raise UnknownCity(f"city {name!r} not configured") from None


def _resolve(base: Path, value) -> Path:
    p = Path(value)
    return p if p.is_absolute() else (base / p).resolve()


def _resolve_adapter_url(adapter: FeedAdapterConfig, base: Path) -> FeedAdapterConfig:
    # Feed URLs that are not http(s) are fixture paths relative to the
    # file that declared them.
    url = adapter.url
    if url.startswith(("http://", "https://")):
        return adapter
    from dataclasses import replace

    return replace(adapter, url=str(_resolve(base, url)))


def _city_from_dict(name: str, doc: dict, base: Path, shared: dict[str, FeedAdapterConfig]) -> CityConfig:
    if "adapter" in doc:
        raw = dict(doc["adapter"])
        raw.setdefault("city", name)
        adapter = _resolve_adapter_url(adapter_from_dict(raw), base)
    elif name in shared:
        adapter = shared[name]
    else:
        raise ValueError(f"city {name!r} has no inline adapter and none in the adapters file")

    center = doc.get("center")
    if not (isinstance(center, (list, tuple)) and len(center) == 2):
        raise ValueError(f"city {name!r} needs center: [lat, lon]")

    time_doc = doc.get("time", {})
    rule = TimeRule(
        std_offset_h=float(time_doc.get("std_offset_h", -6.0)),
        uses_dst=bool(time_doc.get("dst", True)),
    )
    weather_doc = doc.get("weather", {})
    return CityConfig(
        name=name,
        adapter=adapter,
        center_lat=float(center[0]),
        center_lon=float(center[1]),
        domain_radius_m=float(doc.get("domain_radius_m", 30_000.0)),
        tracts_path=_resolve(base, doc["tracts"]) if "tracts" in doc else None,
        weather_fixture=(
            _resolve(base, weather_doc["fixture"]) if "fixture" in weather_doc else None
        ),
        weather_url=weather_doc.get("url"),
        time_rule=rule,
    )


def load_config(path: str | Path) -> ServiceConfig:
    """Parse a service config file, applying environment overrides."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ValueError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"config {path} must be a mapping at top level")
    base = path.parent.resolve()

    shared: dict[str, FeedAdapterConfig] = {}
    if "adapters" in doc:
        adapters_path = _resolve(base, doc["adapters"])
        for adapter in load_adapters(adapters_path):
            shared[adapter.city] = _resolve_adapter_url(adapter, adapters_path.parent)

    cities_doc = doc.get("cities")
    if not isinstance(cities_doc, dict) or not cities_doc:
        raise ValueError("config needs a non-empty cities mapping")
    cities = {
        name: _city_from_dict(name, city_doc or {}, base, shared)
        for name, city_doc in cities_doc.items()
    }

    solver_doc = doc.get("smoke3d", {})
    solver = SolverSettings(
        shape=tuple(int(n) for n in solver_doc.get("shape", (128, 128, 64))),
        cell=float(solver_doc.get("cell", 8.0)),
        mesh_threshold=float(solver_doc.get("mesh_threshold", 35.5)),
    )

    storage_root = _resolve(base, doc.get("storage_root", "data"))
    if ENV_STORAGE_ROOT in os.environ:
        storage_root = Path(os.environ[ENV_STORAGE_ROOT]).resolve()
    port = int(doc.get("port", 8080))
    if ENV_PORT in os.environ:
        port = int(os.environ[ENV_PORT])

    return ServiceConfig(
        storage_root=storage_root,
        cities=cities,
        port=port,
        thresholds=tuple(float(t) for t in doc.get("thresholds", DEFAULT_THRESHOLDS)),
        horizons=tuple(int(h) for h in doc.get("horizons", DEFAULT_HORIZONS)),
        risk_window_days=int(doc.get("risk_window_days", 365)),
        queue_limit=int(doc.get("queue_limit", 8)),
        workers_3d=int(doc.get("workers_3d", 2)),
        poll_interval_s=float(doc.get("poll_interval_s", 300.0)),
        solver=solver,
        geocode_fixture=_resolve(base, doc["geocode"]) if "geocode" in doc else None,
    )
