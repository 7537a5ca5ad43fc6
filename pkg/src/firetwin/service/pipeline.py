"""Prediction pipeline: weather + emission lookup -> 2D footprints and
3D voxel runs -> content-addressed artifacts.

Job payloads are frozen at creation time: the weather sample, emission
spec, and derived wind are resolved once and stored on the job, so a 3D
run dequeued minutes later simulates the same conditions the inline 2D
answer used, and a replayed job is deterministic.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from datetime import datetime, timedelta, timezone
from typing import Callable

import numpy as np

from firetwin.calibrate import CALIBRATED_SOURCE_SCALE, calibrated_config
from firetwin.errors import FiretwinError
from firetwin.geo import LocalFrame, OccupancyGrid
from firetwin.ingest import IncidentStore
from firetwin.plume2d import (
    DEFAULT_PROFILE,
    EmissionSpec,
    PlumeFootprint,
    export_geojson,
    export_kml,
    isopleths,
    make_params,
)
from firetwin.risk import aggregate_by_tract, classify, load_tracts, risk_geojson
from firetwin.service.artifacts import ArtifactStore
from firetwin.service.config import CityConfig, ServiceConfig
from firetwin.service.jobs import JobRecord, JobStore
from firetwin.smoke3d import init_scene, run_to_horizons, snapshot
from firetwin.smoke3d.state import EmissionSpec as VoxelEmission
from firetwin.weather import (
    PasquillClass,
    WeatherSample,
    fetch_weather,
    solar_elevation_deg,
    stability_class,
    wind_vector,
)

log = logging.getLogger(__name__)

# Fraction of the 3D domain left upwind of the source. The rest is
# downwind fetch, where the plume actually goes.
_UPWIND_FRACTION = 0.3


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Pipeline:
    def __init__(
        self,
        config: ServiceConfig,
        artifacts: ArtifactStore,
        jobs: JobStore,
        incidents: IncidentStore,
        weather_providers: dict[str, object],
        clock: Callable[[], datetime] | None = None,
    ):
        self.config = config
        self.artifacts = artifacts
        self.jobs = jobs
        self.incidents = incidents
        self.weather_providers = weather_providers
        self.clock = clock or _utcnow
        self._risk_lock = threading.Lock()
        self._risk_cache: dict[str, tuple[str, dict]] = {}

    # ---- scenario payloads ----

    def build_payload(
        self,
        city: CityConfig,
        lat: float,
        lon: float,
        category: str,
        when: datetime | None = None,
        wind_speed: float | None = None,
        wind_from_direction: float | None = None,
    ) -> dict:
        """Resolve weather and emissions into a self-contained job payload."""
        when = when or self.clock()
        if when.tzinfo is None:
            when = when.replace(tzinfo=timezone.utc)
        if wind_speed is not None:
            sample = WeatherSample(
                wind_speed=float(wind_speed),
                wind_from_direction=float(wind_from_direction or 0.0),
                humidity=50.0,
                cloud_cover=0.5,
                timestamp=when,
                lat=lat,
                lon=lon,
            )
        else:
            provider = self.weather_providers.get(city.name)
            if provider is None:
                raise FiretwinError(
                    f"city {city.name!r} has no weather provider and no wind override was given"
                )
            sample = fetch_weather(lat, lon, when, provider=provider)

        emission = DEFAULT_PROFILE.lookup(category)
        stability = stability_class(sample, solar_elevation_deg(lat, lon, when))
        params = make_params(
            q=emission.q,
            wind_speed=sample.wind_speed,
            wind_toward=wind_vector(sample),
            stability=stability,
            source_radius=emission.radius,
        )
        return {
            "lat": float(lat),
            "lon": float(lon),
            "category": category,
            "when": when.isoformat(),
            "q_ugs": emission.q,
            "source_radius_m": emission.radius,
            "duration_h": emission.duration_h,
            "wind_speed_ms": params.u,
            "wind_toward": [params.wind_toward[0], params.wind_toward[1]],
            "stability": stability.value,
            "calm": params.calm,
            "weather": {
                "wind_from_direction": sample.wind_from_direction,
                "humidity": sample.humidity,
                "cloud_cover": sample.cloud_cover,
                "override": wind_speed is not None,
            },
        }

    # ---- 2D route ----

    def footprints_2d(self, payload: dict, horizons=None) -> dict[int, PlumeFootprint]:
        params = make_params(
            q=payload["q_ugs"],
            wind_speed=payload["wind_speed_ms"],
            wind_toward=tuple(payload["wind_toward"]),
            stability=PasquillClass(payload["stability"]),
            source_radius=payload["source_radius_m"],
        )
        frame = LocalFrame.at(payload["lat"], payload["lon"])
        generated_at = datetime.fromisoformat(payload["when"])
        return {
            h: isopleths(
                params,
                thresholds=self.config.thresholds,
                horizon_h=h,
                frame=frame,
                generated_at=generated_at,
            )
            for h in (horizons or self.config.horizons)
        }

    def run_plume2d_job(self, job_id: str) -> JobRecord:
        """Runner for 2D jobs: synchronous, called at enqueue time."""
        self.jobs.transition(job_id, "running")
        job = self.jobs.get(job_id)
        try:
            footprints = self.footprints_2d(job.scenario)
            artifacts: dict[str, dict[str, str]] = {}
            for h, fp in footprints.items():
                kml = export_kml(fp).encode("utf-8")
                geojson = json.dumps(export_geojson(fp)).encode("utf-8")
                artifacts[str(h)] = {
                    "kml": self.artifacts.put(kml, "kml"),
                    "geojson": self.artifacts.put(geojson, "geojson"),
                }
            return self.jobs.transition(job_id, "done", artifacts=artifacts)
        except Exception as exc:
            log.exception("plume2d job %s failed", job_id)
            return self.jobs.transition(job_id, "failed", error=str(exc))

    # ---- 3D route ----

    def _forecast_grid(self, payload: dict) -> tuple[OccupancyGrid, LocalFrame]:
        """Flat-terrain domain shifted so most of it lies downwind."""
        nx, ny, nz = self.config.solver.shape
        cell = self.config.solver.cell
        ux, uy = payload["wind_toward"]
        # Source sits _UPWIND_FRACTION of the way in along the wind axis.
        shift_x = (0.5 - _UPWIND_FRACTION) * nx * cell * ux
        shift_y = (0.5 - _UPWIND_FRACTION) * ny * cell * uy
        x0 = -0.5 * nx * cell + shift_x
        y0 = -0.5 * ny * cell + shift_y
        grid = OccupancyGrid(
            solid=np.zeros((nx, ny, nz), dtype=bool),
            cell=cell,
            x0=x0,
            y0=y0,
            z0=0.0,
            ground=np.zeros((nx, ny), dtype=np.float64),
        )
        return grid, LocalFrame.at(payload["lat"], payload["lon"])

    def run_smoke3d_job(self, job_id: str) -> JobRecord:
        """Runner handed to the bounded queue; exceptions become failed state."""
        self.jobs.transition(job_id, "running")
        job = self.jobs.get(job_id)
        try:
            payload = job.scenario
            grid, frame = self._forecast_grid(payload)
            u = payload["wind_speed_ms"]
            ux, uy = payload["wind_toward"]
            # The calibration scale maps the 2D emission rate onto the
            # voxel source so both routes paint comparable footprints.
            emission = VoxelEmission(
                q=payload["q_ugs"] * CALIBRATED_SOURCE_SCALE,
                radius=max(payload["source_radius_m"], grid.cell),
                duration_h=payload["duration_h"],
            )
            state = init_scene(
                grid,
                wind=(u * ux, u * uy),
                source_lonlat=(payload["lon"], payload["lat"]),
                emission=emission,
                frame=frame,
            )
            cfg = calibrated_config(u * ux, u * uy)
            if tuple(cfg.snapshot_hours) != tuple(self.config.horizons):
                from dataclasses import replace as dc_replace

                cfg = dc_replace(cfg, snapshot_hours=tuple(self.config.horizons))
            results = run_to_horizons(state, cfg)
            generated_at = datetime.fromisoformat(payload["when"])
            artifacts: dict[str, dict[str, str]] = {}
            for hr in results:
                snap = snapshot(
                    state,
                    hour=hr.hour,
                    iso_threshold=self.config.solver.mesh_threshold,
                    frame=frame,
                    density=hr.density,
                    sim_time=hr.sim_time,
                    generated_at=generated_at,
                )
                obj_bytes = snap.obj_text().encode("utf-8")
                meta = dict(snap.metadata)
                meta["source"] = {"lon": payload["lon"], "lat": payload["lat"]}
                meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
                artifacts[str(hr.hour)] = {
                    "obj": self.artifacts.put(obj_bytes, "obj"),
                    "grid": self.artifacts.put(snap.raw_grid, "grid"),
                    "json": self.artifacts.put(meta_bytes, "json"),
                }
            return self.jobs.transition(job_id, "done", artifacts=artifacts)
        except Exception as exc:
            log.exception("smoke3d job %s failed", job_id)
            return self.jobs.transition(job_id, "failed", error=str(exc))

    # ---- job creation ----

    def create_jobs(
        self, city: CityConfig, payload: dict, incident_id: str | None = None
    ) -> tuple[JobRecord, JobRecord]:
        """One plume2d job (run immediately) and one smoke3d job (queued).

        The 3D job is only created, not started; the caller decides
        whether it goes to the worker queue or runs synchronously.
        """
        scenario = dict(payload, city=city.name)
        job2d = self.jobs.create("plume2d", city.name, incident_id=incident_id, scenario=scenario)
        job2d = self.run_plume2d_job(job2d.job_id)
        job3d = self.jobs.create("smoke3d", city.name, incident_id=incident_id, scenario=scenario)
        return job2d, job3d

    # ---- risk layer ----

    def invalidate_risk(self, city_name: str) -> None:
        with self._risk_lock:
            self._risk_cache.pop(city_name, None)

    def risk_layer(self, city: CityConfig) -> tuple[dict, str]:
        """(GeoJSON document, ETag). Cached until the next ingest for the
        city; the tag is a content hash, so an ingest that changes
        nothing keeps the old tag."""
        with self._risk_lock:
            cached = self._risk_cache.get(city.name)
        if cached is not None:
            etag, doc = cached
            return doc, etag
        if city.tracts_path is None:
            raise FiretwinError(f"city {city.name!r} has no tracts file configured")
        tracts = load_tracts(city.tracts_path)
        end = self.clock()
        start = end - timedelta(days=self.config.risk_window_days)
        incidents = self.incidents.read_range(city.name, start, end)
        counts = aggregate_by_tract(incidents, tracts, (start, end))
        risks = classify(tracts, counts, (start, end))
        doc = risk_geojson(risks)
        doc["city"] = city.name
        doc["window"] = {"start": start.isoformat(), "end": end.isoformat()}
        etag = hashlib.sha256(
            json.dumps(doc, sort_keys=True).encode("utf-8")
        ).hexdigest()[:32]
        with self._risk_lock:
            self._risk_cache[city.name] = (etag, doc)
        return doc, etag
