"""HTTP API over the prediction pipeline.

build_runtime wires the stores, providers, pipeline, queue, and
scheduler from one config; build_app wraps that in a FastAPI app. The
scheduler loop and queue workers only start inside the app lifespan
when requested, so importing the app or driving it from tests never
spawns background threads unasked.
"""

from __future__ import annotations

import math
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass
from datetime import datetime
from typing import Callable

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from firetwin.errors import FiretwinError, OutOfFrame, QueueFull, UnknownJob
from firetwin.geo import LocalFrame, project_enu
from firetwin.ingest import FixtureGeocoder, IncidentStore
from firetwin.plume2d import export_geojson
from firetwin.service.artifacts import CONTENT_TYPES, ArtifactStore
from firetwin.service.config import CityConfig, ServiceConfig, load_config
from firetwin.service.jobs import KIND_ARTIFACTS, JobRecord, JobStore, Smoke3dQueue
from firetwin.service.pipeline import Pipeline
from firetwin.service.scheduler import Scheduler
from firetwin.weather import FixtureWeatherProvider, HttpWeatherAdapter

MAX_PAGE_SIZE = 500


@dataclass
class Runtime:
    config: ServiceConfig
    artifacts: ArtifactStore
    jobs: JobStore
    incidents: IncidentStore
    pipeline: Pipeline
    queue: Smoke3dQueue
    scheduler: Scheduler


def build_runtime(
    config: ServiceConfig | str, clock: Callable[[], datetime] | None = None
) -> Runtime:
    if not isinstance(config, ServiceConfig):
        config = load_config(config)
    config.storage_root.mkdir(parents=True, exist_ok=True)
    artifacts = ArtifactStore(config.storage_root / "artifacts")
    jobs = JobStore(config.storage_root / "jobs")
    incidents = IncidentStore(config.storage_root / "incidents")

    providers: dict[str, object] = {}
    for name, city in config.cities.items():
        if city.weather_fixture is not None:
            providers[name] = FixtureWeatherProvider(city.weather_fixture)
        elif city.weather_url is not None:
            providers[name] = HttpWeatherAdapter(city.weather_url)

    pipeline = Pipeline(config, artifacts, jobs, incidents, providers, clock=clock)
    queue = Smoke3dQueue(
        pipeline.run_smoke3d_job, limit=config.queue_limit, workers=config.workers_3d
    )
    geocoder = (
        FixtureGeocoder(config.geocode_fixture)
        if config.geocode_fixture is not None
        else None
    )
    scheduler = Scheduler(
        config, pipeline, incidents, jobs, queue, geocoder=geocoder, clock=clock
    )
    return Runtime(
        config=config,
        artifacts=artifacts,
        jobs=jobs,
        incidents=incidents,
        pipeline=pipeline,
        queue=queue,
        scheduler=scheduler,
    )


class ScenarioRequest(BaseModel):
    lat: float = Field(ge=-90.0, le=90.0)
    lon: float = Field(ge=-180.0, le=180.0)
    category: str = Field(min_length=1, max_length=200)
    city: str | None = None
    wind_speed: float | None = Field(default=None, ge=0.0, le=80.0)
    wind_from_direction: float | None = Field(default=None, ge=0.0, lt=360.0)
    when: datetime | None = None
    horizons: list[int] | None = None


def _locate_city(config: ServiceConfig, req: ScenarioRequest) -> CityConfig:
    """The scenario's city, by name or by containment in a domain."""
    candidates = (
        [config.cities[req.city]]
        if req.city is not None and req.city in config.cities
        else list(config.cities.values())
        if req.city is None
        else []
    )
    best = None
    for city in candidates:
        frame = LocalFrame.at(city.center_lat, city.center_lon)
        try:
            x, y = project_enu(req.lat, req.lon, frame)
        except OutOfFrame:
            # Beyond the frame's validity is beyond any domain radius.
            continue
        dist = math.hypot(x, y)
        if dist <= city.domain_radius_m and (best is None or dist < best[0]):
            best = (dist, city)
    if best is None:
        raise HTTPException(
            status_code=422,
            detail=f"({req.lat:.4f}, {req.lon:.4f}) is outside every configured city domain",
        )
    return best[1]


def _artifact_links(job: JobRecord) -> dict:
    return {
        h: {
            ext: f"/smoke/{job.job_id}/{h}.{ext}"
            for ext in exts
            if ext in KIND_ARTIFACTS[job.kind]
        }
        for h, exts in job.artifacts.items()
    }


def _job_json(job: JobRecord) -> dict:
    doc = job.to_json()
    doc["links"] = _artifact_links(job)
    return doc


def build_app(
    config: ServiceConfig | str,
    clock: Callable[[], datetime] | None = None,
    run_background: bool = False,
) -> FastAPI:
    runtime = build_runtime(config, clock=clock)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        stop_poll = threading.Event()
        poller = None
        if run_background:
            runtime.queue.start()

            def _poll():
                while not stop_poll.wait(runtime.config.poll_interval_s):
                    runtime.scheduler.tick()

            poller = threading.Thread(target=_poll, name="scheduler", daemon=True)
            poller.start()
            runtime.scheduler.tick()
        yield
        if run_background:
            stop_poll.set()
            if poller is not None:
                poller.join(timeout=5.0)
            runtime.queue.stop()

    app = FastAPI(title="firetwin", lifespan=lifespan)
    app.state.runtime = runtime
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    def _city_or_404(name: str) -> CityConfig:
        city = runtime.config.cities.get(name)
        if city is None:
            raise HTTPException(status_code=404, detail=f"unknown city {name!r}")
        return city

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "queue_depth": runtime.queue.depth}

    @app.get("/cities")
    def cities():
        return {
            "cities": [
                {
                    "city": name,
                    "center": {"lat": c.center_lat, "lon": c.center_lon},
                    "domain_radius_m": c.domain_radius_m,
                    "has_risk_layer": c.tracts_path is not None,
                }
                for name, c in runtime.config.cities.items()
            ]
        }

    @app.get("/fires")
    def fires(city: str, page: int = 1, page_size: int = 50):
        _city_or_404(city)
        if page < 1 or not 1 <= page_size <= MAX_PAGE_SIZE:
            raise HTTPException(status_code=422, detail="bad pagination parameters")
        incidents = runtime.scheduler.active_incidents(city)
        start = (page - 1) * page_size
        rows = []
        for incident in incidents[start : start + page_size]:
            jobs = {}
            for job in runtime.jobs.by_incident(incident.id):
                # Latest job per kind wins (list is oldest first).
                jobs[job.kind] = {
                    "job_id": job.job_id,
                    "state": job.state,
                    "links": _artifact_links(job),
                }
            rows.append(dict(incident.to_json(), jobs=jobs))
        return {
            "city": city,
            "count": len(incidents),
            "page": page,
            "page_size": page_size,
            "incidents": rows,
        }

    @app.get("/risk")
    def risk(city: str, request: Request):
        cfg = _city_or_404(city)
        try:
            doc, etag = runtime.pipeline.risk_layer(cfg)
        except FiretwinError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        return JSONResponse(doc, headers={"ETag": etag})

    @app.post("/scenario")
    def scenario(req: ScenarioRequest):
        city = _locate_city(runtime.config, req)
        horizons = tuple(req.horizons) if req.horizons else runtime.config.horizons
        if any(h not in runtime.config.horizons for h in horizons):
            raise HTTPException(
                status_code=422,
                detail=f"horizons must be a subset of {list(runtime.config.horizons)}",
            )
        try:
            payload = runtime.pipeline.build_payload(
                city,
                req.lat,
                req.lon,
                req.category,
                when=req.when,
                wind_speed=req.wind_speed,
                wind_from_direction=req.wind_from_direction,
            )
        except FiretwinError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

        # Reserve queue capacity before doing any work: a full queue
        # must reject the request without side effects.
        if runtime.queue.depth >= runtime.config.queue_limit:
            raise HTTPException(status_code=429, detail="simulation queue full")

        job2d, job3d = runtime.pipeline.create_jobs(city, payload)
        try:
            runtime.queue.submit(job3d.job_id)
        except QueueFull as exc:
            runtime.jobs.transition(job3d.job_id, "running")
            runtime.jobs.transition(job3d.job_id, "failed", error=str(exc))
            raise HTTPException(status_code=429, detail=str(exc)) from exc

        footprints = runtime.pipeline.footprints_2d(payload, horizons)
        return {
            "city": city.name,
            "job_id": job3d.job_id,
            "state": runtime.jobs.get(job3d.job_id).state,
            "plume2d_job_id": job2d.job_id,
            "calm": bool(payload["calm"]),
            "weather": payload["weather"],
            "footprints": {
                str(h): export_geojson(fp) for h, fp in footprints.items()
            },
            "links": {
                "job": f"/jobs/{job3d.job_id}",
                "plume2d": _artifact_links(job2d),
            },
        }

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        try:
            job = runtime.jobs.get(job_id)
        except UnknownJob as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return _job_json(job)

    @app.get("/smoke/{job_id}/{name}")
    def smoke_artifact(job_id: str, name: str):
        horizon, sep, ext = name.partition(".")
        if not sep or ext not in CONTENT_TYPES or not horizon.isdigit():
            raise HTTPException(status_code=404, detail=f"no artifact route {name!r}")
        try:
            job = runtime.jobs.get(job_id)
        except UnknownJob as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        if ext not in KIND_ARTIFACTS[job.kind]:
            raise HTTPException(
                status_code=404,
                detail=f"{job.kind} jobs have no .{ext} artifacts",
            )
        if int(horizon) not in runtime.config.horizons:
            raise HTTPException(status_code=404, detail=f"unknown horizon {horizon}")
        if job.state in ("queued", "running"):
            return JSONResponse(
                {"state": job.state, "job_id": job.job_id}, status_code=409
            )
        if job.state == "failed":
            return JSONResponse(
                {"state": job.state, "job_id": job.job_id, "error": job.error},
                status_code=409,
            )
        digest = job.artifacts.get(horizon, {}).get(ext)
        if digest is None:
            raise HTTPException(
                status_code=404, detail=f"job has no {ext} artifact for horizon {horizon}"
            )
        data = runtime.artifacts.get(digest, ext)
        return Response(content=data, media_type=CONTENT_TYPES[ext])

    return app
