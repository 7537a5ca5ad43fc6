"""Service layer tests: config, artifact store, jobs, scheduler, HTTP API,
and the headless fixture-to-endpoints pipeline."""

import json
from datetime import datetime, timezone
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from firetwin.errors import InvalidTransition, QueueFull, UnknownJob
from firetwin.service import (
    ArtifactStore,
    JobStore,
    Smoke3dQueue,
    build_app,
    build_runtime,
    load_config,
)
from firetwin.service.config import ENV_PORT, ENV_STORAGE_ROOT

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"

# All austin feed incidents land on 2023-03-06/07 UTC; the pinned clock
# keeps them inside the risk window and the weather fixture's coverage.
CLOCK_NOW = datetime(2023, 3, 7, 0, 30, tzinfo=timezone.utc)


def _clock():
    return CLOCK_NOW


def write_config(tmp_path: Path, **overrides) -> Path:
    doc = {
        "storage_root": str(tmp_path / "data"),
        "adapters": str(FIXTURES / "adapters.json"),
        "geocode": str(FIXTURES / "geocode.json"),
        # Small grid keeps each 3D job well under a second in tests.
        "smoke3d": {"shape": [48, 48, 24], "cell": 8.0, "mesh_threshold": 35.5},
        "queue_limit": 4,
        "workers_3d": 1,
        "cities": {
            "austin": {
                "center": [30.2672, -97.7431],
                "tracts": str(FIXTURES / "tracts" / "austin.json"),
                "weather": {"fixture": str(FIXTURES / "weather" / "austin.json")},
            }
        },
    }
    doc.update(overrides)
    path = tmp_path / "service.yaml"
    path.write_text(json.dumps(doc))  # YAML is a JSON superset
    return path


@pytest.fixture()
def runtime(tmp_path):
    return build_runtime(str(write_config(tmp_path)), clock=_clock)


@pytest.fixture()
def client(tmp_path):
    app = build_app(str(write_config(tmp_path)), clock=_clock)
    with TestClient(app) as c:
        c.runtime = app.state.runtime
        yield c


# ---- config ----

def test_demo_config_loads():
    config = load_config(REPO / "config" / "demo.yaml")
    assert "austin" in config.cities
    city = config.cities["austin"]
    assert city.adapter.format == "json"
    assert Path(city.adapter.url).exists()
    assert city.tracts_path.exists()
    assert city.weather_fixture.exists()
    assert config.solver.shape == (128, 128, 64)


def test_env_overrides(tmp_path, monkeypatch):
    path = write_config(tmp_path)
    monkeypatch.setenv(ENV_PORT, "9191")
    monkeypatch.setenv(ENV_STORAGE_ROOT, str(tmp_path / "elsewhere"))
    config = load_config(path)
    assert config.port == 9191
    assert config.storage_root == (tmp_path / "elsewhere").resolve()


def test_config_requires_cities(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("storage_root: /tmp/x\n")
    with pytest.raises(ValueError):
        load_config(path)


def test_config_relative_paths_resolve_against_file(tmp_path):
    (tmp_path / "nested").mkdir()
    (tmp_path / "nested" / "tracts.json").write_text(
        json.dumps({"type": "FeatureCollection", "features": []})
    )
    path = tmp_path / "svc.yaml"
    path.write_text(
        json.dumps(
            {
                "storage_root": "store",
                "cities": {
                    "x": {
                        "center": [30.0, -97.0],
                        "tracts": "nested/tracts.json",
                        "adapter": {
                            "format": "json",
                            "url": "feed.json",
                            "field_map": {
                                "name": "n", "timestamp": "t", "lat": "la",
                                "lon": "lo", "address": "a", "department": "d",
                            },
                        },
                    }
                },
            }
        )
    )
    config = load_config(path)
    assert config.storage_root == (tmp_path / "store").resolve()
    assert config.cities["x"].tracts_path == (tmp_path / "nested" / "tracts.json").resolve()
    assert config.cities["x"].adapter.url == str((tmp_path / "feed.json").resolve())


# ---- artifact store ----

def test_artifact_roundtrip_and_dedup(tmp_path):
    store = ArtifactStore(tmp_path)
    d1 = store.put(b"hello plume", "kml")
    d2 = store.put(b"hello plume", "kml")
    assert d1 == d2
    assert store.get(d1, "kml") == b"hello plume"
    files = list((tmp_path / "objects").rglob("*.kml"))
    assert len(files) == 1


def test_artifact_distinct_content_distinct_digest(tmp_path):
    store = ArtifactStore(tmp_path)
    assert store.put(b"a", "obj") != store.put(b"b", "obj")


def test_artifact_bad_kind_and_missing(tmp_path):
    store = ArtifactStore(tmp_path)
    with pytest.raises(ValueError):
        store.put(b"x", "exe")
    with pytest.raises(KeyError):
        store.get("0" * 64, "kml")
    assert not store.has("0" * 64, "kml")


# ---- job store ----

def test_job_lifecycle_and_persistence(tmp_path):
    store = JobStore(tmp_path)
    job = store.create("plume2d", "austin", scenario={"lat": 30.0})
    assert job.state == "queued"
    store.transition(job.job_id, "running")
    done = store.transition(
        job.job_id, "done", artifacts={"1": {"kml": "a" * 64}}
    )
    assert done.state == "done"

    reloaded = JobStore(tmp_path)
    again = reloaded.get(job.job_id)
    assert again.state == "done"
    assert again.artifacts == {"1": {"kml": "a" * 64}}
    assert again.scenario == {"lat": 30.0}


def test_job_transitions_enforced(tmp_path):
    store = JobStore(tmp_path)
    job = store.create("smoke3d", "austin")
    with pytest.raises(InvalidTransition):
        store.transition(job.job_id, "done", artifacts={"1": {"obj": "b" * 64}})
    store.transition(job.job_id, "running")
    with pytest.raises(InvalidTransition):
        # done without artifacts violates the completion contract
        store.transition(job.job_id, "done")
    store.transition(job.job_id, "failed", error="boom")
    with pytest.raises(InvalidTransition):
        store.transition(job.job_id, "running")
    with pytest.raises(UnknownJob):
        store.get("nope")


def test_interrupted_jobs_fail_on_reload(tmp_path):
    store = JobStore(tmp_path)
    queued = store.create("smoke3d", "austin")
    running = store.create("smoke3d", "austin")
    store.transition(running.job_id, "running")

    reloaded = JobStore(tmp_path)
    assert reloaded.get(queued.job_id).state == "failed"
    assert reloaded.get(running.job_id).state == "failed"
    assert "restart" in reloaded.get(queued.job_id).error


# ---- queue ----

def test_queue_bounded():
    ran = []
    q = Smoke3dQueue(ran.append, limit=2, workers=1)
    q.submit("a")
    q.submit("b")
    with pytest.raises(QueueFull):
        q.submit("c")
    assert q.run_pending() == 2
    assert ran == ["a", "b"]
    q.submit("c")  # capacity freed after drain
    assert q.run_pending() == 1


def test_queue_workers_drain():
    import threading

    done = threading.Event()
    seen = []

    def runner(job_id):
        seen.append(job_id)
        if len(seen) == 3:
            done.set()

    q = Smoke3dQueue(runner, limit=8, workers=2)
    q.start()
    try:
        for name in ("a", "b", "c"):
            q.submit(name)
        assert done.wait(timeout=10.0)
    finally:
        q.stop()
    assert sorted(seen) == ["a", "b", "c"]


# ---- scheduler ----

def test_tick_ingests_and_creates_job_pairs(runtime):
    reports = runtime.scheduler.tick()
    assert len(reports) == 1
    report = reports[0]
    assert report.ok and len(report.new_ids) == 3
    kinds = [k for k, _ in report.jobs]
    assert kinds.count("plume2d") == 3 and kinds.count("smoke3d") == 3
    # 2D ran inline; 3D waits in the queue.
    for kind, job_id in report.jobs:
        state = runtime.jobs.get(job_id).state
        assert state == ("done" if kind == "plume2d" else "queued")
    assert runtime.queue.depth == 3


def test_replayed_feed_is_idempotent(runtime):
    for _ in range(3):
        runtime.scheduler.tick()
    runtime.queue.run_pending()
    stored = runtime.incidents.read_range(
        "austin",
        datetime(2023, 3, 1, tzinfo=timezone.utc),
        datetime(2023, 3, 8, tzinfo=timezone.utc),
    )
    assert len(stored) == 3
    jobs = runtime.jobs.all()
    assert len(jobs) == 6  # one pair per incident, not per tick
    by_incident = {}
    for job in jobs:
        by_incident.setdefault(job.incident_id, []).append(job.kind)
    assert all(sorted(kinds) == ["plume2d", "smoke3d"] for kinds in by_incident.values())


def test_restart_does_not_remint_jobs(tmp_path):
    path = write_config(tmp_path)
    first = build_runtime(str(path), clock=_clock)
    first.scheduler.tick()
    first.queue.run_pending()

    second = build_runtime(str(path), clock=_clock)
    reports = second.scheduler.tick()
    assert reports[0].new_ids == []
    assert reports[0].jobs == []


def test_city_failure_isolated(tmp_path):
    adapter = {
        "format": "json",
        "url": str(tmp_path / "missing feed.json"),
        "field_map": {
            "name": "n", "timestamp": "t", "lat": "la",
            "lon": "lo", "address": "a", "department": "d",
        },
    }
    cities = {
        "austin": {
            "center": [30.2672, -97.7431],
            "tracts": str(FIXTURES / "tracts" / "austin.json"),
            "weather": {"fixture": str(FIXTURES / "weather" / "austin.json")},
        },
        "ghosttown": {"center": [35.0, -100.0], "adapter": adapter},
    }
    runtime = build_runtime(str(write_config(tmp_path, cities=cities)), clock=_clock)
    reports = {r.city: r for r in runtime.scheduler.tick()}
    assert reports["austin"].ok and len(reports["austin"].new_ids) == 3
    assert not reports["ghosttown"].ok
    assert reports["ghosttown"].error


# ---- HTTP API ----

def test_fires_unknown_city(client):
    assert client.get("/fires", params={"city": "gotham"}).status_code == 404


def test_fires_empty_then_populated(client):
    empty = client.get("/fires", params={"city": "austin"}).json()
    assert empty["count"] == 0 and empty["incidents"] == []

    client.runtime.scheduler.tick()
    client.runtime.queue.run_pending()
    body = client.get("/fires", params={"city": "austin"}).json()
    assert body["count"] == 3
    for row in body["incidents"]:
        assert row["status"] == "active"
        assert set(row["jobs"]) == {"plume2d", "smoke3d"}
        for ref in row["jobs"].values():
            assert ref["state"] == "done"
            assert set(ref["links"]) == {"1", "2", "3"}


def test_fires_pagination(client):
    client.runtime.scheduler.tick()
    page1 = client.get("/fires", params={"city": "austin", "page_size": 2}).json()
    page2 = client.get("/fires", params={"city": "austin", "page": 2, "page_size": 2}).json()
    beyond = client.get("/fires", params={"city": "austin", "page": 9}).json()
    assert len(page1["incidents"]) == 2
    assert len(page2["incidents"]) == 1
    assert beyond["incidents"] == []
    ids = {r["id"] for r in page1["incidents"]} | {r["id"] for r in page2["incidents"]}
    assert len(ids) == 3


def test_risk_etag_stable_until_recompute(client):
    first = client.get("/risk", params={"city": "austin"})
    second = client.get("/risk", params={"city": "austin"})
    assert first.status_code == 200
    assert first.headers["etag"] == second.headers["etag"]
    assert (
        client.get(
            "/risk", params={"city": "austin"},
            headers={"If-None-Match": first.headers["etag"]},
        ).status_code
        == 304
    )
    # Ingest changes the counts, so the recomputed layer gets a new tag.
    client.runtime.scheduler.tick()
    third = client.get("/risk", params={"city": "austin"})
    assert third.headers["etag"] != first.headers["etag"]
    assert len(third.json()["features"]) == 17


def test_scenario_inline_footprints_and_job(client):
    resp = client.post(
        "/scenario",
        json={
            "lat": 30.28, "lon": -97.74, "category": "brush fire",
            "when": "2023-03-07T00:00:00Z",
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert sorted(body["footprints"]) == ["1", "2", "3"]
    assert body["calm"] is False
    for fc in body["footprints"].values():
        assert fc["type"] == "FeatureCollection" and fc["features"]

    job_id = body["job_id"]
    pending = client.get(f"/smoke/{job_id}/2.obj")
    assert pending.status_code == 409
    assert pending.json()["state"] == "queued"

    client.runtime.queue.run_pending()
    assert client.get(f"/jobs/{job_id}").json()["state"] == "done"
    obj = client.get(f"/smoke/{job_id}/2.obj")
    assert obj.status_code == 200
    assert obj.text.startswith("# smoke isosurface")
    grid = client.get(f"/smoke/{job_id}/2.grid")
    assert grid.status_code == 200
    assert grid.content[:4] == b"FTG1"
    assert grid.headers["content-type"] == "application/octet-stream"


def test_scenario_calm_wind_flagged(client):
    resp = client.post(
        "/scenario",
        json={
            "lat": 30.28, "lon": -97.74, "category": "car fire",
            "wind_speed": 0.0, "when": "2023-03-07T00:00:00Z",
        },
    )
    assert resp.status_code == 200
    assert resp.json()["calm"] is True


def test_scenario_outside_domain(client):
    far = client.post("/scenario", json={"lat": 45.0, "lon": -120.0, "category": "brush"})
    near = client.post("/scenario", json={"lat": 30.7672, "lon": -97.7431, "category": "brush"})
    assert far.status_code == 422
    assert near.status_code == 422


def test_scenario_queue_full_returns_429(client):
    codes = []
    for i in range(6):
        resp = client.post(
            "/scenario",
            json={
                "lat": 30.28, "lon": -97.74, "category": "trash fire",
                "wind_speed": 3.0 + 0.1 * i, "when": "2023-03-07T00:00:00Z",
            },
        )
        codes.append(resp.status_code)
    assert codes[:4] == [200] * 4  # queue_limit is 4
    assert codes[4:] == [429, 429]
    # The rejected requests left no stray jobs behind.
    assert len(client.runtime.jobs.all()) == 8


def test_smoke_artifact_errors(client):
    resp = client.post(
        "/scenario",
        json={
            "lat": 30.28, "lon": -97.74, "category": "brush fire",
            "when": "2023-03-07T00:00:00Z",
        },
    )
    body = resp.json()
    job_id = body["job_id"]
    job2d = body["plume2d_job_id"]
    client.runtime.queue.run_pending()

    assert client.get("/smoke/doesnotexist/1.obj").status_code == 404
    assert client.get(f"/smoke/{job_id}/9.obj").status_code == 404
    assert client.get(f"/smoke/{job_id}/1.kml").status_code == 404  # wrong kind
    assert client.get(f"/smoke/{job2d}/1.obj").status_code == 404  # wrong kind
    assert client.get(f"/smoke/{job_id}/1.pdf").status_code == 404
    kml = client.get(f"/smoke/{job2d}/1.kml")
    assert kml.status_code == 200
    assert kml.headers["content-type"].startswith("application/vnd.google-earth.kml")


def test_identical_scenarios_share_artifacts(client):
    body = {
        "lat": 30.28, "lon": -97.74, "category": "dumpster fire",
        "wind_speed": 4.0, "wind_from_direction": 180.0,
        "when": "2023-03-07T00:00:00Z",
    }
    first = client.post("/scenario", json=body).json()
    client.runtime.queue.run_pending()
    second = client.post("/scenario", json=body).json()
    client.runtime.queue.run_pending()

    job_a = client.get(f"/jobs/{first['job_id']}").json()
    job_b = client.get(f"/jobs/{second['job_id']}").json()
    assert job_a["artifacts"] == job_b["artifacts"]  # content addressing dedups


def test_job_unknown_404(client):
    assert client.get("/jobs/nope").status_code == 404


def test_worker_threads_complete_scenario_job(client):
    client.runtime.queue.start()
    try:
        resp = client.post(
            "/scenario",
            json={
                "lat": 30.28, "lon": -97.74, "category": "grass fire",
                "when": "2023-03-07T00:00:00Z",
            },
        )
        job_id = resp.json()["job_id"]
        import time

        deadline = time.monotonic() + 30.0
        state = None
        while time.monotonic() < deadline:
            state = client.get(f"/jobs/{job_id}").json()["state"]
            if state in ("done", "failed"):
                break
            time.sleep(0.05)
    finally:
        client.runtime.queue.stop()
    assert state == "done"
    assert client.get(f"/smoke/{job_id}/3.obj").status_code == 200


# ---- API schema ----

def _schema_validator(def_name):
    import jsonschema

    doc = json.loads((REPO / "api_schema.json").read_text())
    schema = {"$ref": f"#/$defs/{def_name}", "$defs": doc["$defs"]}
    return jsonschema.Draft202012Validator(schema)


def test_responses_validate_against_published_schema(client):
    client.runtime.scheduler.tick()
    client.runtime.queue.run_pending()

    _schema_validator("Health").validate(client.get("/healthz").json())
    _schema_validator("CityList").validate(client.get("/cities").json())
    fires = client.get("/fires", params={"city": "austin"}).json()
    _schema_validator("FiresPage").validate(fires)
    _schema_validator("RiskLayer").validate(
        client.get("/risk", params={"city": "austin"}).json()
    )
    scenario = client.post(
        "/scenario",
        json={
            "lat": 30.28, "lon": -97.74, "category": "brush fire",
            "when": "2023-03-07T00:00:00Z",
        },
    ).json()
    _schema_validator("ScenarioResponse").validate(scenario)
    client.runtime.queue.run_pending()
    _schema_validator("Job").validate(
        client.get(f"/jobs/{scenario['job_id']}").json()
    )
    _schema_validator("Error").validate(
        client.get("/fires", params={"city": "gotham"}).json()
    )


# ---- full pipeline, headless ----

def test_full_pipeline_feed_to_served_artifacts(tmp_path):
    """Fixture feed -> ingest -> weather fixture -> 2D + 3D artifacts on
    disk -> every GET endpoint serves them. No browser, no frontend."""
    config_path = write_config(tmp_path)
    app = build_app(str(config_path), clock=_clock)
    runtime = app.state.runtime

    with TestClient(app) as client:
        reports = runtime.scheduler.tick()
        assert reports[0].ok
        assert runtime.queue.run_pending() == 3

        # Artifacts landed on disk, content-addressed.
        objects = list((runtime.config.storage_root / "artifacts" / "objects").rglob("*"))
        by_ext = {}
        for path in objects:
            if path.is_file():
                by_ext.setdefault(path.suffix, []).append(path)
        # 3 incidents x 3 horizons per kind (dedup may collapse some).
        assert len(by_ext[".kml"]) >= 3
        assert len(by_ext[".geojson"]) >= 3
        assert len(by_ext[".obj"]) >= 3
        assert len(by_ext[".grid"]) >= 3

        fires = client.get("/fires", params={"city": "austin"}).json()
        assert fires["count"] == 3
        served = 0
        for row in fires["incidents"]:
            for ref in row["jobs"].values():
                for links in ref["links"].values():
                    for url in links.values():
                        resp = client.get(url)
                        assert resp.status_code == 200, url
                        assert len(resp.content) > 0
                        served += 1
        # Per incident: 3 horizons x (kml+geojson) + 3 horizons x (obj+grid+json).
        assert served == 3 * (3 * 2 + 3 * 3)

        risk = client.get("/risk", params={"city": "austin"})
        assert risk.status_code == 200 and risk.json()["features"]

        for job in runtime.jobs.all():
            assert client.get(f"/jobs/{job.job_id}").json()["state"] == "done"
