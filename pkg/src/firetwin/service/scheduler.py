"""Periodic ingest: fetch each city's feed, diff against the active
set, store new incidents, and kick off prediction jobs.

Each city ticks inside its own try/except, so one unreachable feed
never stalls the others. Idempotency comes from two layers: diff_active
suppresses incidents already in the in-memory active set, and seen_ids
(seeded from the incident store at startup) suppresses re-ingest after
a restart, so replaying the same feed N times stores one incident and
creates one job pair.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Callable

import httpx

from firetwin.errors import QueueFull
from firetwin.ingest import FireIncident, IncidentStore, diff_active, parse_feed
from firetwin.service.config import ServiceConfig
from firetwin.service.jobs import JobStore, Smoke3dQueue
from firetwin.service.pipeline import Pipeline

log = logging.getLogger(__name__)

_FETCH_TIMEOUT_S = 10.0


@dataclass
class TickReport:
    city: str
    ok: bool
    new_ids: list[str] = field(default_factory=list)
    resolved_ids: list[str] = field(default_factory=list)
    jobs: list[tuple[str, str]] = field(default_factory=list)  # (kind, job_id)
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "city": self.city,
            "ok": self.ok,
            "new": self.new_ids,
            "resolved": self.resolved_ids,
            "jobs": [{"kind": k, "job_id": j} for k, j in self.jobs],
            "error": self.error,
        }


def _fetch(url: str) -> bytes:
    if url.startswith(("http://", "https://")):
        resp = httpx.get(url, timeout=_FETCH_TIMEOUT_S, follow_redirects=True)
        resp.raise_for_status()
        return resp.content
    return Path(url).read_bytes()


class Scheduler:
    def __init__(
        self,
        config: ServiceConfig,
        pipeline: Pipeline,
        incidents: IncidentStore,
        jobs: JobStore,
        queue: Smoke3dQueue,
        geocoder=None,
        clock: Callable[[], datetime] | None = None,
    ):
        self.config = config
        self.pipeline = pipeline
        self.incidents = incidents
        self.jobs = jobs
        self.queue = queue
        self.geocoder = geocoder
        self.clock = clock or (lambda: datetime.now(timezone.utc))
        self.active: dict[str, dict[str, FireIncident]] = {
            name: {} for name in config.cities
        }
        # Replaying history arms the dedupe sets so a restart against an
        # unchanged feed does not mint duplicate incidents or jobs.
        self.seen_ids: set[str] = set()
        end = self.clock()
        start = end - timedelta(days=config.risk_window_days)
        for name in config.cities:
            for incident in self.incidents.read_range(name, start, end):
                self.seen_ids.add(incident.id)
                if incident.status == "active":
                    self.active[name][incident.id] = incident

    def active_incidents(self, city_name: str) -> list[FireIncident]:
        return sorted(
            self.active.get(city_name, {}).values(), key=lambda i: (i.timestamp, i.id)
        )

    def tick(self, only_city: str | None = None) -> list[TickReport]:
        reports = []
        for name, city in self.config.cities.items():
            if only_city is not None and name != only_city:
                continue
            try:
                reports.append(self._tick_city(name, city))
            except Exception as exc:  # isolation: a city failure is a report, not a crash
                log.exception("tick failed for %s", name)
                reports.append(TickReport(city=name, ok=False, error=str(exc)))
        return reports

    def _tick_city(self, name: str, city) -> TickReport:
        report = TickReport(city=name, ok=True)
        raw = _fetch(city.adapter.url)
        current = parse_feed(
            raw, city.adapter, fetch_time=self.clock(), geocoder=self.geocoder
        )
        delta = diff_active(list(self.active[name].values()), current)

        fresh = [i for i in delta.new if i.id not in self.seen_ids]
        if fresh:
            self.incidents.append_many(fresh)
            self.seen_ids.update(i.id for i in fresh)
            self.pipeline.invalidate_risk(name)
        for incident in fresh:
            report.new_ids.append(incident.id)
            try:
                payload = self.pipeline.build_payload(
                    city,
                    incident.lat,
                    incident.lon,
                    incident.name,
                    when=incident.timestamp,
                )
                job2d, job3d = self.pipeline.create_jobs(
                    city, payload, incident_id=incident.id
                )
                report.jobs.append(("plume2d", job2d.job_id))
                report.jobs.append(("smoke3d", job3d.job_id))
                try:
                    self.queue.submit(job3d.job_id)
                except QueueFull:
                    # Failing needs the two-step because queued jobs may
                    # only move to running.
                    self.jobs.transition(job3d.job_id, "running")
                    self.jobs.transition(
                        job3d.job_id, "failed", error="simulation queue full"
                    )
                    log.warning("queue full, smoke3d job %s failed fast", job3d.job_id)
            except Exception as exc:
                # A bad prediction (weather gap, solver error) must not
                # block storing the rest of the feed.
                log.exception("prediction for incident %s failed", incident.id)
                report.error = f"incident {incident.id}: {exc}"

        current_by_id = {i.id: i for i in current}
        self.active[name] = {
            i: current_by_id[i]
            for i in (set(delta.ongoing) | {x.id for x in delta.new})
            if i in current_by_id
        }
        report.resolved_ids = sorted(delta.resolved)
        return report
