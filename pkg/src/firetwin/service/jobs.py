"""Prediction jobs: records, a disk-backed index, and the bounded
queue that runs 3D simulations.

The index is an append-only LDJSON file; every state transition appends
a full snapshot of the record and loading replays the file keeping the
last snapshot per id. That makes restarts cheap (no compaction pass)
and keeps the store human-inspectable.

2D jobs never enter the queue: the caller runs them synchronously, so a
plume can never wait behind a half-minute voxel run.
"""

from __future__ import annotations

import json
import threading
import uuid
from collections import deque
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from firetwin.errors import InvalidTransition, QueueFull, UnknownJob

JOB_KINDS = ("plume2d", "smoke3d")
JOB_STATES = ("queued", "running", "done", "failed")

# Which artifact extensions each job kind produces, per horizon. The
# smoke3d json artifact carries mesh metadata (anchor, mass, counts).
KIND_ARTIFACTS = {
    "plume2d": ("kml", "geojson"),
    "smoke3d": ("obj", "grid", "json"),
}

_ALLOWED = {
    "queued": ("running",),
    "running": ("done", "failed"),
    "done": (),
    "failed": (),
}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    kind: str
    city: str
    state: str = "queued"
    incident_id: str | None = None
    scenario: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)  # horizon str -> ext -> digest
    error: str | None = None
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)

    def __post_init__(self):
        if self.kind not in JOB_KINDS:
            raise ValueError(f"kind {self.kind!r} not one of {JOB_KINDS}")
        if self.state not in JOB_STATES:
            raise ValueError(f"state {self.state!r} not one of {JOB_STATES}")

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "city": self.city,
            "state": self.state,
            "incident_id": self.incident_id,
            "scenario": self.scenario,
            "artifacts": self.artifacts,
            "error": self.error,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "JobRecord":
        return cls(
            job_id=doc["job_id"],
            kind=doc["kind"],
            city=doc["city"],
            state=doc["state"],
            incident_id=doc.get("incident_id"),
            scenario=doc.get("scenario", {}),
            artifacts=doc.get("artifacts", {}),
            error=doc.get("error"),
            created_at=doc["created_at"],
            updated_at=doc["updated_at"],
        )


class JobStore:
    """Thread-safe job index persisted to a single LDJSON file."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index = self.root / "jobs.ldjson"
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}
        if self._index.exists():
            for line in self._index.read_text().splitlines():
                if not line.strip():
                    continue
                rec = JobRecord.from_json(json.loads(line))
                self._jobs[rec.job_id] = rec
            # A process killed mid-run leaves running/queued rows behind;
            # nothing will ever finish them, so surface that as failed.
            for job_id, rec in list(self._jobs.items()):
                if rec.state in ("queued", "running"):
                    self._jobs[job_id] = replace(
                        rec, state="failed", error="interrupted by restart", updated_at=_now()
                    )

    def _append(self, rec: JobRecord) -> None:
        with open(self._index, "a") as fh:
            fh.write(json.dumps(rec.to_json()) + "\n")

    def create(
        self,
        kind: str,
        city: str,
        incident_id: str | None = None,
        scenario: dict | None = None,
    ) -> JobRecord:
        rec = JobRecord(
            job_id=uuid.uuid4().hex[:16],
            kind=kind,
            city=city,
            incident_id=incident_id,
            scenario=dict(scenario or {}),
        )
        with self._lock:
            self._jobs[rec.job_id] = rec
            self._append(rec)
        return rec

    def get(self, job_id: str) -> JobRecord:
        with self._lock:
            try:
                return self._jobs[job_id]
            except KeyError:
                raise UnknownJob(f"job {job_id!r} not in index") from None

    def transition(
        self,
        job_id: str,
        state: str,
        error: str | None = None,
        artifacts: dict | None = None,
    ) -> JobRecord:
        if state not in JOB_STATES:
            raise ValueError(f"state {state!r} not one of {JOB_STATES}")
        with self._lock:
            try:
                rec = self._jobs[job_id]
            except KeyError:
                raise UnknownJob(f"job {job_id!r} not in index") from None
            if state not in _ALLOWED[rec.state]:
                raise InvalidTransition(f"{rec.state} -> {state} for job {job_id}")
            new = replace(
                rec,
                state=state,
                error=error,
                artifacts=rec.artifacts if artifacts is None else artifacts,
                updated_at=_now(),
            )
            if state == "done" and not new.artifacts:
                raise InvalidTransition(f"job {job_id} cannot be done without artifacts")
            self._jobs[job_id] = new
            self._append(new)
            return new

    def by_incident(self, incident_id: str) -> list[JobRecord]:
        with self._lock:
            recs = [r for r in self._jobs.values() if r.incident_id == incident_id]
        return sorted(recs, key=lambda r: r.created_at)

    def all(self) -> list[JobRecord]:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda r: r.created_at)


class Smoke3dQueue:
    """Bounded FIFO of smoke3d job ids with an optional worker pool.

    submit() raises QueueFull once the backlog hits the limit; the HTTP
    layer maps that to 429. Workers are plain threads: the solver
    kernels release the GIL, so two concurrent runs overlap for real.
    Without started workers, run_pending() drains the backlog on the
    calling thread (CLI one-shots and tests).
    """

    def __init__(self, runner, limit: int = 8, workers: int = 2):
        if limit < 1 or workers < 1:
            raise ValueError("queue limit and worker count must be >= 1")
        self._runner = runner
        self._limit = limit
        self._workers_n = workers
        self._pending: deque[str] = deque()
        self._cond = threading.Condition()
        self._threads: list[threading.Thread] = []
        self._stopping = False

    @property
    def depth(self) -> int:
        with self._cond:
            return len(self._pending)

    def submit(self, job_id: str) -> None:
        with self._cond:
            if len(self._pending) >= self._limit:
                raise QueueFull(f"simulation queue at capacity ({self._limit})")
            self._pending.append(job_id)
            self._cond.notify()

    def run_pending(self) -> int:
        """Drain the backlog synchronously; returns jobs run."""
        ran = 0
        while True:
            with self._cond:
                if not self._pending:
                    return ran
                job_id = self._pending.popleft()
            self._runner(job_id)
            ran += 1

    def start(self) -> None:
        with self._cond:
            if self._threads:
                return
            self._stopping = False
            self._threads = [
                threading.Thread(target=self._work, name=f"smoke3d-{i}", daemon=True)
                for i in range(self._workers_n)
            ]
        for t in self._threads:
            t.start()

    def stop(self) -> None:
        with self._cond:
            self._stopping = True
            self._cond.notify_all()
        for t in self._threads:
            t.join(timeout=60.0)
        self._threads = []

    def _work(self) -> None:
        while True:
            with self._cond:
                while not self._pending and not self._stopping:
                    self._cond.wait()
                if self._stopping and not self._pending:
                    return
                job_id = self._pending.popleft()
            self._runner(job_id)
