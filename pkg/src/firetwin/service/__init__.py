"""Service layer: config, artifact store, job queue, scheduler, HTTP API."""

from firetwin.service.app import Runtime, ScenarioRequest, build_app, build_runtime
from firetwin.service.artifacts import ARTIFACT_KINDS, CONTENT_TYPES, ArtifactStore
from firetwin.service.config import (
    CityConfig,
    ServiceConfig,
    SolverSettings,
    load_config,
)
from firetwin.service.jobs import (
    JOB_KINDS,
    JOB_STATES,
    KIND_ARTIFACTS,
    JobRecord,
    JobStore,
    Smoke3dQueue,
)
from firetwin.service.pipeline import Pipeline
from firetwin.service.scheduler import Scheduler, TickReport

__all__ = [
    "ARTIFACT_KINDS",
    "ArtifactStore",
    "CONTENT_TYPES",
    "CityConfig",
    "JOB_KINDS",
    "JOB_STATES",
    "JobRecord",
    "JobStore",
    "KIND_ARTIFACTS",
    "Pipeline",
    "Runtime",
    "ScenarioRequest",
    "Scheduler",
    "ServiceConfig",
    "Smoke3dQueue",
    "SolverSettings",
    "TickReport",
    "build_app",
    "build_runtime",
    "load_config",
]
