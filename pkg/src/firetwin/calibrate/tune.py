"""Fit the voxel solver's free parameters to the analytic plume.

On flat, building-free terrain the Gaussian model is the reference
solution, so the 3D solver should reproduce its footprint there.  The
tuner grid-searches {buoyancy_alpha, diffusion, source_scale} over a
declared box, refines locally around the best coarse point, and scores
each candidate by the mean footprint IoU across the forecast horizons.
The search has no random component: given the same scene and box it
evaluates the same points in the same order.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from firetwin.calibrate.compare import PolygonSet, compare_footprints, footprint_of_3d
from firetwin.geo.frame import LocalFrame
from firetwin.geo.voxel import OccupancyGrid
from firetwin.plume2d.emissions import EmissionSpec
from firetwin.plume2d.footprint import isopleths
from firetwin.plume2d.model import make_params
from firetwin.smoke3d import SolverConfig, init_scene, run_to_horizons
from firetwin.weather.models import PasquillClass

_COARSE_POINTS = 3
_REFINE_ROUNDS = 2


@dataclass(frozen=True)
class CalibrationScene:
    """The reference scenario both models simulate.

    Flat ground, no buildings, steady wind along +x, source at the
    frame origin.  upwind_margin positions the source that many meters
    in from the grid's upwind face so the plume has room to develop
    downwind.
    """

    shape: tuple[int, int, int] = (128, 64, 32)
    cell: float = 8.0
    wind_speed: float = 5.0
    stability: str = "D"
    q: float = 1.0e6
    threshold: float = 35.5
    horizons: tuple[int, ...] = (1, 2, 3)
    upwind_margin: float = 100.0
    origin_lat: float = 30.0
    origin_lon: float = -97.7

    def __post_init__(self) -> None:
        if self.wind_speed <= 0:
            raise ValueError("scene wind must blow; calm air has no footprint")
        if self.q <= 0 or self.threshold <= 0:
            raise ValueError("emission rate and threshold must be positive")
        if not self.horizons:
            raise ValueError("at least one horizon required")

    def digest(self) -> str:
        """Stable hash of the scenario, recorded with every report."""
        blob = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def frame(self) -> LocalFrame:
        return LocalFrame.at(self.origin_lat, self.origin_lon)

    def build(self):
        """Instantiate (grid, frame, source_lonlat) for a solver run."""
        nx, ny, _ = self.shape
        grid = OccupancyGrid(
            solid=np.zeros(self.shape, dtype=bool),
            cell=self.cell,
            x0=-self.upwind_margin,
            y0=-0.5 * ny * self.cell,
            z0=0.0,
            ground=np.zeros((nx, ny)),
        )
        return grid, self.frame(), (self.origin_lon, self.origin_lat)

    def target_footprints(self) -> dict[int, PolygonSet]:
        """Reference polygons per horizon from the analytic model."""
        params = make_params(
            self.q,
            self.wind_speed,
            (1.0, 0.0),
            PasquillClass(self.stability),
            source=(0.0, 0.0),
        )
        frame = self.frame()
        out: dict[int, PolygonSet] = {}
        for h in self.horizons:
            fp = isopleths(params, (self.threshold,), horizon_h=h, frame=frame)
            _, ring = fp.isopleths[0]
            out[h] = [list(ring)] if ring else []
        return out


def default_scene() -> CalibrationScene:
    return CalibrationScene()


@dataclass(frozen=True)
class ParamBox:
    """Inclusive search bounds per parameter; the tuner never leaves them."""

    buoyancy_alpha: tuple[float, float] = (0.0, 0.24)
    diffusion: tuple[float, float] = (0.5, 24.0)
    source_scale: tuple[float, float] = (0.25, 4.0)

    def __post_init__(self) -> None:
        for name in ("buoyancy_alpha", "diffusion", "source_scale"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"{name} bounds must be finite with lo <= hi")
        if self.buoyancy_alpha[0] < 0 or self.diffusion[0] < 0:
            raise ValueError("buoyancy and diffusion cannot be negative")
        if self.source_scale[0] <= 0:
            raise ValueError("source_scale must stay positive")

    def contains(self, alpha: float, diffusion: float, source_scale: float) -> bool:
        return (
            self.buoyancy_alpha[0] <= alpha <= self.buoyancy_alpha[1]
            and self.diffusion[0] <= diffusion <= self.diffusion[1]
            and self.source_scale[0] <= source_scale <= self.source_scale[1]
        )

    def _axes(self) -> tuple[tuple[float, float], ...]:
        return (self.buoyancy_alpha, self.diffusion, self.source_scale)


@dataclass(frozen=True)
class EvalRecord:
    """Score of one parameter point."""

    buoyancy_alpha: float
    diffusion: float
    source_scale: float
    iou_by_horizon: dict[int, float]
    mean_iou: float


@dataclass(frozen=True)
class TuneResult:
    """Best point found plus the full evaluation trace."""

    config: SolverConfig
    source_scale: float
    mean_iou: float
    iou_by_horizon: dict[int, float]
    evaluations: tuple[EvalRecord, ...]
    budget: int
    budget_exhausted: bool
    scene_digest: str
    generated_at: str

    @property
    def buoyancy_alpha(self) -> float:
        return self.config.buoyancy_alpha

    @property
    def diffusion(self) -> float:
        return self.config.diffusion


def _scene_config(scene: CalibrationScene, alpha: float, diffusion: float) -> SolverConfig:
    base = SolverConfig.fast_forecast(scene.wind_speed, 0.0)
    return replace(
        base,
        buoyancy_alpha=float(alpha),
        diffusion=float(diffusion),
        snapshot_hours=tuple(scene.horizons),
    )


def evaluate_params(
    scene: CalibrationScene,
    buoyancy_alpha: float,
    diffusion: float,
    source_scale: float,
    targets: dict[int, PolygonSet] | None = None,
) -> EvalRecord:
    """Run the solver once and score its footprints against the targets.

    source_scale multiplies the scene's emission rate; it absorbs the
    systematic concentration offset between the column-projected voxel
    field and the ground-level analytic field.
    """
    if targets is None:
        targets = scene.target_footprints()
    grid, frame, source = scene.build()
    emission = EmissionSpec(
        q=scene.q * source_scale, radius=5.0, duration_h=float(max(scene.horizons))
    )
    config = _scene_config(scene, buoyancy_alpha, diffusion)
    state = init_scene(grid, config.wind_inflow, source, emission, frame)
    results = run_to_horizons(state, config)

    scores: dict[int, float] = {}
    for res in results:
        if res.hour not in targets:
            continue
        fp3 = footprint_of_3d(res.density, grid, scene.threshold, frame)
        cmp = compare_footprints(targets[res.hour], fp3, horizon=res.hour)
        scores[res.hour] = cmp.iou
    mean = sum(scores.values()) / len(scores)
    return EvalRecord(
        buoyancy_alpha=float(buoyancy_alpha),
        diffusion=float(diffusion),
        source_scale=float(source_scale),
        iou_by_horizon=scores,
        mean_iou=mean,
    )


def _axis_values(lo: float, hi: float, n: int) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _grid_points(axes: list[list[float]]) -> list[tuple[float, float, float]]:
    pts = []
    for a in axes[0]:
        for d in axes[1]:
            for s in axes[2]:
                pts.append((a, d, s))
    return pts


def _point_key(pt: tuple[float, float, float]) -> tuple[float, float, float]:
    return tuple(round(v, 12) for v in pt)


def tune(
    scene: CalibrationScene | None = None,
    box: ParamBox | None = None,
    budget: int = 60,
    workers: int = 1,
    targets: dict[int, PolygonSet] | None = None,
) -> TuneResult:
    """Search the box for the parameters that best match the targets.

    Coarse pass: a 3x3x3 grid over the box.  Refinement: two rounds of
    3x3x3 grids centered on the incumbent with the spacing halved each
    round, clipped to the box.  budget caps the total number of solver
    runs; when it cuts the schedule short the best point so far is
    returned with budget_exhausted set rather than an error, since a
    partial search still yields a usable configuration.

    targets defaults to the analytic plume; passing explicit polygons
    supports closed-loop checks where the truth came from the solver
    itself.  workers evaluates candidates concurrently (the kernels
    release no locks worth fighting over, so past ~4 this saturates).
    """
    if scene is None:
        scene = default_scene()
    if box is None:
        box = ParamBox()
    if budget < 1:
        raise ValueError("budget must allow at least one evaluation")
    if workers < 1:
        raise ValueError("workers must be positive")
    if targets is None:
        targets = scene.target_footprints()

    evaluated: dict[tuple[float, float, float], EvalRecord] = {}
    exhausted = False

    def run_batch(points: list[tuple[float, float, float]]) -> None:
        nonlocal exhausted
        fresh = []
        for pt in points:
            key = _point_key(pt)
            if key not in evaluated and key not in (p[1] for p in fresh):
                fresh.append((pt, key))
        room = budget - len(evaluated)
        if len(fresh) > room:
            exhausted = True
            fresh = fresh[:room]
        if not fresh:
            return
        if workers == 1:
            records = [
                evaluate_params(scene, a, d, s, targets=targets)
                for ((a, d, s), _) in fresh
            ]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(
                    pool.map(
                        lambda pk: evaluate_params(scene, *pk[0], targets=targets),
                        fresh,
                    )
                )
        for (_, key), rec in zip(fresh, records):
            evaluated[key] = rec

    axes = [_axis_values(lo, hi, _COARSE_POINTS) for lo, hi in box._axes()]
    run_batch(_grid_points(axes))

    spans = [
        (hi - lo) / (_COARSE_POINTS - 1) if hi > lo else 0.0 for lo, hi in box._axes()
    ]
    for _ in range(_REFINE_ROUNDS):
        if len(evaluated) >= budget:
            break
        best = max(evaluated.values(), key=lambda r: r.mean_iou)
        center = (best.buoyancy_alpha, best.diffusion, best.source_scale)
        spans = [s / 2.0 for s in spans]
        local = []
        for c, s, (lo, hi) in zip(center, spans, box._axes()):
            vals = {min(max(c + off, lo), hi) for off in (-s, 0.0, s)}
            local.append(sorted(vals))
        run_batch(_grid_points(local))

    records = tuple(evaluated.values())
    best = max(records, key=lambda r: r.mean_iou)
    assert box.contains(best.buoyancy_alpha, best.diffusion, best.source_scale)
    return TuneResult(
        config=_scene_config(scene, best.buoyancy_alpha, best.diffusion),
        source_scale=best.source_scale,
        mean_iou=best.mean_iou,
        iou_by_horizon=dict(best.iou_by_horizon),
        evaluations=records,
        budget=budget,
        budget_exhausted=exhausted,
        scene_digest=scene.digest(),
        generated_at=datetime.now(timezone.utc).isoformat(),
    )


def save_report(result: TuneResult, path: str | Path) -> Path:
    """Persist one tuning run as a standalone JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "scene_digest": result.scene_digest,
        "generated_at": result.generated_at,
        "budget": result.budget,
        "evaluations_used": len(result.evaluations),
        "budget_exhausted": result.budget_exhausted,
        "chosen": {
            "buoyancy_alpha": result.buoyancy_alpha,
            "diffusion": result.diffusion,
            "source_scale": result.source_scale,
        },
        "mean_iou": result.mean_iou,
        "iou_by_horizon": {str(h): v for h, v in result.iou_by_horizon.items()},
        "evaluations": [
            {
                "buoyancy_alpha": r.buoyancy_alpha,
                "diffusion": r.diffusion,
                "source_scale": r.source_scale,
                "mean_iou": r.mean_iou,
                "iou_by_horizon": {str(h): v for h, v in r.iou_by_horizon.items()},
            }
            for r in result.evaluations
        ],
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def load_report(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    for key in ("scene_digest", "chosen", "mean_iou", "budget_exhausted"):
        if key not in doc:
            raise ValueError(f"not a calibration report: missing {key}")
    return doc
