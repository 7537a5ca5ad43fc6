"""Command line entry points.

serve        run the HTTP API with scheduler and workers
ingest-once  single scheduler tick for one city (or all)
predict      one-off footprint prediction from the terminal
calibrate    fit the 3D solver against the 2D reference scene
validate     score sensor readings against a scenario footprint
risk         print the tract risk layer for a city
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path


def _parse_when(value: str | None) -> datetime | None:
    if value is None:
        return None
    when = datetime.fromisoformat(value.replace("Z", "+00:00"))
    return when if when.tzinfo else when.replace(tzinfo=timezone.utc)


def _clock_for(now: str | None):
    pinned = _parse_when(now)
    if pinned is None:
        return None
    return lambda: pinned


def cmd_serve(args) -> int:
    import uvicorn

    from firetwin.service import build_app, load_config

    config = load_config(args.config)
    app = build_app(config, clock=_clock_for(args.now), run_background=True)
    uvicorn.run(app, host=args.host, port=config.port)
    return 0


def cmd_ingest_once(args) -> int:
    from firetwin.service import build_runtime

    runtime = build_runtime(args.config, clock=_clock_for(args.now))
    reports = runtime.scheduler.tick(only_city=args.city)
    if args.city and not reports:
        print(f"city {args.city!r} not configured", file=sys.stderr)
        return 2
    ran = runtime.queue.run_pending()
    out = {"reports": [r.to_json() for r in reports], "smoke3d_jobs_run": ran}
    print(json.dumps(out, indent=2))
    return 0 if all(r.ok for r in reports) else 1


def cmd_predict(args) -> int:
    from firetwin.geo import LocalFrame
    from firetwin.plume2d import (
        DEFAULT_PROFILE,
        DEFAULT_THRESHOLDS,
        export_geojson,
        isopleths,
        make_params,
    )
    from firetwin.weather import PasquillClass

    emission = DEFAULT_PROFILE.lookup(args.category)
    import math

    d = math.radians(args.wind_from)
    toward = (-math.sin(d), -math.cos(d))
    params = make_params(
        q=emission.q,
        wind_speed=args.wind_speed,
        wind_toward=toward,
        stability=PasquillClass(args.stability),
        source_radius=emission.radius,
    )
    frame = LocalFrame.at(args.lat, args.lon)
    when = _parse_when(args.now) or datetime.now(timezone.utc)
    out = {
        "lat": args.lat,
        "lon": args.lon,
        "category": args.category,
        "calm": params.calm,
        "footprints": {},
    }
    for h in (1, 2, 3):
        fp = isopleths(
            params, thresholds=DEFAULT_THRESHOLDS, horizon_h=h, frame=frame, generated_at=when
        )
        out["footprints"][str(h)] = export_geojson(fp)

    if args.use_3d:
        import numpy as np

        from firetwin.calibrate import CALIBRATED_SOURCE_SCALE, calibrated_config
        from firetwin.geo import OccupancyGrid
        from firetwin.smoke3d import init_scene, run_to_horizons, snapshot
        from firetwin.smoke3d.state import EmissionSpec

        nx, ny, nz = args.grid
        cell = args.cell
        ux, uy = params.wind_toward
        shift = 0.2 * nx * cell
        grid = OccupancyGrid(
            solid=np.zeros((nx, ny, nz), dtype=bool),
            cell=cell,
            x0=-0.5 * nx * cell + shift * ux,
            y0=-0.5 * ny * cell + shift * uy,
            z0=0.0,
            ground=np.zeros((nx, ny), dtype=np.float64),
        )
        state = init_scene(
            grid,
            wind=(params.u * ux, params.u * uy),
            source_lonlat=(args.lon, args.lat),
            emission=EmissionSpec(
                q=emission.q * CALIBRATED_SOURCE_SCALE,
                radius=max(emission.radius, cell),
                duration_h=emission.duration_h,
            ),
            frame=frame,
        )
        results = run_to_horizons(state, calibrated_config(params.u * ux, params.u * uy))
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        for hr in results:
            snap = snapshot(
                state, hr.hour, 35.5, frame, density=hr.density, sim_time=hr.sim_time
            )
            obj_path = outdir / f"smoke_{hr.hour}h.obj"
            grid_path = outdir / f"smoke_{hr.hour}h.grid"
            obj_path.write_text(snap.obj_text())
            grid_path.write_bytes(snap.raw_grid)
            written.extend([str(obj_path), str(grid_path)])
        out["smoke3d_files"] = written

    print(json.dumps(out, indent=2))
    return 0


def cmd_calibrate(args) -> int:
    from firetwin.calibrate.tune import default_scene, save_report, tune

    result = tune(scene=default_scene(), budget=args.budget, workers=args.workers)
    save_report(result, args.out)
    print(
        json.dumps(
            {
                "buoyancy_alpha": result.buoyancy_alpha,
                "diffusion": result.diffusion,
                "source_scale": result.source_scale,
                "mean_iou": result.mean_iou,
                "evaluations": len(result.evaluations),
                "report": str(args.out),
            },
            indent=2,
        )
    )
    return 0


def cmd_validate(args) -> int:
    from firetwin.geo import LocalFrame
    from firetwin.plume2d import isopleths, make_params
    from firetwin.validate import detection_report, load_readings
    from firetwin.weather import PasquillClass

    scenario = json.loads(Path(args.scenario).read_text())
    params = make_params(
        q=scenario["q_ugs"],
        wind_speed=scenario["wind_speed_ms"],
        wind_toward=tuple(scenario["wind_toward"]),
        stability=PasquillClass(scenario["stability"]),
        source_radius=scenario.get("source_radius_m", 0.0),
    )
    frame = LocalFrame.at(scenario["source"]["lat"], scenario["source"]["lon"])
    footprint = isopleths(params, horizon_h=scenario.get("horizon_h", 1), frame=frame)

    readings_path = Path(args.readings) if args.readings else Path(scenario["readings"])
    if not readings_path.is_absolute() and not readings_path.exists():
        readings_path = Path(args.scenario).parent / readings_path
    readings = load_readings(readings_path)

    start = _parse_when(args.window_start or scenario["event_start"])
    end = _parse_when(args.window_end or scenario["event_end"])
    report = detection_report(readings, footprint, (start, end))
    print(
        json.dumps(
            {
                "n_sensors": report.n_sensors,
                "n_in_footprint": report.n_in_footprint,
                "n_responding": report.n_responding,
                "sparse": report.sparse,
                "sensors": [
                    {
                        "sensor_id": s.sensor_id,
                        "band": s.band,
                        "baseline": s.baseline,
                        "event_max": s.event_max,
                        "delta": s.delta,
                        "responds": s.responds,
                    }
                    for s in report.sensors
                ],
            },
            indent=2,
        )
    )
    return 0


def cmd_risk(args) -> int:
    from firetwin.service import build_runtime

    runtime = build_runtime(args.config, clock=_clock_for(args.now))
    city = runtime.config.cities.get(args.city)
    if city is None:
        print(f"city {args.city!r} not configured", file=sys.stderr)
        return 2
    doc, etag = runtime.pipeline.risk_layer(city)
    doc["etag"] = etag
    print(json.dumps(doc, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firetwin", description="Fire and smoke digital twin service"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--config", required=True, help="service config YAML")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--now", default=None, help="pin the clock (ISO timestamp, for fixture replay)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("ingest-once", help="single scheduler tick")
    p.add_argument("--config", required=True)
    p.add_argument("--city", default=None, help="restrict to one city")
    p.add_argument("--now", default=None, help="pin the clock (ISO timestamp)")
    p.set_defaults(func=cmd_ingest_once)

    p = sub.add_parser("predict", help="one-off prediction at a point")
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--lon", type=float, required=True)
    p.add_argument("--category", required=True, help="incident category, e.g. 'brush fire'")
    p.add_argument("--wind-speed", type=float, default=3.0, help="m/s")
    p.add_argument("--wind-from", type=float, default=270.0, help="meteorological degrees")
    p.add_argument("--stability", default="D", choices=list("ABCDEF"))
    p.add_argument("--now", default=None)
    p.add_argument("--3d", dest="use_3d", action="store_true", help="also run the voxel solver")
    p.add_argument("--grid", type=int, nargs=3, default=(96, 96, 48), metavar=("NX", "NY", "NZ"))
    p.add_argument("--cell", type=float, default=8.0)
    p.add_argument("--out", default="predictions", help="directory for 3D outputs")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("calibrate", help="tune solver parameters against the 2D reference")
    p.add_argument("--budget", type=int, default=60)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="calibration/report.json")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("validate", help="sensor detection report for a scenario")
    p.add_argument("--scenario", required=True, help="scenario JSON (source, wind, event window)")
    p.add_argument("--readings", default=None, help="LDJSON sensor readings (default from scenario)")
    p.add_argument("--window-start", default=None)
    p.add_argument("--window-end", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("risk", help="tract risk layer for a city")
    p.add_argument("--config", required=True)
    p.add_argument("--city", required=True)
    p.add_argument("--now", default=None)
    p.set_defaults(func=cmd_risk)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
