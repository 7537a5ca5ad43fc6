// GeoJSON geometry to SVG path data. Coordinates are untyped arrays on
// the wire, so each geometry kind narrows them locally.

import type { FeatureCollection, GeoJSONGeometry } from "./generated/api.js";
import { project, type Viewport } from "./geo.js";

type Position = number[]; // [lon, lat]

function pathPoint(vp: Viewport, pos: Position): string {
  const { x, y } = project(vp, pos[1], pos[0]);
  return `${x.toFixed(1)} ${y.toFixed(1)}`;
}

export function ringToPath(vp: Viewport, ring: Position[], close = true): string {
  if (ring.length === 0) return "";
  const parts = [`M ${pathPoint(vp, ring[0])}`];
  for (let i = 1; i < ring.length; i++) {
    parts.push(`L ${pathPoint(vp, ring[i])}`);
  }
  if (close) parts.push("Z");
  return parts.join(" ");
}

// One path string per geometry; polygon holes become subpaths so the
// caller can fill with the evenodd rule.
export function geometryToPath(vp: Viewport, geom: GeoJSONGeometry): string {
  switch (geom.type) {
    case "Polygon": {
      const rings = geom.coordinates as Position[][];
      return rings.map((ring) => ringToPath(vp, ring)).filter(Boolean).join(" ");
    }
    case "MultiPolygon": {
      const polys = geom.coordinates as Position[][][];
      return polys
        .flatMap((rings) => rings.map((ring) => ringToPath(vp, ring)))
        .filter(Boolean)
        .join(" ");
    }
    case "LineString": {
      const line = geom.coordinates as Position[];
      return ringToPath(vp, line, false);
    }
    case "Point":
      return "";
  }
}

export interface FeaturePath {
  d: string;
  properties: Record<string, unknown>;
}

export function featurePaths(vp: Viewport, fc: FeatureCollection): FeaturePath[] {
  return fc.features
    .map((f) => ({ d: geometryToPath(vp, f.geometry), properties: f.properties }))
    .filter((fp) => fp.d !== "");
}
