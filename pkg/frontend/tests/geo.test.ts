import { expect, test } from "vitest";
import {
  METERS_PER_DEG_LAT,
  distanceMeters,
  fitViewport,
  inDomain,
  metersPerDegLon,
  project,
  unproject,
  type Viewport,
} from "../src/geo.js";

const vp: Viewport = {
  centerLat: 30.2672,
  centerLon: -97.7431,
  width: 760,
  height: 560,
  metersPerPx: 50,
};

test("center projects to the middle of the screen", () => {
  expect(project(vp, vp.centerLat, vp.centerLon)).toEqual({ x: 380, y: 280 });
});

test("north is up and east is right", () => {
  const north = project(vp, vp.centerLat + 0.01, vp.centerLon);
  expect(north.y).toBeLessThan(280);
  expect(north.x).toBeCloseTo(380, 6);
  const east = project(vp, vp.centerLat, vp.centerLon + 0.01);
  expect(east.x).toBeGreaterThan(380);
  expect(east.y).toBeCloseTo(280, 6);
});

test("project and unproject round trip", () => {
  for (const [lat, lon] of [
    [30.2672, -97.7431],
    [30.31, -97.69],
    [30.21, -97.81],
  ]) {
    const { x, y } = project(vp, lat, lon);
    const back = unproject(vp, x, y);
    expect(back.lat).toBeCloseTo(lat, 9);
    expect(back.lon).toBeCloseTo(lon, 9);
  }
});

test("one degree of latitude is about 111.3 km", () => {
  expect(distanceMeters(30, -97, 31, -97)).toBeCloseTo(METERS_PER_DEG_LAT, 6);
});

test("longitude shrinks with latitude", () => {
  expect(metersPerDegLon(60)).toBeCloseTo(METERS_PER_DEG_LAT / 2, 0);
  expect(distanceMeters(60, 0, 60, 1)).toBeLessThan(distanceMeters(0, 0, 0, 1));
});

test("fitViewport keeps the domain circle inside the margin", () => {
  const radius = 15000;
  const fitted = fitViewport(30.2672, -97.7431, radius, 760, 560, 24);
  const edge = project(fitted, 30.2672 + radius / METERS_PER_DEG_LAT, -97.7431);
  expect(edge.y).toBeGreaterThanOrEqual(24 - 1e-9);
  expect(edge.y).toBeLessThan(280);
});

test("inDomain flips just past the radius", () => {
  const center = { lat: 30.2672, lon: -97.7431 };
  const latAtEdge = center.lat + 10000 / METERS_PER_DEG_LAT;
  expect(inDomain(center, 10000, latAtEdge - 1e-6, center.lon)).toBe(true);
  expect(inDomain(center, 10000, latAtEdge + 1e-6, center.lon)).toBe(false);
});
