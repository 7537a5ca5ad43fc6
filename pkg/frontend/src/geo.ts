// Equirectangular projection around the city center. Distortion is
// negligible at the 10 to 30 km domain scale this map ever shows.

export const METERS_PER_DEG_LAT = 111320;

export interface Viewport {
  centerLat: number;
  centerLon: number;
  width: number;
  height: number;
  metersPerPx: number;
}

export function metersPerDegLon(lat: number): number {
  return METERS_PER_DEG_LAT * Math.cos((lat * Math.PI) / 180);
}

export function project(vp: Viewport, lat: number, lon: number): { x: number; y: number } {
  const east = (lon - vp.centerLon) * metersPerDegLon(vp.centerLat);
  const north = (lat - vp.centerLat) * METERS_PER_DEG_LAT;
  return {
    x: vp.width / 2 + east / vp.metersPerPx,
    y: vp.height / 2 - north / vp.metersPerPx,
  };
}

export function unproject(vp: Viewport, x: number, y: number): { lat: number; lon: number } {
  const east = (x - vp.width / 2) * vp.metersPerPx;
  const north = (vp.height / 2 - y) * vp.metersPerPx;
  return {
    lat: vp.centerLat + north / METERS_PER_DEG_LAT,
    lon: vp.centerLon + east / metersPerDegLon(vp.centerLat),
  };
}

export function distanceMeters(lat1: number, lon1: number, lat2: number, lon2: number): number {
  const meanLat = (lat1 + lat2) / 2;
  const east = (lon2 - lon1) * metersPerDegLon(meanLat);
  const north = (lat2 - lat1) * METERS_PER_DEG_LAT;
  return Math.hypot(east, north);
}

// Scale so the domain circle fits the shorter screen axis with a margin.
export function fitViewport(
  centerLat: number,
  centerLon: number,
  radiusM: number,
  width: number,
  height: number,
  marginPx = 24,
): Viewport {
  const usable = Math.max(1, Math.min(width, height) - 2 * marginPx);
  return {
    centerLat,
    centerLon,
    width,
    height,
    metersPerPx: (2 * radiusM) / usable,
  };
}

export function inDomain(
  center: { lat: number; lon: number },
  radiusM: number,
  lat: number,
  lon: number,
): boolean {
  return distanceMeters(center.lat, center.lon, lat, lon) <= radiusM;
}
