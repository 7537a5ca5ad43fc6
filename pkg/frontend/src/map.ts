// SVG assembly for the 2D map. Layers are plain strings so they can be
// unit tested without a DOM; app.ts owns insertion and event wiring.

import type { FeatureCollection, Incident, RiskLayer } from "./generated/api.js";
import { riskFill } from "./choropleth.js";
import { geometryToPath } from "./geojson.js";
import { project, type Viewport } from "./geo.js";

const XML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&apos;",
};

export function escapeXml(s: string): string {
  return s.replace(/[&<>"']/g, (c) => XML_ESCAPES[c]);
}

export function domainSvg(vp: Viewport, centerLat: number, centerLon: number, radiusM: number): string {
  const { x, y } = project(vp, centerLat, centerLon);
  const r = (radiusM / vp.metersPerPx).toFixed(1);
  return (
    `<circle class="domain" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="${r}" ` +
    `fill="none" stroke="#7a8aa0" stroke-dasharray="6 4"/>`
  );
}

export function riskSvg(vp: Viewport, layer: RiskLayer): string {
  const paths = layer.features.map((f) => {
    const d = geometryToPath(vp, f.geometry);
    if (d === "") return "";
    const props = f.properties;
    const fill = riskFill(String(props.risk_class));
    const label = `${props.tract_id}: ${props.count} incidents, rate ${Number(props.rate).toFixed(2)}`;
    return (
      `<path d="${d}" fill="${fill}" fill-opacity="0.55" stroke="#ffffff" ` +
      `stroke-width="0.8" fill-rule="evenodd"><title>${escapeXml(label)}</title></path>`
    );
  });
  return `<g class="risk">${paths.join("")}</g>`;
}

// Plume bands are colored by severity, lowest threshold first, so the
// widest (least concentrated) ring draws underneath.
const BAND_FILL = ["#4caf50", "#fdd835", "#fb8c00", "#e53935"];

function bandThreshold(props: Record<string, unknown>): number {
  const t = Number(props.threshold_ugm3);
  return Number.isFinite(t) ? t : 0;
}

export function footprintSvg(vp: Viewport, fc: FeatureCollection): string {
  const thresholds = [...new Set(fc.features.map((f) => bandThreshold(f.properties)))].sort(
    (a, b) => a - b,
  );
  const ordered = [...fc.features].sort(
    (a, b) => bandThreshold(a.properties) - bandThreshold(b.properties),
  );
  const paths = ordered.map((f) => {
    const d = geometryToPath(vp, f.geometry);
    if (d === "") return "";
    const t = bandThreshold(f.properties);
    const band = Math.min(Math.max(thresholds.indexOf(t), 0), BAND_FILL.length - 1);
    const fill = BAND_FILL[band];
    const label = `PM2.5 over ${t} ug/m3`;
    return (
      `<path d="${d}" fill="${fill}" fill-opacity="0.35" stroke="${fill}" ` +
      `stroke-width="1.2" fill-rule="evenodd"><title>${escapeXml(label)}</title></path>`
    );
  });
  return `<g class="plume">${paths.join("")}</g>`;
}

export function firesSvg(vp: Viewport, incidents: Incident[], selectedJobId: string | null = null): string {
  const marks = incidents.map((inc) => {
    const { x, y } = project(vp, inc.lat, inc.lon);
    const cx = x.toFixed(1);
    const cy = y.toFixed(1);
    const jobIds = [inc.jobs.plume2d?.job_id, inc.jobs.smoke3d?.job_id];
    const selected = selectedJobId !== null && jobIds.includes(selectedJobId);
    const halo = selected
      ? `<circle cx="${cx}" cy="${cy}" r="10" fill="none" stroke="#1463d8" stroke-width="2"/>`
      : "";
    const fill = inc.status === "active" ? "#c62828" : "#ffffff";
    const stroke = inc.status === "active" ? "#7f1d1d" : "#9aa0a6";
    const label = `${inc.name} (${inc.status})\n${inc.address}\n${inc.timestamp}`;
    return (
      `${halo}<circle class="incident" data-id="${escapeXml(inc.id)}" cx="${cx}" cy="${cy}" ` +
      `r="5" fill="${fill}" stroke="${stroke}" stroke-width="1.5">` +
      `<title>${escapeXml(label)}</title></circle>`
    );
  });
  return `<g class="fires">${marks.join("")}</g>`;
}

export function scenarioMarkerSvg(vp: Viewport, lat: number, lon: number): string {
  const { x, y } = project(vp, lat, lon);
  const cx = x.toFixed(1);
  const cy = y.toFixed(1);
  return (
    `<g class="draft-marker">` +
    `<line x1="${(x - 9).toFixed(1)}" y1="${cy}" x2="${(x + 9).toFixed(1)}" y2="${cy}" stroke="#1463d8" stroke-width="2"/>` +
    `<line x1="${cx}" y1="${(y - 9).toFixed(1)}" x2="${cx}" y2="${(y + 9).toFixed(1)}" stroke="#1463d8" stroke-width="2"/>` +
    `<circle cx="${cx}" cy="${cy}" r="5" fill="none" stroke="#1463d8" stroke-width="2"/>` +
    `</g>`
  );
}

export function mapSvg(vp: Viewport, layers: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${vp.width}" height="${vp.height}" ` +
    `viewBox="0 0 ${vp.width} ${vp.height}">` +
    `<rect width="${vp.width}" height="${vp.height}" fill="#eef2f6"/>` +
    layers.join("") +
    `</svg>`
  );
}
