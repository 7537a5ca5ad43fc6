// Page wiring: fetches data through ApiClient, renders the SVG map and
// the canvas mesh view, and keeps the URL, sessionStorage and form in
// sync. Pure logic lives in the sibling modules; this file is DOM glue.

import { ApiClient, artifactLink, pollJob } from "./api.js";
import { apiBaseFromDocument } from "./config.js";
import { fitViewport, inDomain, unproject, type Viewport } from "./geo.js";
import type {
  CityList,
  FeatureCollection,
  Incident,
  Job,
  RiskLayer,
  ScenarioRequest,
} from "./generated/api.js";
import { domainSvg, firesSvg, footprintSvg, mapSvg, riskSvg, scenarioMarkerSvg } from "./map.js";
import { fitCamera, projectMesh, type Camera } from "./mesh3d.js";
import { parseObj, triangleCount, type Mesh } from "./obj.js";
import {
  clearDraft,
  loadDraft,
  loadHistory,
  pushHistory,
  saveDraft,
  type HistoryEntry,
  type ScenarioDraft,
} from "./state.js";
import {
  HORIZONS,
  LAYERS,
  formatViewState,
  parseHorizon,
  parseViewState,
  type LayerName,
  type ViewState,
} from "./url.js";

const MAP_W = 760;
const MAP_H = 560;
const OFFLINE_RETRY_MS = 15_000;

type City = CityList["cities"][number];

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const client = new ApiClient(apiBaseFromDocument(document));
const storage = window.sessionStorage;

const state = {
  view: parseViewState(location.search) as ViewState,
  cities: [] as City[],
  vp: null as Viewport | null,
  fires: [] as Incident[],
  risk: null as RiskLayer | null,
  footprints: {} as Record<string, FeatureCollection>,
  smokeJob: null as Job | null,
  meshes: new Map<number, Mesh>(),
  camera: null as Camera | null,
  calm: false,
  offline: false,
  offlineTimer: 0,
  draft: null as ScenarioDraft | null,
};

// ---- small DOM helpers ----

function formMsg(text: string): void {
  const el = must<HTMLDivElement>("form-msg");
  el.textContent = text;
  el.hidden = text === "";
}

function jobStatus(text: string): void {
  must<HTMLElement>("job-status").textContent = text;
}

function setCalm(calm: boolean): void {
  state.calm = calm;
  must<HTMLElement>("calm-badge").hidden = !calm;
}

function setOffline(offline: boolean): void {
  if (offline === state.offline) return;
  state.offline = offline;
  must<HTMLElement>("offline-banner").hidden = !offline;
  if (offline) {
    state.offlineTimer = window.setInterval(() => {
      void client.health().then((res) => {
        if (res.ok) {
          setOffline(false);
          void loadCityData();
        }
      });
    }, OFFLINE_RETRY_MS);
  } else if (state.offlineTimer) {
    window.clearInterval(state.offlineTimer);
    state.offlineTimer = 0;
  }
}

function syncUrl(): void {
  const qs = formatViewState(state.view);
  history.replaceState(null, "", qs === "" ? location.pathname : qs);
}

function activeCity(): City | null {
  return state.cities.find((c) => c.city === state.view.city) ?? null;
}

// ---- rendering ----

function renderMap(): void {
  const vp = state.vp;
  const city = activeCity();
  if (!vp || !city) return;
  const parts: string[] = [domainSvg(vp, city.center.lat, city.center.lon, city.domain_radius_m)];
  const layers = state.view.layers;
  if (layers.includes("risk") && state.risk) parts.push(riskSvg(vp, state.risk));
  if (layers.includes("plume")) {
    const fc = state.footprints[String(state.view.horizon)];
    if (fc) parts.push(footprintSvg(vp, fc));
  }
  if (layers.includes("fires")) parts.push(firesSvg(vp, state.fires, state.view.jobId));
  if (state.draft) parts.push(scenarioMarkerSvg(vp, state.draft.lat, state.draft.lon));
  must<HTMLDivElement>("map").innerHTML = mapSvg(vp, parts);
}

function drawMesh(): void {
  const canvas = must<HTMLCanvasElement>("mesh");
  const wrap = must<HTMLElement>("mesh-wrap");
  const show = state.view.layers.includes("smoke");
  wrap.hidden = !show;
  if (!show) return;
  const ctx = canvas.getContext("2d");
  const mesh = state.meshes.get(state.view.horizon);
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!mesh || !state.camera) return;
  for (const tri of projectMesh(mesh, state.camera, canvas.width, canvas.height)) {
    const c = Math.round(120 + 110 * tri.shade);
    ctx.fillStyle = `rgb(${c}, ${c}, ${Math.min(255, c + 8)})`;
    ctx.beginPath();
    ctx.moveTo(tri.x1, tri.y1);
    ctx.lineTo(tri.x2, tri.y2);
    ctx.lineTo(tri.x3, tri.y3);
    ctx.closePath();
    ctx.fill();
  }
}

function renderHistory(): void {
  const list = must<HTMLUListElement>("history");
  const entries = loadHistory(storage);
  list.innerHTML = "";
  for (const entry of entries) {
    const li = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = `${entry.category} @ ${entry.city} (${entry.submittedAt.slice(0, 16)})${entry.calm ? " [calm]" : ""}`;
    button.addEventListener("click", () => void restoreHistoryEntry(entry));
    li.appendChild(button);
    list.appendChild(li);
  }
  must<HTMLElement>("history-empty").hidden = entries.length > 0;
}

function renderControls(): void {
  for (const layer of LAYERS) {
    const box = document.querySelector<HTMLInputElement>(`input[name="layer"][value="${layer}"]`);
    if (box) box.checked = state.view.layers.includes(layer);
  }
  const radio = document.querySelector<HTMLInputElement>(
    `input[name="horizon"][value="${state.view.horizon}"]`,
  );
  if (radio) radio.checked = true;
}

function renderDraftForm(): void {
  const form = must<HTMLFormElement>("scenario-form");
  const coords = must<HTMLInputElement>("f-coords");
  if (state.draft) {
    form.hidden = false;
    coords.value = `${state.draft.lat.toFixed(5)}, ${state.draft.lon.toFixed(5)}`;
    must<HTMLInputElement>("f-category").value = state.draft.category;
    must<HTMLInputElement>("f-wind-speed").value =
      state.draft.windSpeed == null ? "" : String(state.draft.windSpeed);
    must<HTMLInputElement>("f-wind-dir").value =
      state.draft.windFromDirection == null ? "" : String(state.draft.windFromDirection);
  } else {
    form.hidden = true;
  }
}

// ---- data loading ----

async function loadCityData(): Promise<void> {
  const city = activeCity();
  if (!city) return;
  state.vp = fitViewport(city.center.lat, city.center.lon, city.domain_radius_m, MAP_W, MAP_H);
  const [fires, risk] = await Promise.all([
    client.fires(city.city),
    city.has_risk_layer ? client.risk(city.city) : Promise.resolve(null),
  ]);
  if (!fires.ok) {
    if (fires.offline) setOffline(true);
    state.fires = [];
  } else {
    setOffline(false);
    state.fires = fires.value.incidents;
  }
  if (risk === null) {
    state.risk = null;
  } else if (risk.ok) {
    state.risk = risk.value;
  } else {
    if (risk.offline) setOffline(true);
    state.risk = null;
  }
  renderMap();
}

async function loadMesh(horizon: number): Promise<void> {
  if (state.meshes.has(horizon)) {
    drawMesh();
    return;
  }
  const job = state.smokeJob;
  if (!job || job.state !== "done") return;
  const link = artifactLink(job.links, horizon, "obj");
  if (!link) return;
  jobStatus(`loading ${horizon} h mesh`);
  const text = await client.meshText(link);
  if (!text.ok) {
    if (text.offline) setOffline(true);
    jobStatus("mesh unavailable");
    return;
  }
  const mesh = parseObj(text.value);
  state.meshes.set(horizon, mesh);
  if (!state.camera) {
    const canvas = must<HTMLCanvasElement>("mesh");
    state.camera = fitCamera(mesh, canvas.width, canvas.height);
  }
  jobStatus(`${horizon} h isosurface, ${triangleCount(mesh)} triangles`);
  drawMesh();
}

async function loadFootprintsFromJob(job: Job): Promise<void> {
  for (const horizon of HORIZONS) {
    const link = artifactLink(job.links, horizon, "geojson");
    if (!link) continue;
    const fc = await client.footprint(link);
    if (fc.ok) state.footprints[String(horizon)] = fc.value;
    else if (fc.offline) setOffline(true);
  }
  renderMap();
}

// A selected job renders whatever its artifacts support: geojson links
// feed the plume layer, obj links feed the 3D view.
async function loadJob(jobId: string): Promise<void> {
  jobStatus(`job ${jobId}: loading`);
  let result = await client.job(jobId);
  if (result.ok && (result.value.state === "queued" || result.value.state === "running")) {
    jobStatus(`job ${jobId}: ${result.value.state}`);
    result = await pollJob(client, jobId);
  }
  if (!result.ok) {
    if (result.offline) setOffline(true);
    else jobStatus(`job ${jobId}: ${result.detail}`);
    return;
  }
  const job = result.value;
  jobStatus(`job ${jobId}: ${job.state}${job.error ? ` (${job.error})` : ""}`);
  if (job.state !== "done") return;
  if (job.kind === "smoke3d") {
    state.smokeJob = job;
    state.meshes.clear();
    state.camera = null;
    await loadMesh(state.view.horizon);
  } else {
    await loadFootprintsFromJob(job);
  }
}

async function restoreHistoryEntry(entry: HistoryEntry): Promise<void> {
  if (entry.city !== state.view.city) {
    state.view.city = entry.city;
    await loadCityData();
  }
  state.view.jobId = entry.jobId;
  enableLayers("plume", "smoke");
  syncUrl();
  renderControls();
  const plumeJob = await client.job(entry.plume2dJobId);
  if (plumeJob.ok && plumeJob.value.state === "done") {
    await loadFootprintsFromJob(plumeJob.value);
  }
  await loadJob(entry.jobId);
  renderMap();
}

function enableLayers(...names: LayerName[]): void {
  const want = new Set<LayerName>([...state.view.layers, ...names]);
  state.view.layers = LAYERS.filter((l) => want.has(l));
}

// ---- scenario form ----

function draftFromForm(): ScenarioDraft | null {
  if (!state.draft) return null;
  const speedRaw = must<HTMLInputElement>("f-wind-speed").value.trim();
  const dirRaw = must<HTMLInputElement>("f-wind-dir").value.trim();
  return {
    ...state.draft,
    category: must<HTMLInputElement>("f-category").value.trim() || "user scenario",
    windSpeed: speedRaw === "" ? null : Number(speedRaw),
    windFromDirection: dirRaw === "" ? null : Number(dirRaw),
  };
}

function onMapClick(ev: MouseEvent): void {
  const vp = state.vp;
  const city = activeCity();
  if (!vp || !city) return;
  const target = ev.target as Element;
  const incidentId = target.closest(".incident")?.getAttribute("data-id");
  if (incidentId) {
    const inc = state.fires.find((f) => f.id === incidentId);
    const ref = inc?.jobs.smoke3d ?? inc?.jobs.plume2d;
    if (ref) {
      state.view.jobId = ref.job_id;
      syncUrl();
      renderMap();
      void loadJob(ref.job_id);
    }
    return;
  }
  const rect = must<HTMLDivElement>("map").getBoundingClientRect();
  const { lat, lon } = unproject(vp, ev.clientX - rect.left, ev.clientY - rect.top);
  if (!inDomain(city.center, city.domain_radius_m, lat, lon)) {
    const km = (city.domain_radius_m / 1000).toFixed(0);
    formMsg(`That point is outside the ${city.city} forecast domain (${km} km around the city center). Pick a point inside the dashed circle.`);
    return;
  }
  formMsg("");
  const prior = draftFromForm();
  state.draft = {
    lat,
    lon,
    category: prior?.category ?? "user scenario",
    city: city.city,
    windSpeed: prior?.windSpeed ?? null,
    windFromDirection: prior?.windFromDirection ?? null,
  };
  saveDraft(storage, state.draft);
  renderDraftForm();
  renderMap();
}

async function onScenarioSubmit(ev: Event): Promise<void> {
  ev.preventDefault();
  const draft = draftFromForm();
  if (!draft) {
    formMsg("Click the map to choose an ignition point first.");
    return;
  }
  state.draft = draft;
  saveDraft(storage, draft);
  const req: ScenarioRequest = {
    lat: draft.lat,
    lon: draft.lon,
    category: draft.category,
    city: draft.city ?? null,
    wind_speed: draft.windSpeed ?? null,
    wind_from_direction: draft.windFromDirection ?? null,
    horizons: [...HORIZONS],
  };
  formMsg("");
  jobStatus("submitting scenario");
  const res = await client.scenario(req);
  if (!res.ok) {
    if (res.offline) {
      setOffline(true);
      jobStatus("");
    } else if (res.status === 429) {
      formMsg("The simulation queue is full; try again in a minute.");
      jobStatus("");
    } else {
      formMsg(res.detail);
      jobStatus("");
    }
    return;
  }
  const out = res.value;
  setCalm(out.calm);
  state.footprints = out.footprints;
  state.view.jobId = out.job_id;
  enableLayers("plume", "smoke");
  pushHistory(storage, {
    jobId: out.job_id,
    plume2dJobId: out.plume2d_job_id,
    city: out.city,
    category: draft.category,
    lat: draft.lat,
    lon: draft.lon,
    calm: out.calm,
    submittedAt: new Date().toISOString(),
  });
  state.draft = null;
  clearDraft(storage);
  renderDraftForm();
  renderHistory();
  renderControls();
  syncUrl();
  renderMap();
  jobStatus(`3D job ${out.job_id}: ${out.state}`);
  await loadJob(out.job_id);
}

// ---- control events ----

function onLayerChange(): void {
  const checked = new Set<string>();
  document
    .querySelectorAll<HTMLInputElement>('input[name="layer"]:checked')
    .forEach((el) => checked.add(el.value));
  state.view.layers = LAYERS.filter((l) => checked.has(l));
  syncUrl();
  renderMap();
  drawMesh();
  if (state.view.layers.includes("smoke")) void loadMesh(state.view.horizon);
}

function onHorizonChange(ev: Event): void {
  state.view.horizon = parseHorizon((ev.target as HTMLInputElement).value);
  syncUrl();
  renderMap();
  if (state.view.layers.includes("smoke")) void loadMesh(state.view.horizon);
}

async function onCityChange(ev: Event): Promise<void> {
  state.view.city = (ev.target as HTMLSelectElement).value;
  state.view.jobId = null;
  state.footprints = {};
  state.smokeJob = null;
  state.meshes.clear();
  state.camera = null;
  setCalm(false);
  syncUrl();
  await loadCityData();
  drawMesh();
}

function wireMeshOrbit(): void {
  const canvas = must<HTMLCanvasElement>("mesh");
  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("mousedown", (ev) => {
    dragging = true;
    lastX = ev.clientX;
    lastY = ev.clientY;
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
  window.addEventListener("mousemove", (ev) => {
    if (!dragging || !state.camera) return;
    state.camera.yaw += (ev.clientX - lastX) * 0.01;
    state.camera.pitch = Math.max(
      0.05,
      Math.min(Math.PI / 2 - 0.05, state.camera.pitch + (ev.clientY - lastY) * 0.01),
    );
    lastX = ev.clientX;
    lastY = ev.clientY;
    drawMesh();
  });
}

// ---- boot ----

async function main(): Promise<void> {
  must<HTMLDivElement>("map").addEventListener("click", onMapClick);
  must<HTMLFormElement>("scenario-form").addEventListener("submit", (ev) => void onScenarioSubmit(ev));
  must<HTMLSelectElement>("city").addEventListener("change", (ev) => void onCityChange(ev));
  document
    .querySelectorAll<HTMLInputElement>('input[name="layer"]')
    .forEach((el) => el.addEventListener("change", onLayerChange));
  document
    .querySelectorAll<HTMLInputElement>('input[name="horizon"]')
    .forEach((el) => el.addEventListener("change", onHorizonChange));
  wireMeshOrbit();

  state.draft = loadDraft(storage);
  renderHistory();
  renderControls();

  const cities = await client.cities();
  if (!cities.ok) {
    if (cities.offline) setOffline(true);
    else formMsg(`Could not list cities: ${cities.detail}`);
    return;
  }
  state.cities = cities.value.cities;
  const select = must<HTMLSelectElement>("city");
  select.innerHTML = "";
  for (const c of state.cities) {
    const opt = document.createElement("option");
    opt.value = c.city;
    opt.textContent = c.city;
    select.appendChild(opt);
  }
  if (!activeCity()) state.view.city = state.cities[0]?.city ?? null;
  if (state.view.city) select.value = state.view.city;
  syncUrl();
  renderDraftForm();
  await loadCityData();
  if (state.view.jobId) await loadJob(state.view.jobId);
}

void main();
