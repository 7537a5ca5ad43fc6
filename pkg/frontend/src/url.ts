// Deep links. The query string carries the whole view: city, visible
// layers, selected job and forecast horizon, so a pasted URL restores
// the same screen.

export const LAYERS = ["fires", "risk", "plume", "smoke"] as const;
export type LayerName = (typeof LAYERS)[number];

export const HORIZONS = [1, 2, 3] as const;
export type Horizon = (typeof HORIZONS)[number];

export const DEFAULT_LAYERS: LayerName[] = ["fires", "risk"];

export interface ViewState {
  city: string | null;
  layers: LayerName[];
  jobId: string | null;
  horizon: Horizon;
}

export function defaultViewState(): ViewState {
  return { city: null, layers: [...DEFAULT_LAYERS], jobId: null, horizon: 1 };
}

export function parseHorizon(raw: string | number | null): Horizon {
  const n = typeof raw === "number" ? raw : Number(raw);
  return (HORIZONS as readonly number[]).includes(n) ? (n as Horizon) : 1;
}

function isLayer(name: string): name is LayerName {
  return (LAYERS as readonly string[]).includes(name);
}

// Absent parameter means the default layer set; an explicit empty value
// means every layer toggled off. Unknown names are dropped and the
// result keeps canonical order.
function parseLayers(raw: string | null): LayerName[] {
  if (raw === null) return [...DEFAULT_LAYERS];
  const wanted = new Set(raw.split(",").map((s) => s.trim()).filter(isLayer));
  return LAYERS.filter((l) => wanted.has(l));
}

export function parseViewState(search: string): ViewState {
  const q = new URLSearchParams(search);
  return {
    city: q.get("city"),
    layers: parseLayers(q.get("layers")),
    jobId: q.get("job"),
    horizon: parseHorizon(q.get("horizon")),
  };
}

function sameLayers(a: LayerName[], b: LayerName[]): boolean {
  return a.length === b.length && a.every((l, i) => l === b[i]);
}

// Defaults are omitted so plain visits keep a clean address bar.
export function formatViewState(state: ViewState): string {
  const q = new URLSearchParams();
  if (state.city) q.set("city", state.city);
  if (!sameLayers(state.layers, DEFAULT_LAYERS)) q.set("layers", state.layers.join(","));
  if (state.jobId) q.set("job", state.jobId);
  if (state.horizon !== 1) q.set("horizon", String(state.horizon));
  const s = q.toString();
  return s === "" ? "" : `?${s}`;
}
