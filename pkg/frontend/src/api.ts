// HTTP client for the forecast service. Failures come back as values so
// the UI can show an offline banner or an inline message instead of
// catching exceptions everywhere. POST /scenario is the only call that
// changes server state; everything else is a read.

import type {
  CityList,
  FeatureCollection,
  FiresPage,
  Health,
  HorizonLinks,
  Job,
  RiskLayer,
  ScenarioRequest,
  ScenarioResponse,
} from "./generated/api.js";

export type ApiResult<T> =
  | { ok: true; value: T }
  | { ok: false; offline: true }
  | { ok: false; offline: false; status: number; detail: string };

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
  } catch {
    // non-JSON error body, fall through to the status line
  }
  return res.statusText || `HTTP ${res.status}`;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    path: string,
    init: RequestInit | undefined,
    parse: (res: Response) => Promise<T>,
  ): Promise<ApiResult<T>> {
    let res: Response;
    try {
      res = await this.fetchFn(this.baseUrl + path, init);
    } catch {
      return { ok: false, offline: true };
    }
    if (!res.ok) {
      return { ok: false, offline: false, status: res.status, detail: await errorDetail(res) };
    }
    try {
      return { ok: true, value: await parse(res) };
    } catch {
      return { ok: false, offline: false, status: res.status, detail: "unreadable response body" };
    }
  }

  private getJson<T>(path: string): Promise<ApiResult<T>> {
    return this.request<T>(path, undefined, (res) => res.json() as Promise<T>);
  }

  health(): Promise<ApiResult<Health>> {
    return this.getJson<Health>("/healthz");
  }

  cities(): Promise<ApiResult<CityList>> {
    return this.getJson<CityList>("/cities");
  }

  fires(city: string, page = 1, pageSize = 200): Promise<ApiResult<FiresPage>> {
    const q = new URLSearchParams({ city, page: String(page), page_size: String(pageSize) });
    return this.getJson<FiresPage>(`/fires?${q}`);
  }

  risk(city: string): Promise<ApiResult<RiskLayer>> {
    const q = new URLSearchParams({ city });
    return this.getJson<RiskLayer>(`/risk?${q}`);
  }

  job(jobId: string): Promise<ApiResult<Job>> {
    return this.getJson<Job>(`/jobs/${encodeURIComponent(jobId)}`);
  }

  scenario(req: ScenarioRequest): Promise<ApiResult<ScenarioResponse>> {
    return this.request<ScenarioResponse>(
      "/scenario",
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(req),
      },
      (res) => res.json() as Promise<ScenarioResponse>,
    );
  }

  footprint(link: string): Promise<ApiResult<FeatureCollection>> {
    return this.getJson<FeatureCollection>(link);
  }

  meshText(link: string): Promise<ApiResult<string>> {
    return this.request<string>(link, undefined, (res) => res.text());
  }
}

// The map consumes geojson footprints and the 3D view consumes obj
// meshes; restricting the extension here keeps other formats out of the
// UI entirely.
export type ArtifactExt = "geojson" | "obj";

export function artifactLink(links: HorizonLinks, horizon: number, ext: ArtifactExt): string | null {
  const byExt = links[String(horizon)];
  if (!byExt) return null;
  return byExt[ext] ?? null;
}

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

// Polls until the job leaves the queue (done or failed). Transport
// errors end the poll immediately so the caller can raise the banner.
export async function pollJob(
  client: ApiClient,
  jobId: string,
  opts: PollOptions = {},
): Promise<ApiResult<Job>> {
  const interval = opts.intervalMs ?? 1500;
  const timeout = opts.timeoutMs ?? 180_000;
  const sleep = opts.sleep ?? defaultSleep;
  let waited = 0;
  for (;;) {
    const result = await client.job(jobId);
    if (!result.ok) return result;
    if (result.value.state === "done" || result.value.state === "failed") return result;
    if (waited >= timeout) {
      return { ok: false, offline: false, status: 0, detail: `job ${jobId} still ${result.value.state}` };
    }
    await sleep(interval);
    waited += interval;
  }
}
