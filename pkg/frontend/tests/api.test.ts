import { describe, expect, test } from "vitest";
import { ApiClient, artifactLink, pollJob, type FetchLike } from "../src/api.js";
import type { HorizonLinks, Job } from "../src/generated/api.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function recordingFetch(
  handler: (url: string, init?: RequestInit) => Response,
): { fn: FetchLike; calls: Call[] } {
  const calls: Call[] = [];
  const fn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return handler(url, init);
  };
  return { fn, calls };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("request discipline", () => {
  test("only POST /scenario mutates; every other call is a GET", async () => {
    const { fn, calls } = recordingFetch((url) =>
      url.endsWith(".obj") ? new Response("v 0 0 0") : jsonResponse({}),
    );
    const client = new ApiClient("http://svc", fn);
    await client.health();
    await client.cities();
    await client.fires("austin");
    await client.risk("austin");
    await client.job("j1");
    await client.footprint("/smoke/j1/1.geojson");
    await client.meshText("/smoke/j1/1.obj");
    await client.scenario({ lat: 30.2, lon: -97.7, category: "test" });

    expect(calls).toHaveLength(8);
    const posts = calls.filter((c) => c.init?.method === "POST");
    expect(posts).toHaveLength(1);
    expect(posts[0].url).toBe("http://svc/scenario");
    for (const call of calls) {
      if (call !== posts[0]) {
        expect(call.init?.method ?? "GET").toBe("GET");
      }
    }
  });

  test("paths and query strings", async () => {
    const { fn, calls } = recordingFetch(() => jsonResponse({}));
    const client = new ApiClient("http://svc", fn);
    await client.fires("austin", 2, 50);
    await client.risk("austin");
    await client.job("a b");
    expect(calls.map((c) => c.url)).toEqual([
      "http://svc/fires?city=austin&page=2&page_size=50",
      "http://svc/risk?city=austin",
      "http://svc/jobs/a%20b",
    ]);
  });

  test("scenario request body passes through unchanged", async () => {
    const { fn, calls } = recordingFetch(() => jsonResponse({}));
    const client = new ApiClient("", fn);
    const req = {
      lat: 30.25,
      lon: -97.75,
      category: "grass fire",
      wind_speed: 4,
      wind_from_direction: 270,
      horizons: [1, 2, 3],
    };
    await client.scenario(req);
    expect(JSON.parse(String(calls[0].init?.body))).toEqual(req);
    expect(calls[0].init?.headers).toEqual({ "content-type": "application/json" });
  });
});

describe("failure mapping", () => {
  test("network failure reports offline", async () => {
    const client = new ApiClient("http://svc", async () => {
      throw new TypeError("fetch failed");
    });
    const res = await client.cities();
    expect(res).toEqual({ ok: false, offline: true });
  });

  test("http error carries status and detail", async () => {
    const { fn } = recordingFetch(() => jsonResponse({ detail: "outside every domain" }, 422));
    const res = await new ApiClient("", fn).scenario({ lat: 0, lon: 0, category: "x" });
    expect(res).toEqual({
      ok: false,
      offline: false,
      status: 422,
      detail: "outside every domain",
    });
  });

  test("structured detail is serialized", async () => {
    const { fn } = recordingFetch(() => jsonResponse({ detail: [{ loc: "lat" }] }, 422));
    const res = await new ApiClient("", fn).cities();
    expect(res.ok).toBe(false);
    if (!res.ok && !res.offline) expect(res.detail).toBe('[{"loc":"lat"}]');
  });

  test("non-json error body falls back to the status line", async () => {
    const { fn } = recordingFetch(
      () => new Response("<html>", { status: 502, statusText: "Bad Gateway" }),
    );
    const res = await new ApiClient("", fn).health();
    expect(res.ok).toBe(false);
    if (!res.ok && !res.offline) {
      expect(res.status).toBe(502);
      expect(res.detail).toBe("Bad Gateway");
    }
  });

  test("unparseable success body is reported, not thrown", async () => {
    const { fn } = recordingFetch(() => new Response("not json", { status: 200 }));
    const res = await new ApiClient("", fn).health();
    expect(res).toEqual({
      ok: false,
      offline: false,
      status: 200,
      detail: "unreadable response body",
    });
  });
});

describe("artifact links", () => {
  const links: HorizonLinks = {
    "1": { geojson: "/smoke/j/1.geojson", kml: "/smoke/j/1.kml" },
    "2": { obj: "/smoke/j/2.obj", grid: "/smoke/j/2.grid" },
  };

  test("picks the requested extension for a horizon", () => {
    expect(artifactLink(links, 1, "geojson")).toBe("/smoke/j/1.geojson");
    expect(artifactLink(links, 2, "obj")).toBe("/smoke/j/2.obj");
  });

  test("missing horizon or extension yields null", () => {
    expect(artifactLink(links, 3, "geojson")).toBeNull();
    expect(artifactLink(links, 1, "obj")).toBeNull();
  });
});

describe("job polling", () => {
  function jobBody(state: Job["state"]): Job {
    return {
      job_id: "j1",
      kind: "smoke3d",
      city: "austin",
      state,
      artifacts: {},
      created_at: "t",
      updated_at: "t",
      links: {},
    };
  }

  test("polls until done", async () => {
    const states: Job["state"][] = ["queued", "running", "done"];
    let i = 0;
    const { fn, calls } = recordingFetch(() => jsonResponse(jobBody(states[i++])));
    const client = new ApiClient("", fn);
    const res = await pollJob(client, "j1", { intervalMs: 1, sleep: async () => {} });
    expect(res.ok).toBe(true);
    if (res.ok) expect(res.value.state).toBe("done");
    expect(calls).toHaveLength(3);
  });

  test("failed jobs end the poll too", async () => {
    const { fn, calls } = recordingFetch(() => jsonResponse(jobBody("failed")));
    const res = await pollJob(new ApiClient("", fn), "j1", { sleep: async () => {} });
    expect(res.ok).toBe(true);
    if (res.ok) expect(res.value.state).toBe("failed");
    expect(calls).toHaveLength(1);
  });

  test("gives up after the timeout", async () => {
    const { fn, calls } = recordingFetch(() => jsonResponse(jobBody("running")));
    const res = await pollJob(new ApiClient("", fn), "j1", {
      intervalMs: 10,
      timeoutMs: 25,
      sleep: async () => {},
    });
    expect(res.ok).toBe(false);
    if (!res.ok && !res.offline) expect(res.status).toBe(0);
    expect(calls.length).toBeGreaterThanOrEqual(3);
  });

  test("transport errors stop the poll immediately", async () => {
    const client = new ApiClient("", async () => {
      throw new TypeError("down");
    });
    const res = await pollJob(client, "j1", { sleep: async () => {} });
    expect(res).toEqual({ ok: false, offline: true });
  });
});
