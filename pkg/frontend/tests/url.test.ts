import { expect, test } from "vitest";
import {
  DEFAULT_LAYERS,
  defaultViewState,
  formatViewState,
  parseHorizon,
  parseViewState,
  type ViewState,
} from "../src/url.js";

test("empty query yields the default view", () => {
  expect(parseViewState("")).toEqual(defaultViewState());
});

test("horizon only accepts 1, 2 or 3", () => {
  expect(parseHorizon("1")).toBe(1);
  expect(parseHorizon("2")).toBe(2);
  expect(parseHorizon("3")).toBe(3);
  for (const bad of ["0", "4", "-1", "2.5", "x", null]) {
    expect(parseHorizon(bad)).toBe(1);
  }
});

test("layers parse to canonical order with unknowns dropped", () => {
  expect(parseViewState("?layers=plume,risk").layers).toEqual(["risk", "plume"]);
  expect(parseViewState("?layers=risk,bogus,smoke").layers).toEqual(["risk", "smoke"]);
});

test("explicit empty layers means all off, absent means defaults", () => {
  expect(parseViewState("?layers=").layers).toEqual([]);
  expect(parseViewState("?city=austin").layers).toEqual(DEFAULT_LAYERS);
});

test("city and job pass through", () => {
  const v = parseViewState("?city=austin&job=abc123&horizon=3");
  expect(v.city).toBe("austin");
  expect(v.jobId).toBe("abc123");
  expect(v.horizon).toBe(3);
});

test("default state formats to an empty query", () => {
  expect(formatViewState(defaultViewState())).toBe("");
});

test("format and parse round trip", () => {
  const state: ViewState = {
    city: "austin",
    layers: ["fires", "plume", "smoke"],
    jobId: "deadbeef",
    horizon: 2,
  };
  expect(parseViewState(formatViewState(state))).toEqual(state);
});

test("non-default empty layer list survives the round trip", () => {
  const state: ViewState = { city: null, layers: [], jobId: null, horizon: 1 };
  expect(parseViewState(formatViewState(state))).toEqual(state);
});
