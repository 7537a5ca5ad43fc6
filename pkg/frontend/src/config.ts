import { BUILD_API_BASE } from "./generated/build_config.js";

// API base resolution order: runtime global, then the page's meta tag,
// then the value baked at build time, then same-origin relative paths.
// Trailing slashes are stripped so path joins stay predictable.
export function resolveApiBase(runtimeGlobal?: unknown, metaContent?: string | null): string {
  for (const candidate of [runtimeGlobal, metaContent, BUILD_API_BASE]) {
    if (typeof candidate === "string" && candidate.trim() !== "") {
      return candidate.trim().replace(/\/+$/, "");
    }
  }
  return "";
}

export function apiBaseFromDocument(doc: Document): string {
  const meta = doc.querySelector('meta[name="firetwin-api-base"]');
  const fromGlobal = (globalThis as { FIRETWIN_API_BASE?: unknown }).FIRETWIN_API_BASE;
  return resolveApiBase(fromGlobal, meta?.getAttribute("content"));
}
