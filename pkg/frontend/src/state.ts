// Scenario draft and submission history. Both live in sessionStorage so
// a reload keeps them but tabs stay independent. The storage interface
// is injected; tests pass a plain in-memory fake.

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface ScenarioDraft {
  lat: number;
  lon: number;
  category: string;
  city?: string | null;
  windSpeed?: number | null;
  windFromDirection?: number | null;
}

export interface HistoryEntry {
  jobId: string;
  plume2dJobId: string;
  city: string;
  category: string;
  lat: number;
  lon: number;
  calm: boolean;
  submittedAt: string;
}

const DRAFT_KEY = "firetwin.draft";
const HISTORY_KEY = "firetwin.history";
export const HISTORY_LIMIT = 20;

// A single key holds the draft, so saving always replaces: there is
// never more than one draft.
export function saveDraft(store: StorageLike, draft: ScenarioDraft): void {
  store.setItem(DRAFT_KEY, JSON.stringify(draft));
}

export function loadDraft(store: StorageLike): ScenarioDraft | null {
  const raw = store.getItem(DRAFT_KEY);
  if (raw === null) return null;
  try {
    const parsed = JSON.parse(raw) as ScenarioDraft;
    if (
      typeof parsed.lat === "number" &&
      typeof parsed.lon === "number" &&
      typeof parsed.category === "string"
    ) {
      return parsed;
    }
  } catch {
    // corrupt entry, treat as absent
  }
  return null;
}

export function clearDraft(store: StorageLike): void {
  store.removeItem(DRAFT_KEY);
}

function isEntry(value: unknown): value is HistoryEntry {
  const e = value as HistoryEntry;
  return (
    typeof e === "object" &&
    e !== null &&
    typeof e.jobId === "string" &&
    typeof e.plume2dJobId === "string" &&
    typeof e.city === "string" &&
    typeof e.category === "string" &&
    typeof e.lat === "number" &&
    typeof e.lon === "number" &&
    typeof e.calm === "boolean" &&
    typeof e.submittedAt === "string"
  );
}

export function loadHistory(store: StorageLike): HistoryEntry[] {
  const raw = store.getItem(HISTORY_KEY);
  if (raw === null) return [];
  try {
    const parsed: unknown = JSON.parse(raw);
    if (Array.isArray(parsed)) return parsed.filter(isEntry);
  } catch {
    // corrupt entry, treat as empty
  }
  return [];
}

// Newest first, capped; returns the stored list.
export function pushHistory(store: StorageLike, entry: HistoryEntry): HistoryEntry[] {
  const next = [entry, ...loadHistory(store)].slice(0, HISTORY_LIMIT);
  store.setItem(HISTORY_KEY, JSON.stringify(next));
  return next;
}
