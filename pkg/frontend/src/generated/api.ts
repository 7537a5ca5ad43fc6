// Generated from api_schema.json (schema version 1.0.0).
// Do not edit; run `npm run codegen` to refresh.

export interface Health {
  status: "ok";
  queue_depth: number;
}

export interface CityList {
  cities: Array<{
    city: string;
    center: {
      lat: number;
      lon: number;
    };
    domain_radius_m: number;
    has_risk_layer: boolean;
  }>;
}

export type HorizonLinks = Record<string, Record<string, string>>;

export interface JobRef {
  job_id: string;
  state: "queued" | "running" | "done" | "failed";
  links: HorizonLinks;
}

export interface Incident {
  id: string;
  city: string;
  name: string;
  timestamp: string;
  lat: number;
  lon: number;
  address: string;
  department: string;
  status: "active" | "resolved";
  jobs: {
    plume2d?: JobRef;
    smoke3d?: JobRef;
  };
}

export interface FiresPage {
  city: string;
  count: number;
  page: number;
  page_size: number;
  incidents: Incident[];
}

export interface GeoJSONGeometry {
  type: "Polygon" | "MultiPolygon" | "Point" | "LineString";
  coordinates: unknown[];
}

export interface GeoJSONFeature {
  type: "Feature";
  geometry: GeoJSONGeometry;
  properties: Record<string, unknown>;
}

export interface FeatureCollection {
  type: "FeatureCollection";
  features: GeoJSONFeature[];
}

export type RiskLayer = FeatureCollection & {
  city: string;
  window: {
    start: string;
    end: string;
  };
  features: Array<GeoJSONFeature & {
    properties?: {
      tract_id: string;
      count: number;
      rate: number;
      risk_class: "below_average" | "normal" | "above_average";
    };
  }>;
};

export interface ScenarioRequest {
  lat: number;
  lon: number;
  category: string;
  city?: string | null;
  wind_speed?: number | null;
  wind_from_direction?: number | null;
  when?: string | null;
  horizons?: number[] | null;
}

export interface ScenarioResponse {
  city: string;
  job_id: string;
  state: "queued" | "running" | "done" | "failed";
  plume2d_job_id: string;
  calm: boolean;
  weather?: Record<string, unknown>;
  footprints: Record<string, FeatureCollection>;
  links: {
    job: string;
    plume2d?: HorizonLinks;
  };
}

export interface Job {
  job_id: string;
  kind: "plume2d" | "smoke3d";
  city: string;
  state: "queued" | "running" | "done" | "failed";
  incident_id?: string | null;
  scenario?: Record<string, unknown>;
  artifacts: Record<string, Record<string, string>>;
  error?: string | null;
  created_at: string;
  updated_at: string;
  links: HorizonLinks;
}

export interface Error {
  detail: unknown;
}
