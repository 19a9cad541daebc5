/** Wire types for the workbench API. */

export const SLOT_HOURS = [1, 2, 3, 4, 5, 12, 24] as const;
export type SlotHours = (typeof SLOT_HOURS)[number];

export interface MarkerFeedEntry {
  name: string;
  brand: string;
  model: string;
  fake_id: string;
  date: string; // "DD.MM.YYYY HH:MM:SS" or "" when the device gave no time
  lat: number;
  lng: number;
  id: number;
  ordre: number;
  multiples: number;
  non_geotaggees: string;
  nb_fake_id: number;
  non_geotag_h1: number;
  non_geotag_h2: number;
  non_geotag_h3: number;
  non_geotag_h4: number;
  non_geotag_h5: number;
  non_geotag_h12: number;
  non_geotag_h24: number;
}

export function slotCount(entry: MarkerFeedEntry, slot: SlotHours): number {
  return entry[`non_geotag_h${slot}` as keyof MarkerFeedEntry] as number;
}

export interface DeviceEntry {
  fake_id: string;
  make: string;
  model: string;
  ordre: number;
  color: number;
  nb_fake_id: number;
}

export interface LinkedEntry {
  id: number;
  name: string;
  path: string;
  datetime: string | null;
  thumb_url: string | null;
}

export interface LinkedResponse {
  marker_id: number;
  slot_hours: number;
  caveat: string;
  entries: LinkedEntry[];
}

export interface GroupEntry {
  id: number;
  name: string;
  reference: boolean;
  datetime: string | null;
  thumb_url: string | null;
}

export interface MetaResponse {
  id: number;
  name: string;
  path: string;
  content_hash: string;
  fake_id: string;
  make: string;
  model: string;
  datetime: string | null;
  thumb_name: string | null;
  metadata: Record<string, unknown>;
  findings: { code: string; severity: string; detail: string }[];
  geotagged: boolean;
  lat?: number;
  lng?: number;
  gps_datetime?: string | null;
  address?: string | null;
  altitude_m?: number | null;
  multiples?: number;
  reference?: boolean;
  ordre?: number;
  nb_fake_id?: number;
  slot_counts?: Record<string, number>;
  same_location_group?: GroupEntry[];
}

export interface ReportEntry {
  id: number;
  name: string;
  path: string;
  fake_id: string;
  make: string;
  model: string;
  datetime: string | null;
  lat: number;
  lng: number;
  multiples: number;
  ordre: number;
  address: string | null;
  thumb_name: string | null;
  findings: { code: string; severity: string; detail: string }[];
  linked: { id: number; name: string; path: string; datetime: string | null }[];
}

export interface ReportJson {
  generated_at: string;
  filter: string;
  slot_hours: number;
  no_matches: boolean;
  linked_caveat: string;
  device_note: string;
  device_summary: { fake_id: string; nb_fake_id: number; ordre: number }[];
  entries: ReportEntry[];
  timeline: { day: string | null; marker_ids: number[] }[];
}
