/** Map abstraction: marker rendering is tile-library-agnostic. */

import type { MarkerFeedEntry } from './types.js';
import type { BaseLayer, ZoneState } from './filters.js';

/** Matches the scanner's palette indexing: color = (ordre - 1) mod 10. */
export const PALETTE = [
  '#d32f2f',
  '#1976d2',
  '#388e3c',
  '#f57c00',
  '#7b1fa2',
  '#00838f',
  '#c2185b',
  '#5d4037',
  '#455a64',
  '#9e9d24',
] as const;

export function colorFor(ordre: number): string {
  return PALETTE[(ordre - 1) % PALETTE.length];
}

export interface MarkerSpec {
  id: number;
  lat: number;
  lng: number;
  /** device rank, shown as the icon label */
  label: string;
  color: string;
  /** true when other images share these exact coordinates */
  starred: boolean;
  title: string;
  onClick: () => void;
}

export interface MapAdapter {
  clearMarkers(): void;
  addMarker(spec: MarkerSpec): void;
  markerCount(): number;
  setBaseLayer(layer: BaseLayer): void;
  drawZone(zone: ZoneState | null): void;
  /** invoked when the user drags/resizes the zone circle */
  onZoneEdited(handler: (zone: ZoneState) => void): void;
}

export function markerSpecFrom(
  entry: MarkerFeedEntry,
  onClick: (entry: MarkerFeedEntry) => void,
): MarkerSpec {
  return {
    id: entry.id,
    lat: entry.lat,
    lng: entry.lng,
    label: String(entry.ordre),
    color: colorFor(entry.ordre),
    starred: entry.multiples > 0,
    title: `${entry.name}\nBrand: ${entry.brand}\nModel: ${entry.model}\nDate: ${entry.date}`,
    onClick: () => onClick(entry),
  };
}

/** Replace the marker layer with one marker per feed entry. */
export function renderMarkers(
  adapter: MapAdapter,
  feed: MarkerFeedEntry[],
  onClick: (entry: MarkerFeedEntry) => void,
): void {
  adapter.clearMarkers();
  for (const entry of feed) {
    adapter.addMarker(markerSpecFrom(entry, onClick));
  }
}
