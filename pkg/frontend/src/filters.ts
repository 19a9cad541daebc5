/** Filter state, its query-string form, and the debounced feed loader. */

import type { MarkerFeedEntry, SlotHours } from './types.js';

export interface ZoneState {
  lat: number;
  lng: number;
  radiusKm: number;
}

export type BaseLayer = 'street' | 'satellite';

export interface UiFilterState {
  zone: ZoneState | null;
  devices: Set<string>;
  dateFrom: string | null; // "YYYY-MM-DD" or "YYYY-MM-DD HH:MM:SS"
  dateTo: string | null;
  slot: SlotHours;
  baseLayer: BaseLayer;
}

export function defaultFilterState(): UiFilterState {
  return {
    zone: null,
    devices: new Set(),
    dateFrom: null,
    dateTo: null,
    slot: 1,
    baseLayer: 'street',
  };
}

/** Serialize the filter controls into the feed's query string. */
export function toQueryString(state: UiFilterState): string {
  const params = new URLSearchParams();
  if (state.zone) {
    params.set('lat', state.zone.lat.toFixed(6));
    params.set('lng', state.zone.lng.toFixed(6));
    params.set('radius_km', String(state.zone.radiusKm));
  }
  for (const device of [...state.devices].sort()) {
    params.append('device', device);
  }
  if (state.dateFrom) params.set('date_from', state.dateFrom);
  if (state.dateTo) params.set('date_to', state.dateTo);
  const text = params.toString();
  return text ? `?${text}` : '';
}

export type FeedListener = (feed: MarkerFeedEntry[], state: UiFilterState) => void;
export type FeedErrorListener = (error: unknown) => void;

/**
 * Owns the filter state and feed fetching: every change schedules one
 * debounced request, newer requests abort older in-flight ones, and the
 * page never reloads.
 */
export class FilterController {
  readonly state: UiFilterState = defaultFilterState();
  requestsIssued = 0;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;

  constructor(
    private readonly onFeed: FeedListener,
    private readonly onError: FeedErrorListener = () => {},
    private readonly debounceMs = 250,
    private readonly baseUrl = '',
  ) {}

  /** Apply a change and schedule a single debounced refresh. */
  update(patch: Partial<UiFilterState>): void {
    Object.assign(this.state, patch);
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.refresh();
    }, this.debounceMs);
  }

  /** Fetch the feed for the current state immediately. */
  async refresh(): Promise<void> {
    if (this.inflight) this.inflight.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.requestsIssued += 1;
    const url = `${this.baseUrl}/markers.json${toQueryString(this.state)}`;
    try {
      const res = await fetch(url, { signal: controller.signal });
      if (!res.ok) throw new Error(`feed request failed: ${res.status}`);
      const feed = (await res.json()) as MarkerFeedEntry[];
      if (!controller.signal.aborted) this.onFeed(feed, this.state);
    } catch (error) {
      if (!controller.signal.aborted) this.onError(error);
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }
}
