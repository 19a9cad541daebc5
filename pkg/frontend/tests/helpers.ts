/** Test doubles: a counting map adapter and a route-table fetch mock. */

import { vi } from 'vitest';
import type { MapAdapter, MarkerSpec } from '../src/map.js';
import type { BaseLayer, ZoneState } from '../src/filters.js';

export class FakeMapAdapter implements MapAdapter {
  markers: MarkerSpec[] = [];
  baseLayer: BaseLayer = 'street';
  zone: ZoneState | null = null;
  clears = 0;
  private zoneHandler: ((zone: ZoneState) => void) | null = null;

  clearMarkers(): void {
    this.markers = [];
    this.clears += 1;
  }

  addMarker(spec: MarkerSpec): void {
    this.markers.push(spec);
  }

  markerCount(): number {
    return this.markers.length;
  }

  setBaseLayer(layer: BaseLayer): void {
    this.baseLayer = layer;
  }

  drawZone(zone: ZoneState | null): void {
    this.zone = zone;
  }

  onZoneEdited(handler: (zone: ZoneState) => void): void {
    this.zoneHandler = handler;
  }

  editZone(zone: ZoneState): void {
    this.zoneHandler?.(zone);
  }

  byId(id: number): MarkerSpec {
    const spec = this.markers.find((m) => m.id === id);
    if (!spec) throw new Error(`no marker ${id} on the fake map`);
    return spec;
  }
}

export type Route = [matcher: string | RegExp, payload: unknown];

/** Install a fetch mock answering from a route table (first match wins). */
export function mockFetch(routes: Route[]) {
  const calls: string[] = [];
  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push(url);
    if (init?.method && init.method !== 'GET') {
      throw new Error(`read-only console: unexpected ${init.method} ${url}`);
    }
    const signal = init?.signal;
    if (signal?.aborted) {
      throw new DOMException('aborted', 'AbortError');
    }
    for (const [matcher, payload] of routes) {
      const hit =
        typeof matcher === 'string' ? url.startsWith(matcher) : matcher.test(url);
      if (hit) {
        return new Response(JSON.stringify(payload), {
          status: 200,
          headers: { 'content-type': 'application/json' },
        });
      }
    }
    return new Response(JSON.stringify({ detail: 'not found' }), { status: 404 });
  });
  vi.stubGlobal('fetch', mock);
  return { mock, calls };
}
