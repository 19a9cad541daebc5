import { afterEach, describe, expect, it, vi } from 'vitest';

import markersFixture from './fixtures/markers.json';
import sonyFixture from './fixtures/markers_sony.json';
import { FakeMapAdapter } from './helpers.js';
import { colorFor, markerSpecFrom, renderMarkers } from '../src/map.js';
import type { MarkerFeedEntry } from '../src/types.js';

const markers = markersFixture as MarkerFeedEntry[];
const sony = sonyFixture as MarkerFeedEntry[];

afterEach(() => vi.restoreAllMocks());

describe('renderMarkers', () => {
  it('renders exactly one map marker per feed entry', () => {
    const adapter = new FakeMapAdapter();
    renderMarkers(adapter, markers, () => {});
    expect(adapter.markerCount()).toBe(markers.length);
    expect(adapter.markerCount()).toBe(13);
  });

  it('replaces the layer when a filtered feed arrives', () => {
    const adapter = new FakeMapAdapter();
    renderMarkers(adapter, markers, () => {});
    renderMarkers(adapter, sony, () => {});
    expect(adapter.markerCount()).toBe(sony.length);
    expect(adapter.clears).toBe(2);
  });

  it('stars markers that share coordinates with other images', () => {
    const adapter = new FakeMapAdapter();
    renderMarkers(adapter, markers, () => {});
    const starred = adapter.markers.filter((m) => m.starred);
    expect(starred.length).toBe(1);
    const entry = markers.find((m) => m.id === starred[0].id)!;
    expect(entry.multiples).toBe(5);
  });

  it('labels icons with the device rank', () => {
    const adapter = new FakeMapAdapter();
    renderMarkers(adapter, markers, () => {});
    const top = markers.find((m) => m.name === 'DSC04487.JPG')!;
    expect(adapter.byId(top.id).label).toBe('1');
    expect(adapter.byId(top.id).color).toBe(colorFor(1));
  });

  it('routes clicks back to the feed entry', () => {
    const adapter = new FakeMapAdapter();
    const clicked: string[] = [];
    renderMarkers(adapter, markers, (entry) => clicked.push(entry.name));
    adapter.byId(markers[0].id).onClick();
    expect(clicked).toEqual([markers[0].name]);
  });

  it('renders an empty feed as an empty layer', () => {
    const adapter = new FakeMapAdapter();
    renderMarkers(adapter, markers, () => {});
    renderMarkers(adapter, [], () => {});
    expect(adapter.markerCount()).toBe(0);
  });
});

describe('markerSpecFrom', () => {
  it('carries a tooltip with name, device and date', () => {
    const entry = markers.find((m) => m.name === 'DSC04487.JPG')!;
    const spec = markerSpecFrom(entry, () => {});
    expect(spec.title).toContain('DSC04487.JPG');
    expect(spec.title).toContain('SONY');
    expect(spec.title).toContain('11.08.2013 16:03:41');
    expect(spec.lat).toBeCloseTo(43.20364, 6);
  });
});
