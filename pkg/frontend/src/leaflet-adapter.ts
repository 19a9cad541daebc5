/** MapAdapter backed by Leaflet (loaded as a global from index.html).
 * Tile sources are standard public providers; swap URLs to taste. */

import type { MapAdapter, MarkerSpec } from './map.js';
import type { BaseLayer, ZoneState } from './filters.js';

// Leaflet arrives via a <script> tag; keep the typing loose on purpose.
declare const L: any;

const STREET_TILES = 'https://tile.openstreetmap.org/{z}/{x}/{y}.png';
const STREET_ATTRIBUTION = '&copy; OpenStreetMap contributors';
const SATELLITE_TILES =
  'https://server.arcgisonline.com/ArcGIS/rest/services/World_Imagery/MapServer/tile/{z}/{y}/{x}';
const SATELLITE_ATTRIBUTION = 'Imagery &copy; Esri';

export class LeafletAdapter implements MapAdapter {
  private readonly map: any;
  private readonly layer: any;
  private readonly street: any;
  private readonly satellite: any;
  private markers = 0;
  private circle: any = null;
  private zoneHandler: ((zone: ZoneState) => void) | null = null;

  constructor(element: HTMLElement) {
    this.map = L.map(element).setView([45.0, 5.0], 5);
    this.street = L.tileLayer(STREET_TILES, { attribution: STREET_ATTRIBUTION });
    this.satellite = L.tileLayer(SATELLITE_TILES, {
      attribution: SATELLITE_ATTRIBUTION,
    });
    this.street.addTo(this.map);
    this.layer = L.layerGroup().addTo(this.map);
  }

  clearMarkers(): void {
    this.layer.clearLayers();
    this.markers = 0;
  }

  addMarker(spec: MarkerSpec): void {
    const star = spec.starred ? '<span class="marker-star">★</span>' : '';
    const icon = L.divIcon({
      className: 'device-marker',
      html:
        `<span class="marker-pin" style="background:${spec.color}">` +
        `${spec.label}</span>${star}`,
      iconSize: [28, 28],
      iconAnchor: [14, 14],
    });
    const marker = L.marker([spec.lat, spec.lng], {
      icon,
      title: spec.title,
    });
    marker.on('click', spec.onClick);
    marker.addTo(this.layer);
    this.markers += 1;
  }

  markerCount(): number {
    return this.markers;
  }

  setBaseLayer(layer: BaseLayer): void {
    if (layer === 'satellite') {
      this.map.removeLayer(this.street);
      this.satellite.addTo(this.map);
    } else {
      this.map.removeLayer(this.satellite);
      this.street.addTo(this.map);
    }
  }

  drawZone(zone: ZoneState | null): void {
    if (this.circle) {
      this.map.removeLayer(this.circle);
      this.circle = null;
    }
    if (!zone) return;
    this.circle = L.circle([zone.lat, zone.lng], {
      radius: zone.radiusKm * 1000,
      color: '#1976d2',
      weight: 2,
      fillOpacity: 0.08,
    }).addTo(this.map);
    // dragging the circle re-centers the zone
    this.circle.on('mousedown', (down: any) => {
      const move = (ev: any) => {
        this.circle.setLatLng(ev.latlng);
      };
      const up = (ev: any) => {
        this.map.off('mousemove', move);
        this.map.off('mouseup', up);
        this.map.dragging.enable();
        this.zoneHandler?.({
          lat: ev.latlng.lat,
          lng: ev.latlng.lng,
          radiusKm: zone.radiusKm,
        });
      };
      this.map.dragging.disable();
      this.map.on('mousemove', move);
      this.map.on('mouseup', up);
      void down;
    });
  }

  onZoneEdited(handler: (zone: ZoneState) => void): void {
    this.zoneHandler = handler;
  }
}
