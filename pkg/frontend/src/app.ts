/** Console bootstrap: wires the map, filter controls, detail pane and
 * live report against the API served from the same origin. */

import { ApiClient } from './api.js';
import { DetailPane } from './detail.js';
import { FilterController } from './filters.js';
import type { SlotHours } from './types.js';
import { SLOT_HOURS } from './types.js';
import { renderMarkers } from './map.js';
import { LeafletAdapter } from './leaflet-adapter.js';
import { ReportPane } from './report.js';

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function bootstrap(): void {
  const api = new ApiClient('');
  const adapter = new LeafletAdapter(byId('map'));
  const statusLine = byId<HTMLElement>('status');
  const detail = new DetailPane(
    byId('detail'),
    api,
    () => controller.state.slot,
  );
  const reportPane = new ReportPane(byId('report'), api);

  const controller = new FilterController(
    (feed) => {
      renderMarkers(adapter, feed, (entry) => void detail.showMarker(entry));
      statusLine.textContent = `${feed.length} marker(s) on the map`;
      statusLine.classList.remove('error');
    },
    () => {
      statusLine.textContent = 'feed request failed — showing stale markers';
      statusLine.classList.add('error');
    },
  );

  // device filter checkboxes
  void api.fetchDevices().then((devices) => {
    const list = byId<HTMLElement>('devices');
    for (const device of devices) {
      const label = document.createElement('label');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.value = device.fake_id;
      box.addEventListener('change', () => {
        if (box.checked) controller.state.devices.add(device.fake_id);
        else controller.state.devices.delete(device.fake_id);
        controller.update({});
      });
      label.append(
        box,
        ` ${device.ordre}. ${device.fake_id} (${device.nb_fake_id})`,
      );
      list.append(label);
    }
  });

  // date range
  byId<HTMLInputElement>('date-from').addEventListener('change', (ev) => {
    const value = (ev.target as HTMLInputElement).value;
    controller.update({ dateFrom: value || null });
  });
  byId<HTMLInputElement>('date-to').addEventListener('change', (ev) => {
    const value = (ev.target as HTMLInputElement).value;
    controller.update({ dateTo: value || null });
  });

  // slot selector
  const slotSelect = byId<HTMLSelectElement>('slot');
  for (const slot of SLOT_HOURS) {
    const option = document.createElement('option');
    option.value = String(slot);
    option.textContent = `±${slot} h`;
    slotSelect.append(option);
  }
  slotSelect.addEventListener('change', () => {
    controller.update({ slot: Number(slotSelect.value) as SlotHours });
  });

  // zone controls: click the map to drop a circle of the chosen radius
  const radiusInput = byId<HTMLInputElement>('zone-radius');
  byId<HTMLButtonElement>('zone-clear').addEventListener('click', () => {
    adapter.drawZone(null);
    controller.update({ zone: null });
  });
  adapter.onZoneEdited((zone) => controller.update({ zone }));
  byId<HTMLButtonElement>('zone-set').addEventListener('click', () => {
    const radiusKm = Number(radiusInput.value) || 5;
    const center = (adapter as any).map.getCenter();
    const zone = { lat: center.lat, lng: center.lng, radiusKm };
    adapter.drawZone(zone);
    controller.update({ zone });
  });

  // base layer toggle
  const layerToggle = byId<HTMLSelectElement>('layer');
  layerToggle.addEventListener('change', () => {
    const layer = layerToggle.value === 'satellite' ? 'satellite' : 'street';
    adapter.setBaseLayer(layer);
    controller.update({ baseLayer: layer });
  });

  // live report
  byId<HTMLButtonElement>('report-refresh').addEventListener('click', () => {
    void reportPane.render(controller.state);
  });

  void controller.refresh();
}

if (typeof document !== 'undefined' && document.getElementById('map')) {
  bootstrap();
}
