/** Live report pane: re-renders for the current filters on demand. */

import type { ApiClient } from './api.js';
import type { UiFilterState } from './filters.js';
import { toQueryString } from './filters.js';
import type { ReportJson } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ReportPane {
  refreshCount = 0;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async render(state: UiFilterState): Promise<ReportJson> {
    this.refreshCount += 1;
    const report = await this.api.fetchReport(toQueryString(state), state.slot);
    this.container.replaceChildren();
    const box = el('div', 'report');
    box.append(el('h2', undefined, 'Live report'));
    box.append(el('p', 'report-filter', `Filters: ${report.filter}`));
    box.append(el('p', 'report-note', report.device_note));
    if (report.no_matches) {
      box.append(el('p', 'report-empty', 'No markers match the current filters.'));
    }

    const devices = el('table', 'report-devices');
    for (const device of report.device_summary) {
      const tr = el('tr');
      tr.append(
        el('td', undefined, String(device.ordre)),
        el('td', undefined, device.fake_id),
        el('td', undefined, String(device.nb_fake_id)),
      );
      devices.append(tr);
    }
    box.append(devices);

    const entries = el('div', 'report-entries');
    for (const entry of report.entries) {
      const item = el('div', 'report-entry');
      item.append(el('b', undefined, entry.name));
      item.append(
        el(
          'span',
          undefined,
          ` ${entry.fake_id} — ${entry.datetime ?? 'undated'} @ ` +
            `${entry.lat.toFixed(6)}, ${entry.lng.toFixed(6)}`,
        ),
      );
      for (const finding of entry.findings) {
        item.append(el('div', 'finding', `[${finding.code}] ${finding.detail}`));
      }
      if (entry.linked.length > 0) {
        const linked = el(
          'div',
          'report-linked',
          `linked non-geotagged (±${report.slot_hours}h): ` +
            entry.linked.map((l) => l.name).join(', '),
        );
        item.append(linked);
      }
      entries.append(item);
    }
    box.append(entries);

    const timeline = el('table', 'report-timeline');
    for (const group of report.timeline) {
      const tr = el('tr');
      tr.append(
        el('td', undefined, group.day ?? 'undated'),
        el('td', undefined, group.marker_ids.join(', ')),
      );
      timeline.append(tr);
    }
    box.append(timeline);

    this.container.append(box);
    return report;
  }
}
