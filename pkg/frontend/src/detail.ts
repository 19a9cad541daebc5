/** Detail pane: marker popup, full-size view, same-location gallery and
 * the linked non-geotagged explorer. One pane instance swaps its views. */

import type { ApiClient } from './api.js';
import type { MarkerFeedEntry, MetaResponse, SlotHours } from './types.js';
import { slotCount } from './types.js';

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

export class DetailPane {
  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
    private readonly activeSlot: () => SlotHours,
  ) {}

  clear(): void {
    this.container.replaceChildren();
  }

  /** Thumbnail + short description, plus drill-down links. */
  async showMarker(entry: MarkerFeedEntry): Promise<void> {
    this.clear();
    const box = el('div', 'popup');
    const thumb = el('img', 'popup-thumb');
    thumb.src = this.api.thumbUrl(entry.id);
    thumb.alt = entry.name;
    thumb.addEventListener('click', () => void this.showFullImage(entry.id));
    box.append(thumb);

    const info = el('div', 'popup-info');
    info.append(el('div', 'popup-name', entry.name));
    info.append(el('div', undefined, `Brand: ${entry.brand}`));
    info.append(el('div', undefined, `Model: ${entry.model}`));
    info.append(el('div', undefined, `Date: ${entry.date || 'unknown'}`));
    info.append(
      el('div', undefined, `Position: ${entry.lat.toFixed(6)}, ${entry.lng.toFixed(6)}`),
    );
    box.append(info);

    if (entry.multiples > 0) {
      const warn = el(
        'a',
        'group-link',
        `⚠ location of ${entry.multiples + 1} photos — view all`,
      );
      warn.href = '#';
      warn.addEventListener('click', (ev) => {
        ev.preventDefault();
        void this.showGallery(entry.id);
      });
      box.append(warn);
    }

    const slot = this.activeSlot();
    const linkedCount = slotCount(entry, slot);
    if (linkedCount > 0) {
      const link = el(
        'a',
        'linked-link',
        `${linkedCount} non-geotagged image(s) within ±${slot}h`,
      );
      link.href = '#';
      link.addEventListener('click', (ev) => {
        ev.preventDefault();
        void this.showLinked(entry.id);
      });
      box.append(link);
    }
    this.container.append(box);
  }

  /** Full-size image with every harvested piece of metadata. */
  async showFullImage(assetId: number): Promise<void> {
    const meta = await this.api.fetchMeta(assetId);
    this.clear();
    const box = el('div', 'full-view');
    const img = el('img', 'full-image');
    img.src = this.api.imageUrl(assetId);
    img.alt = meta.name;
    box.append(img);
    box.append(el('h3', undefined, meta.name));
    const table = el('table', 'meta-table');
    const rows: [string, string][] = [
      ['Path', meta.path],
      ['Device', meta.fake_id],
      ['Taken', meta.datetime ?? 'unknown'],
      ['SHA-256', meta.content_hash],
    ];
    if (meta.geotagged && meta.lat !== undefined && meta.lng !== undefined) {
      rows.push(['Position', `${meta.lat.toFixed(6)}, ${meta.lng.toFixed(6)}`]);
    }
    if (meta.address) rows.push(['Address', meta.address]);
    const tags = meta.metadata['tags'] as Record<string, unknown> | undefined;
    for (const [key, value] of Object.entries(tags ?? {})) {
      rows.push([key, String(value)]);
    }
    for (const [key, value] of rows) {
      const tr = el('tr');
      tr.append(el('th', undefined, key), el('td', undefined, value));
      table.append(tr);
    }
    box.append(table);
    for (const finding of meta.findings) {
      box.append(
        el(
          'div',
          finding.severity === 'WARNING' ? 'finding warn' : 'finding info',
          `[${finding.code}] ${finding.detail}`,
        ),
      );
    }
    this.container.append(box);
  }

  /** Gallery of every image sharing the marker's exact coordinates. */
  async showGallery(markerId: number): Promise<MetaResponse> {
    const meta = await this.api.fetchMeta(markerId);
    this.clear();
    const box = el('div', 'gallery');
    const group = meta.same_location_group ?? [];
    box.append(el('h3', undefined, `${group.length} photos at this location`));
    const grid = el('div', 'gallery-grid');
    for (const member of group) {
      const cell = el('figure', 'gallery-cell');
      const img = el('img', 'gallery-thumb');
      img.src = member.thumb_url ?? '';
      img.alt = member.name;
      img.addEventListener('click', () => void this.showFullImage(member.id));
      const caption = el(
        'figcaption',
        member.reference ? 'gallery-ref' : undefined,
        member.reference ? `${member.name} (reference)` : member.name,
      );
      cell.append(img, caption);
      grid.append(cell);
    }
    box.append(grid);
    this.container.append(box);
    return meta;
  }

  /** Same-device non-geotagged images in the active time slot. */
  async showLinked(markerId: number): Promise<void> {
    const slot = this.activeSlot();
    const linked = await this.api.fetchLinked(markerId, slot);
    this.clear();
    const box = el('div', 'linked');
    box.append(
      el('h3', undefined, `Non-geotagged images within ±${slot}h`),
    );
    box.append(el('p', 'caveat', linked.caveat));
    const list = el('ul', 'linked-list');
    for (const entry of linked.entries) {
      const item = el('li', 'linked-entry');
      if (entry.thumb_url) {
        const img = el('img', 'linked-thumb');
        img.src = entry.thumb_url;
        img.alt = entry.name;
        img.addEventListener('click', () => void this.showFullImage(entry.id));
        item.append(img);
      }
      item.append(
        el('span', undefined, `${entry.name} — ${entry.datetime ?? 'unknown'}`),
      );
      list.append(item);
    }
    box.append(list);
    this.container.append(box);
  }
}
