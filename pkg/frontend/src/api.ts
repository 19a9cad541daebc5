/** Thin fetch wrappers over the workbench API (GET only). */

import type {
  DeviceEntry,
  LinkedResponse,
  MetaResponse,
  ReportJson,
  SlotHours,
} from './types.js';

export class ApiClient {
  constructor(private readonly baseUrl = '') {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`);
    if (!res.ok) {
      throw new Error(`${path} failed with status ${res.status}`);
    }
    return (await res.json()) as T;
  }

  fetchDevices(): Promise<DeviceEntry[]> {
    return this.getJson('/devices');
  }

  fetchMeta(assetId: number): Promise<MetaResponse> {
    return this.getJson(`/meta/${assetId}`);
  }

  fetchLinked(markerId: number, slot: SlotHours): Promise<LinkedResponse> {
    return this.getJson(`/linked/${markerId}?slot=${slot}`);
  }

  fetchReport(query: string, slot: SlotHours): Promise<ReportJson> {
    const sep = query ? '&' : '?';
    return this.getJson(`/report${query}${sep}slot=${slot}&format=json`);
  }

  thumbUrl(assetId: number): string {
    return `${this.baseUrl}/thumb/${assetId}`;
  }

  imageUrl(assetId: number): string {
    return `${this.baseUrl}/image/${assetId}`;
  }
}
