"""Live report generation.

A report is a pure function of (store state, filter, slot): the filtered
marker set with device summaries, findings, linked non-geotagged images
for the active slot, and a per-day timeline. It renders to JSON and to a
single self-contained HTML file (thumbnails inlined) fit for handing to
a third party.
"""

from __future__ import annotations

import base64
import html
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional

from .store import AnalysisStore, FilterSpec, MarkerRow, NonGeoRow

LINKED_CAVEAT = (
    "Linked images share only the device and the time slot with the marker;"
    " being taken in the same area is a probability that decreases as the"
    " slot gets larger."
)

DEVICE_LIMITATION_NOTE = (
    "Device identities come from metadata: two physical devices of the same"
    " brand and model without serial tags are indistinguishable."
)


@dataclass
class ReportEntry:
    marker: MarkerRow
    linked: list[NonGeoRow]


@dataclass
class DayGroup:
    day: Optional[str]  # "YYYY-MM-DD"; None groups undated markers
    marker_ids: list[int]


@dataclass
class DeviceSummary:
    fake_id: str
    nb_fake_id: int
    ordre: int


@dataclass
class ReportDocument:
    generated_at: str
    filter_echo: str
    slot_hours: int
    device_summary: list[DeviceSummary]
    entries: list[ReportEntry]
    timeline: list[DayGroup]

    @property
    def no_matches(self) -> bool:
        return not self.entries


def filter_echo(spec: FilterSpec, slot: int) -> str:
    parts = []
    if spec.zone is not None:
        parts.append(
            f"zone=({spec.zone.center.latitude:.6f},"
            f"{spec.zone.center.longitude:.6f}) r={spec.zone.radius_km}km"
        )
    if spec.devices is not None:
        parts.append("devices=" + "+".join(sorted(spec.devices)))
    if spec.date_from is not None:
        parts.append("from=" + spec.date_from.strftime("%Y-%m-%d %H:%M:%S"))
    if spec.date_to is not None:
        parts.append("to=" + spec.date_to.strftime("%Y-%m-%d %H:%M:%S"))
    parts.append(f"slot=±{slot}h")
    return "; ".join(parts) if parts else "no filters"


def build_report(
    store: AnalysisStore,
    spec: Optional[FilterSpec] = None,
    slot: int = 1,
    run_id: Optional[int] = None,
) -> ReportDocument:
    spec = spec or FilterSpec()
    run_id = store.require_run(run_id)
    markers = store.query_markers(spec, run_id)
    entries = [
        ReportEntry(
            marker=m,
            linked=store.linked_non_geotagged(m.id, slot, run_id),
        )
        for m in markers
    ]

    summaries: dict[str, DeviceSummary] = {}
    for m in markers:
        summaries.setdefault(
            m.fake_id, DeviceSummary(m.fake_id, m.nb_fake_id, m.ordre)
        )
    device_summary = sorted(summaries.values(), key=lambda s: s.ordre)

    by_day: dict[Optional[str], list[MarkerRow]] = {}
    for m in markers:
        day = m.datetime[:10] if m.datetime else None
        by_day.setdefault(day, []).append(m)
    timeline = []
    for day in sorted((d for d in by_day if d is not None)):
        members = sorted(by_day[day], key=lambda m: (m.datetime, m.id))
        timeline.append(DayGroup(day, [m.id for m in members]))
    if None in by_day:
        timeline.append(DayGroup(None, [m.id for m in by_day[None]]))

    return ReportDocument(
        generated_at=datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
        filter_echo=filter_echo(spec, slot),
        slot_hours=slot,
        device_summary=device_summary,
        entries=entries,
        timeline=timeline,
    )


def render_json(doc: ReportDocument) -> dict:
    return {
        "generated_at": doc.generated_at,
        "filter": doc.filter_echo,
        "slot_hours": doc.slot_hours,
        "no_matches": doc.no_matches,
        "linked_caveat": LINKED_CAVEAT,
        "device_note": DEVICE_LIMITATION_NOTE,
        "device_summary": [
            {"fake_id": s.fake_id, "nb_fake_id": s.nb_fake_id, "ordre": s.ordre}
            for s in doc.device_summary
        ],
        "entries": [
            {
                "id": e.marker.id,
                "name": e.marker.name,
                "path": e.marker.path,
                "fake_id": e.marker.fake_id,
                "make": e.marker.make,
                "model": e.marker.model,
                "datetime": e.marker.datetime,
                "gps_datetime": e.marker.gps_datetime,
                "lat": e.marker.lat,
                "lng": e.marker.lng,
                "multiples": e.marker.multiples,
                "ordre": e.marker.ordre,
                "address": e.marker.address,
                "thumb_name": e.marker.thumb_name,
                "findings": e.marker.findings,
                "linked": [
                    {
                        "id": n.id,
                        "name": n.name,
                        "path": n.path,
                        "datetime": n.datetime,
                        "thumb_name": n.thumb_name,
                    }
                    for n in e.linked
                ],
            }
            for e in doc.entries
        ],
        "timeline": [
            {"day": g.day, "marker_ids": g.marker_ids} for g in doc.timeline
        ],
    }


def _thumb_data_uri(workspace: Path, thumb_name: Optional[str]) -> Optional[str]:
    if not thumb_name:
        return None
    path = workspace / thumb_name
    try:
        payload = path.read_bytes()
    except OSError:
        return None
    return "data:image/jpeg;base64," + base64.b64encode(payload).decode("ascii")


def render_html(doc: ReportDocument, workspace: Path) -> str:
    """Self-contained HTML: embeds thumbnails, references nothing external."""
    esc = html.escape
    out = [
        "<!DOCTYPE html><html><head><meta charset='utf-8'>",
        "<title>Analysis report</title>",
        "<style>",
        "body{font-family:sans-serif;margin:2em;color:#222}",
        "table{border-collapse:collapse;margin:1em 0}",
        "td,th{border:1px solid #999;padding:4px 8px;font-size:13px}",
        ".warn{color:#a40000}.info{color:#555}",
        ".banner{background:#fff3cd;padding:8px;border:1px solid #d0a500}",
        ".entry{border-top:2px solid #444;margin-top:1.5em;padding-top:.5em}",
        "img{vertical-align:middle;margin:2px}",
        "</style></head><body>",
        "<h1>Analysis report</h1>",
        f"<p>Generated at {esc(doc.generated_at)}<br>",
        f"Filters: {esc(doc.filter_echo)}</p>",
        f"<p class='info'>{esc(DEVICE_LIMITATION_NOTE)}</p>",
    ]
    if doc.no_matches:
        out.append("<p class='banner'>No markers match the current filters.</p>")
    out.append("<h2>Devices</h2><table><tr><th>#</th><th>Device id</th>"
               "<th>Images</th></tr>")
    for s in doc.device_summary:
        out.append(
            f"<tr><td>{s.ordre}</td><td>{esc(s.fake_id)}</td>"
            f"<td>{s.nb_fake_id}</td></tr>"
        )
    out.append("</table>")

    out.append(f"<h2>Markers ({len(doc.entries)})</h2>")
    for e in doc.entries:
        m = e.marker
        out.append("<div class='entry'>")
        thumb = _thumb_data_uri(workspace, m.thumb_name)
        if thumb:
            out.append(f"<img src='{thumb}' alt=''>")
        out.append(
            f"<b>{esc(m.name)}</b> — {esc(m.fake_id)}<br>"
            f"taken {esc(m.datetime or 'unknown')} at"
            f" {m.lat:.6f}, {m.lng:.6f}"
        )
        if m.address:
            out.append(f"<br>address: {esc(m.address)}")
        if m.multiples:
            out.append(
                f"<br><b>{m.multiples}</b> other image(s) share these"
                " coordinates"
            )
        for f in m.findings:
            css = "warn" if f.get("severity") == "WARNING" else "info"
            out.append(
                f"<br><span class='{css}'>[{esc(f.get('code', ''))}]"
                f" {esc(f.get('detail', ''))}</span>"
            )
        if e.linked:
            out.append(
                f"<br>Non-geotagged images within ±{doc.slot_hours}h"
                f" ({len(e.linked)}): <span class='info'>"
                + esc(LINKED_CAVEAT)
                + "</span><table><tr><th>Name</th><th>Taken</th></tr>"
            )
            for n in e.linked:
                out.append(
                    f"<tr><td>{esc(n.name)}</td>"
                    f"<td>{esc(n.datetime or 'unknown')}</td></tr>"
                )
            out.append("</table>")
        out.append("</div>")

    out.append("<h2>Timeline</h2><table><tr><th>Day</th><th>Markers</th></tr>")
    for g in doc.timeline:
        ids = ", ".join(str(i) for i in g.marker_ids)
        out.append(
            f"<tr><td>{esc(g.day or 'undated')}</td><td>{esc(ids)}</td></tr>"
        )
    out.append("</table></body></html>")
    return "".join(out)
