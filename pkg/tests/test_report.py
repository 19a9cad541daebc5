"""Report builder tests: purity, parity with the feed, timeline partition,
self-contained HTML."""

from __future__ import annotations

import re

from geoexif.report import build_report, render_html, render_json
from geoexif.store import FilterSpec


class TestBuildReport:
    def test_device_filter_entries(self, demo_scan):
        doc = build_report(
            demo_scan.store, FilterSpec(devices=frozenset({"NIKOND300"})), slot=1
        )
        assert doc.entries
        assert all(e.marker.fake_id == "NIKOND300" for e in doc.entries)
        assert [s.fake_id for s in doc.device_summary] == ["NIKOND300"]

    def test_entry_count_matches_feed(self, demo_scan):
        doc = build_report(demo_scan.store, FilterSpec(), slot=2)
        assert len(doc.entries) == len(demo_scan.store.query_markers())

    def test_single_entry_zone(self, demo_scan):
        from geoexif.geo import GeoPoint, ZoneFilter

        marker = demo_scan.marker_by_name("DSC_0001.JPG")
        # radius below the nearest neighbour (DSC_0002 is a few metres off)
        zone = ZoneFilter(GeoPoint(marker.lat, marker.lng), 0.0008)
        doc = build_report(demo_scan.store, FilterSpec(zone=zone), slot=1)
        assert [e.marker.name for e in doc.entries] == ["DSC_0001.JPG"]

    def test_empty_filter_empty_run(self, tmp_path):
        from datetime import datetime

        from geoexif.store import AnalysisStore

        store = AnalysisStore(tmp_path / "ws")
        run = store.begin_run(datetime(2013, 1, 1))
        store.finish_run(run, datetime(2013, 1, 1, 1), 0, 0, 0)
        doc = build_report(store, FilterSpec(), slot=1)
        assert doc.entries == []
        assert doc.no_matches

    def test_linked_entries_for_active_slot(self, demo_scan):
        doc = build_report(demo_scan.store, FilterSpec(), slot=2)
        target = next(e for e in doc.entries if e.marker.name == "DSC04487.JPG")
        assert len(target.linked) == 15

    def test_timeline_partitions_entries(self, demo_scan):
        doc = build_report(demo_scan.store, FilterSpec(), slot=1)
        timeline_ids = [i for g in doc.timeline for i in g.marker_ids]
        entry_ids = [e.marker.id for e in doc.entries]
        assert sorted(timeline_ids) == sorted(entry_ids)
        assert len(timeline_ids) == len(set(timeline_ids))

    def test_same_filter_reproduces_body(self, demo_scan):
        spec = FilterSpec(devices=frozenset({"SONYDSC-HX100V"}))
        a = render_json(build_report(demo_scan.store, spec, slot=1))
        b = render_json(build_report(demo_scan.store, spec, slot=1))
        a.pop("generated_at")
        b.pop("generated_at")
        assert a == b


class TestRenderHtml:
    def test_self_contained(self, demo_scan):
        doc = build_report(demo_scan.store, FilterSpec(), slot=1)
        html = render_html(doc, demo_scan.workspace)
        # no external fetches: every src is an inline data URI
        for src in re.findall(r"src='([^']+)'", html):
            assert src.startswith("data:image/jpeg;base64,")
        assert "http://" not in html and "https://" not in html
        assert "DSC04487.JPG" in html

    def test_no_matches_banner(self, demo_scan):
        doc = build_report(
            demo_scan.store, FilterSpec(devices=frozenset({"NOPE"})), slot=1
        )
        html = render_html(doc, demo_scan.workspace)
        assert "No markers match" in html

    def test_findings_rendered(self, demo_scan):
        doc = build_report(
            demo_scan.store, FilterSpec(devices=frozenset({"HTCOne"})), slot=1
        )
        html = render_html(doc, demo_scan.workspace)
        assert "TIMESTAMP_MISMATCH" in html
        assert "NON_GPS_POSITIONING" in html
        assert "LOW_GPS_ACCURACY" in html

    def test_json_mirrors_entries(self, demo_scan):
        doc = build_report(demo_scan.store, FilterSpec(), slot=2)
        payload = render_json(doc)
        assert len(payload["entries"]) == len(doc.entries)
        target = next(
            e for e in payload["entries"] if e["name"] == "DSC04487.JPG"
        )
        assert len(target["linked"]) == 15
        assert payload["linked_caveat"]
