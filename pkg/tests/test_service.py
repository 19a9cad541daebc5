"""HTTP API tests: feed fidelity, cross-feed parity, error contracts."""

from __future__ import annotations

import json
import shutil
import xml.etree.ElementTree as ET

import pytest
from fastapi.testclient import TestClient

from geoexif.corpus import staged_specs, write_corpus
from geoexif.indexer import ScanConfig, scan_tree
from geoexif.service import create_app, feed_date
from geoexif.store import SLOT_HOURS

FEED_ATTRS = [
    "name", "brand", "model", "fake_id", "date", "lat", "lng", "id",
    "ordre", "multiples", "non_geotaggees", "nb_fake_id",
] + [f"non_geotag_h{h}" for h in SLOT_HOURS]


@pytest.fixture(scope="module")
def client(demo_scan):
    app = create_app(demo_scan.workspace)
    with TestClient(app) as c:
        yield c


def xml_entries(body: bytes) -> list[dict]:
    root = ET.fromstring(body)
    assert root.tag == "markers"
    return [dict(el.attrib) for el in root]


class TestXmlFeed:
    def test_well_formed_and_attribute_set(self, client):
        res = client.get("/markers.xml")
        assert res.status_code == 200
        entries = xml_entries(res.content)
        assert entries
        for entry in entries:
            assert list(entry.keys()) == FEED_ATTRS

    def test_reference_row_values(self, client, demo_scan):
        entries = xml_entries(client.get("/markers.xml").content)
        row = next(e for e in entries if e["name"] == "DSC04487.JPG")
        assert row["brand"] == "SONY"
        assert row["model"] == "DSC-HX100V"
        assert row["fake_id"] == "SONYDSC-HX100V"
        assert row["date"] == "11.08.2013 16:03:41"
        assert row["lat"] == "43.203640"
        assert row["lng"] == "5.822985"
        assert row["ordre"] == "1"
        assert row["nb_fake_id"] == "29"
        assert row["non_geotag_h1"] == "11"
        assert row["non_geotag_h2"] == "15"
        assert row["non_geotaggees"] == ""

    def test_byte_identical_repeats(self, client):
        q = "/markers.xml?device=SONYDSC-HX100V"
        assert client.get(q).content == client.get(q).content

    def test_empty_result_self_closing(self, client):
        res = client.get("/markers.xml?device=NO-SUCH-DEVICE")
        assert res.content == b"<markers/>"

    def test_feed_returns_only_references(self, client, demo_scan):
        entries = xml_entries(client.get("/markers.xml").content)
        assert len(entries) == len(demo_scan.store.query_markers())


class TestJsonFeed:
    def test_parity_with_xml(self, client):
        queries = [
            "",
            "?device=SONYDSC-HX100V",
            "?device=NIKOND300&device=HTCOne",
            "?date_from=2013-08-11&date_to=2013-08-12",
            "?lat=43.2036&lng=5.8230&radius_km=5",
            "?lat=43.2036&lng=5.8230&radius_km=5&date_from=2013-08-11",
        ]
        for q in queries:
            xml = xml_entries(client.get(f"/markers.xml{q}").content)
            js = client.get(f"/markers.json{q}").json()
            assert len(xml) == len(js), q
            for x, j in zip(xml, js):
                assert set(j.keys()) == set(FEED_ATTRS)
                assert x["name"] == j["name"]
                assert x["id"] == str(j["id"])
                assert isinstance(j["id"], int)
                assert x["lat"] == f"{j['lat']:.6f}"
                assert x["lng"] == f"{j['lng']:.6f}"
                assert x["date"] == j["date"]
                for h in SLOT_HOURS:
                    assert x[f"non_geotag_h{h}"] == str(j[f"non_geotag_h{h}"])

    def test_parity_on_random_filters(self, client, demo_scan):
        import random

        rng = random.Random(77)
        devices = [d.fake_id for d in demo_scan.store.devices()]
        for _ in range(50):
            params = []
            if rng.random() < 0.5:
                for name in rng.sample(devices, rng.randint(1, 3)):
                    params.append(("device", name))
            if rng.random() < 0.5:
                day = rng.randint(10, 14)
                params.append(("date_from", f"2013-08-{day:02d}"))
                params.append(("date_to", f"2013-08-{day + 1:02d}"))
            if rng.random() < 0.5:
                params.append(("lat", f"{rng.uniform(34, 49):.4f}"))
                params.append(("lng", f"{rng.uniform(-119, 6):.4f}"))
                params.append(("radius_km", f"{rng.uniform(1, 9000):.1f}"))
            from urllib.parse import urlencode

            q = "?" + urlencode(params) if params else ""
            xml = xml_entries(client.get(f"/markers.xml{q}").content)
            js = client.get(f"/markers.json{q}").json()
            assert len(xml) == len(js), q
            assert [e["name"] for e in xml] == [e["name"] for e in js]

    def test_empty_run_empty_array(self, tmp_path):
        from geoexif.store import AnalysisStore
        from datetime import datetime

        store = AnalysisStore(tmp_path / "ws")
        run = store.begin_run(datetime(2013, 1, 1))
        store.finish_run(run, datetime(2013, 1, 1, 0, 1), 0, 0, 0)
        with TestClient(create_app(tmp_path / "ws")) as c:
            assert c.get("/markers.json").json() == []
            assert c.get("/markers.xml").content == b"<markers/>"


class TestErrors:
    def test_no_finished_run_409(self, tmp_path):
        with TestClient(create_app(tmp_path / "ws")) as c:
            res = c.get("/markers.xml")
            assert res.status_code == 409
            assert "detail" in res.json()

    def test_malformed_zone_400(self, client):
        assert client.get("/markers.xml?lat=43").status_code == 400
        assert client.get("/markers.xml?lat=abc&lng=1&radius_km=1").status_code == 400
        assert client.get("/markers.xml?lat=91&lng=0&radius_km=1").status_code == 400

    def test_malformed_date_400(self, client):
        assert client.get("/markers.xml?date_from=tomorrow").status_code == 400

    def test_inverted_dates_400(self, client):
        res = client.get(
            "/markers.xml?date_from=2014-01-01&date_to=2013-01-01"
        )
        assert res.status_code == 400

    def test_unknown_asset_404(self, client):
        assert client.get("/thumb/999999").status_code == 404
        assert client.get("/image/999999").status_code == 404
        assert client.get("/meta/999999").status_code == 404

    def test_bad_slot_400(self, client, demo_scan):
        marker = demo_scan.marker_by_name("DSC04487.JPG")
        assert client.get(f"/linked/{marker.id}?slot=7").status_code == 400
        assert client.get(f"/linked/{marker.id}?slot=x").status_code == 400


class TestAssets:
    def test_thumb_and_image_bytes(self, client, demo_scan):
        marker = demo_scan.marker_by_name("DSC04487.JPG")
        thumb = client.get(f"/thumb/{marker.id}")
        assert thumb.status_code == 200
        assert thumb.headers["content-type"] == "image/jpeg"
        image = client.get(f"/image/{marker.id}")
        assert image.status_code == 200
        original = (demo_scan.root / "camera1" / "DSC04487.JPG").read_bytes()
        assert image.content == original

    def test_meta_includes_findings_and_group(self, client, demo_scan):
        wlan = demo_scan.marker_by_name("HTC_wlan.jpg")
        meta = client.get(f"/meta/{wlan.id}").json()
        assert meta["fake_id"] == "HTCOne"
        assert any(f["code"] == "NON_GPS_POSITIONING" for f in meta["findings"])
        assert meta["metadata"]["tags"]["Make"] == "HTC"
        starred = [m for m in demo_scan.store.query_markers() if m.multiples][0]
        meta = client.get(f"/meta/{starred.id}").json()
        assert len(meta["same_location_group"]) == 6

    def test_corrupt_image_has_no_thumb_but_exists(self, client, demo_scan):
        corrupt = demo_scan.marker_by_name("corrupt.jpg")
        assert client.get(f"/thumb/{corrupt.id}").status_code == 404
        assert client.get(f"/image/{corrupt.id}").status_code == 200

    def test_vanished_original_410(self, tmp_path):
        specs, texts = staged_specs()
        write_corpus(specs, texts, tmp_path / "fx")
        root = tmp_path / "fx" / "corpus"
        scan_tree(ScanConfig(root=root, workspace=tmp_path / "ws"))
        shutil.rmtree(root / "nikon")
        with TestClient(create_app(tmp_path / "ws")) as c:
            feed = c.get("/markers.json").json()
            nikon_id = next(e["id"] for e in feed if e["name"] == "DSC_0001.JPG")
            res = c.get(f"/image/{nikon_id}")
            assert res.status_code == 410
            assert len(res.json()["content_hash"]) == 64


class TestLinked:
    def test_slot2_lists_fifteen(self, client, demo_scan):
        marker = demo_scan.marker_by_name("DSC04487.JPG")
        payload = client.get(f"/linked/{marker.id}?slot=2").json()
        assert payload["slot_hours"] == 2
        assert len(payload["entries"]) == 15
        assert payload["caveat"]
        entry = payload["entries"][0]
        assert {"id", "name", "path", "datetime", "thumb_url"} <= set(entry)

    def test_device_without_nongeo_empty(self, client, demo_scan):
        apple = [
            m for m in demo_scan.store.query_markers()
            if m.fake_id == "AppleiPhone 5"
        ][0]
        payload = client.get(f"/linked/{apple.id}?slot=24").json()
        assert payload["entries"] == []


class TestDevices:
    def test_ranked_list(self, client, demo_scan):
        devices = client.get("/devices").json()
        assert devices[0]["fake_id"] == "SONYDSC-HX100V"
        assert devices[0]["ordre"] == 1
        assert devices[0]["nb_fake_id"] == 29
        ranks = [d["ordre"] for d in devices]
        assert ranks == sorted(ranks)


class TestReportEndpoint:
    def test_html_and_json(self, client):
        html = client.get("/report?device=NIKOND300")
        assert html.status_code == 200
        assert html.headers["content-type"].startswith("text/html")
        assert "NIKOND300" in html.text
        js = client.get("/report?device=NIKOND300&format=json").json()
        assert [e["fake_id"] for e in js["entries"]] == ["NIKOND300"] * len(
            js["entries"]
        )

    def test_report_counts_match_feed(self, client):
        for q in ["", "?device=SONYDSC-HX100V", "?lat=43.2&lng=5.8&radius_km=30"]:
            feed = client.get(f"/markers.json{q}").json()
            sep = "&" if q else "?"
            report = client.get(f"/report{q}{sep}format=json").json()
            assert len(report["entries"]) == len(feed)

    def test_feed_date_formatting(self):
        assert feed_date("2013-08-11 16:03:41") == "11.08.2013 16:03:41"
        assert feed_date(None) == ""
