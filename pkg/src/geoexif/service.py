"""HTTP API over a scanned workspace.

Read-only posture: every endpoint is a GET and nothing mutates the store
or the evidence tree. The XML marker feed reproduces the legacy attribute
set and date format exactly; the JSON feed mirrors it field for field for
the web console.
"""

from __future__ import annotations

import json
from datetime import datetime
from pathlib import Path
from typing import Mapping, Optional
from xml.sax.saxutils import quoteattr

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import report as report_mod
from .exif import ImageKind, detect_image_kind
from .geo import GeoPoint, InvalidCoordinateError, ZoneFilter
from .store import (
    SLOT_HOURS,
    AnalysisStore,
    FilterSpec,
    MarkerRow,
    NoFinishedRunError,
    NonGeoRow,
    UnknownMarkerError,
)

FEED_DATE_FORMAT = "%d.%m.%Y %H:%M:%S"


class FilterParseError(ValueError):
    pass


def _parse_when(raw: str, field: str) -> datetime:
    text = raw.strip()
    for fmt in ("%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d"):
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    raise FilterParseError(f"unparsable {field}: {raw!r}")


def parse_filter(params: Mapping) -> FilterSpec:
    """Build a FilterSpec from feed query parameters.

    Recognized: lat+lng+radius_km (zone, all three or none), repeated
    device=, date_from=, date_to=, slot=.
    """
    zone = None
    zone_parts = [params.get("lat"), params.get("lng"), params.get("radius_km")]
    if any(p is not None for p in zone_parts):
        if any(p is None for p in zone_parts):
            raise FilterParseError("zone filter needs lat, lng and radius_km")
        try:
            center = GeoPoint(float(zone_parts[0]), float(zone_parts[1]))
            zone = ZoneFilter(center, float(zone_parts[2]))
        except (ValueError, InvalidCoordinateError) as exc:
            raise FilterParseError(f"bad zone parameters: {exc}") from exc

    devices = None
    if hasattr(params, "getlist"):
        device_values = params.getlist("device")
    else:
        value = params.get("device")
        device_values = [value] if value is not None else []
    if device_values:
        devices = frozenset(device_values)

    date_from = date_to = None
    if params.get("date_from") is not None:
        date_from = _parse_when(params["date_from"], "date_from")
    if params.get("date_to") is not None:
        date_to = _parse_when(params["date_to"], "date_to")

    slot = None
    if params.get("slot") is not None:
        try:
            slot = int(params["slot"])
        except ValueError as exc:
            raise FilterParseError(f"bad slot: {params['slot']!r}") from exc

    try:
        return FilterSpec(
            zone=zone,
            devices=devices,
            date_from=date_from,
            date_to=date_to,
            slot_hours=slot,
        )
    except ValueError as exc:
        raise FilterParseError(str(exc)) from exc


def feed_date(stamp: Optional[str]) -> str:
    """Store timestamp -> legacy feed form DD.MM.YYYY HH:MM:SS."""
    if not stamp:
        return ""
    return datetime.strptime(stamp, "%Y-%m-%d %H:%M:%S").strftime(FEED_DATE_FORMAT)


def _feed_fields(m: MarkerRow) -> list[tuple[str, str]]:
    """Attribute list in the exact legacy order."""
    fields = [
        ("name", m.name),
        ("brand", m.make),
        ("model", m.model),
        ("fake_id", m.fake_id),
        ("date", feed_date(m.datetime)),
        ("lat", f"{m.lat:.6f}"),
        ("lng", f"{m.lng:.6f}"),
        ("id", str(m.id)),
        ("ordre", str(m.ordre)),
        ("multiples", str(m.multiples)),
        ("non_geotaggees", ""),
        ("nb_fake_id", str(m.nb_fake_id)),
    ]
    fields.extend(
        (f"non_geotag_h{h}", str(m.slot_counts[h])) for h in SLOT_HOURS
    )
    return fields


def build_markers_xml(markers: list[MarkerRow]) -> bytes:
    """Deterministic XML feed; hand-serialized to pin attribute order."""
    if not markers:
        return b"<markers/>"
    lines = ["<markers>"]
    for m in markers:
        attrs = " ".join(f"{k}={quoteattr(v)}" for k, v in _feed_fields(m))
        lines.append(f"  <marker {attrs}/>")
    lines.append("</markers>")
    return "\n".join(lines).encode("utf-8")


def build_markers_json(markers: list[MarkerRow]) -> list[dict]:
    """Same content as the XML feed with native JSON types."""
    out = []
    for m in markers:
        entry: dict = dict(_feed_fields(m))
        entry["id"] = m.id
        entry["ordre"] = m.ordre
        entry["multiples"] = m.multiples
        entry["nb_fake_id"] = m.nb_fake_id
        entry["lat"] = m.lat
        entry["lng"] = m.lng
        for h in SLOT_HOURS:
            entry[f"non_geotag_h{h}"] = m.slot_counts[h]
        out.append(entry)
    return out


def _linked_payload(marker_id: int, slot: int, rows: list[NonGeoRow]) -> dict:
    return {
        "marker_id": marker_id,
        "slot_hours": slot,
        "caveat": report_mod.LINKED_CAVEAT,
        "entries": [
            {
                "id": r.id,
                "name": r.name,
                "path": r.path,
                "datetime": r.datetime,
                "thumb_url": f"/thumb/{r.id}" if r.thumb_name else None,
            }
            for r in rows
        ],
    }


def create_app(workspace: Path, ui_dir: Optional[Path] = None) -> FastAPI:
    workspace = Path(workspace)
    store = AnalysisStore(workspace)
    app = FastAPI(title="geoexif", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"http://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.exception_handler(FilterParseError)
    async def _bad_filter(request: Request, exc: FilterParseError):
        return JSONResponse({"detail": str(exc)}, status_code=400)

    @app.exception_handler(NoFinishedRunError)
    async def _no_run(request: Request, exc: NoFinishedRunError):
        return JSONResponse(
            {"detail": "no finished analysis run; scan a tree first"},
            status_code=409,
        )

    @app.exception_handler(UnknownMarkerError)
    async def _not_found(request: Request, exc: UnknownMarkerError):
        return JSONResponse({"detail": str(exc)}, status_code=404)

    @app.get("/markers.xml")
    def markers_xml(request: Request) -> Response:
        spec = parse_filter(request.query_params)
        rows = store.query_markers(spec)
        return Response(build_markers_xml(rows), media_type="application/xml")

    @app.get("/markers.json")
    def markers_json(request: Request) -> Response:
        spec = parse_filter(request.query_params)
        rows = store.query_markers(spec)
        # plain dumps keeps the body byte-stable for identical queries
        return Response(
            json.dumps(build_markers_json(rows)), media_type="application/json"
        )

    @app.get("/devices")
    def devices() -> Response:
        rows = store.devices()
        payload = [
            {
                "fake_id": d.fake_id,
                "make": d.make,
                "model": d.model,
                "ordre": d.ordre,
                "color": d.color,
                "nb_fake_id": d.nb_fake_id,
            }
            for d in rows
        ]
        return Response(json.dumps(payload), media_type="application/json")

    @app.get("/thumb/{asset_id}")
    def thumb(asset_id: int):
        asset = store.asset_by_id(asset_id)
        if not asset.thumb_name:
            raise UnknownMarkerError(f"asset {asset_id} has no thumbnail")
        path = workspace / asset.thumb_name
        if not path.exists():
            raise UnknownMarkerError(f"thumbnail missing for asset {asset_id}")
        return FileResponse(path, media_type="image/jpeg")

    @app.get("/image/{asset_id}")
    def image(asset_id: int):
        asset = store.asset_by_id(asset_id)
        path = Path(asset.path)
        try:
            head = path.open("rb").read(8)
        except OSError:
            return JSONResponse(
                {
                    "detail": "original file no longer readable",
                    "path": asset.path,
                    "content_hash": asset.content_hash,
                },
                status_code=410,
            )
        kind = detect_image_kind(head)
        media = "image/tiff" if kind == ImageKind.TIFF else "image/jpeg"
        return FileResponse(path, media_type=media)

    @app.get("/meta/{asset_id}")
    def meta(asset_id: int) -> Response:
        asset = store.asset_by_id(asset_id)
        payload: dict = {
            "id": asset.id,
            "name": asset.name,
            "path": asset.path,
            "content_hash": asset.content_hash,
            "fake_id": asset.fake_id,
            "make": asset.make,
            "model": asset.model,
            "datetime": asset.datetime,
            "thumb_name": asset.thumb_name,
            "metadata": asset.metadata,
            "findings": asset.findings,
        }
        if isinstance(asset, MarkerRow):
            payload.update(
                {
                    "geotagged": True,
                    "lat": asset.lat,
                    "lng": asset.lng,
                    "gps_datetime": asset.gps_datetime,
                    "address": asset.address,
                    "altitude_m": asset.altitude_m,
                    "multiples": asset.multiples,
                    "reference": asset.reference,
                    "ordre": asset.ordre,
                    "nb_fake_id": asset.nb_fake_id,
                    "slot_counts": {
                        str(h): asset.slot_counts[h] for h in SLOT_HOURS
                    },
                    "same_location_group": [
                        {
                            "id": g.id,
                            "name": g.name,
                            "reference": g.reference,
                            "datetime": g.datetime,
                            "thumb_url": f"/thumb/{g.id}" if g.thumb_name else None,
                        }
                        for g in store.same_location_group(asset.id)
                    ],
                }
            )
        else:
            payload["geotagged"] = False
        return Response(json.dumps(payload), media_type="application/json")

    @app.get("/linked/{marker_id}")
    def linked(marker_id: int, request: Request) -> Response:
        raw_slot = request.query_params.get("slot", "1")
        try:
            slot = int(raw_slot)
        except ValueError:
            raise FilterParseError(f"bad slot: {raw_slot!r}")
        if slot not in SLOT_HOURS:
            raise FilterParseError(f"slot must be one of {SLOT_HOURS}")
        rows = store.linked_non_geotagged(marker_id, slot)
        return Response(
            json.dumps(_linked_payload(marker_id, slot, rows)),
            media_type="application/json",
        )

    @app.get("/report")
    def report(request: Request):
        spec = parse_filter(request.query_params)
        slot = spec.slot_hours or 1
        doc = report_mod.build_report(store, spec, slot)
        fmt = request.query_params.get("format", "html")
        if fmt == "json":
            return Response(
                json.dumps(report_mod.render_json(doc)),
                media_type="application/json",
            )
        if fmt != "html":
            raise FilterParseError("format must be html or json")
        return HTMLResponse(report_mod.render_html(doc, workspace))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/")
        def index() -> Response:
            return Response(
                json.dumps(
                    {
                        "service": "geoexif",
                        "endpoints": [
                            "/markers.xml",
                            "/markers.json",
                            "/devices",
                            "/thumb/{id}",
                            "/image/{id}",
                            "/meta/{id}",
                            "/linked/{id}?slot=h",
                            "/report",
                        ],
                    }
                ),
                media_type="application/json",
            )

    return app
