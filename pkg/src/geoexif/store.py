"""Persistent analysis store: runs, markers and device identifiers.

The engine is embedded sqlite inside the workspace (the tool must run
from a stick with no server install). Zone filtering is evaluated by the
same clamped great-circle function the geo module exposes, registered as
an SQL function, so query results cannot drift from the library math.

Marker coordinates are stored as integer micro-degrees: the marker
contract is 6-decimal coordinates, and integer keys make same-location
grouping exact.
"""

from __future__ import annotations

import json
import sqlite3
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Optional

from .geo import GeoPoint, ZoneFilter, great_circle_distance_km

SLOT_HOURS = (1, 2, 3, 4, 5, 12, 24)
PALETTE_SIZE = 10

DB_NAME = "analysis.sqlite3"


class StoreError(Exception):
    pass


class UnknownMarkerError(LookupError):
    pass


class NoFinishedRunError(StoreError):
    pass


@dataclass(frozen=True)
class FilterSpec:
    """Conjunctive marker filters; every field is optional."""

    zone: Optional[ZoneFilter] = None
    devices: Optional[frozenset[str]] = None
    date_from: Optional[datetime] = None
    date_to: Optional[datetime] = None
    slot_hours: Optional[int] = None

    def __post_init__(self) -> None:
        if (
            self.date_from is not None
            and self.date_to is not None
            and self.date_from > self.date_to
        ):
            raise ValueError("date_from must not exceed date_to")
        if self.slot_hours is not None and self.slot_hours not in SLOT_HOURS:
            raise ValueError(f"slot must be one of {SLOT_HOURS}")


@dataclass
class MarkerRow:
    """One geotagged image's indexed row."""

    id: int
    run_id: int
    name: str
    path: str
    thumb_name: Optional[str]
    make: str
    model: str
    fake_id: str
    datetime: Optional[str]  # "YYYY-MM-DD HH:MM:SS", device-local
    gps_datetime: Optional[str]  # UTC
    lat_e6: int
    lng_e6: int
    multiples: int
    reference: bool
    type: int
    color: int
    ordre: int
    nb_fake_id: int
    slot_counts: dict[int, int]
    metadata: dict
    address: Optional[str]
    findings: list[dict]
    content_hash: str
    altitude_m: Optional[float] = None

    @property
    def lat(self) -> float:
        return self.lat_e6 / 10**6

    @property
    def lng(self) -> float:
        return self.lng_e6 / 10**6


@dataclass
class NonGeoRow:
    """A non-geotagged image asset (kept for time-slot linking)."""

    id: int
    run_id: int
    name: str
    path: str
    thumb_name: Optional[str]
    make: str
    model: str
    fake_id: str
    datetime: Optional[str]
    metadata: dict
    findings: list[dict]
    content_hash: str


@dataclass
class DeviceRow:
    fake_id: str
    make: str
    model: str
    ordre: int
    color: int
    nb_fake_id: int


@dataclass
class AnalysisRow:
    run_id: int
    start_time: str
    end_time: Optional[str]
    files_scanned: int
    images_found: int
    geotagged_count: int


_SLOT_COLS = ", ".join(f"non_geotag_h{h}" for h in SLOT_HOURS)

_SCHEMA = f"""
CREATE TABLE IF NOT EXISTS analysis (
    run_id INTEGER PRIMARY KEY AUTOINCREMENT,
    start_time TEXT NOT NULL,
    end_time TEXT,
    files_scanned INTEGER NOT NULL DEFAULT 0,
    images_found INTEGER NOT NULL DEFAULT 0,
    geotagged_count INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS markers (
    run_id INTEGER NOT NULL REFERENCES analysis(run_id),
    id INTEGER NOT NULL,
    name TEXT NOT NULL,
    path TEXT NOT NULL,
    content_hash TEXT NOT NULL,
    thumb_name TEXT,
    make TEXT NOT NULL DEFAULT '',
    model TEXT NOT NULL DEFAULT '',
    fake_id TEXT NOT NULL,
    datetime TEXT,
    gps_datetime TEXT,
    geotagged INTEGER NOT NULL,
    lat_e6 INTEGER,
    lng_e6 INTEGER,
    altitude_m REAL,
    address TEXT,
    metadata TEXT NOT NULL DEFAULT '{{}}',
    findings TEXT NOT NULL DEFAULT '[]',
    multiples INTEGER,
    reference INTEGER,
    type INTEGER,
    color INTEGER,
    ordre INTEGER,
    nb_fake_id INTEGER,
    {", ".join(f"non_geotag_h{h} INTEGER" for h in SLOT_HOURS)},
    PRIMARY KEY (run_id, id)
);
CREATE INDEX IF NOT EXISTS idx_markers_device
    ON markers (run_id, fake_id, geotagged, datetime);
CREATE TABLE IF NOT EXISTS devices (
    run_id INTEGER NOT NULL REFERENCES analysis(run_id),
    fake_id TEXT NOT NULL,
    make TEXT NOT NULL DEFAULT '',
    model TEXT NOT NULL DEFAULT '',
    ordre INTEGER NOT NULL,
    color INTEGER NOT NULL,
    nb_fake_id INTEGER NOT NULL,
    PRIMARY KEY (run_id, fake_id)
);
"""


def _zone_distance_km(lat_e6, lng_e6, center_lat, center_lng) -> float:
    if lat_e6 is None or lng_e6 is None:
        return float("inf")
    return great_circle_distance_km(
        GeoPoint(lat_e6 / 10**6, lng_e6 / 10**6),
        GeoPoint(center_lat, center_lng),
    )


class AnalysisStore:
    """Store facade; every public method opens a short-lived connection,
    so instances are safe to share across threads."""

    def __init__(self, workspace: Path):
        self.workspace = Path(workspace)
        self.db_path = self.workspace / DB_NAME
        self.workspace.mkdir(parents=True, exist_ok=True)
        with self._connect() as conn:
            conn.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        conn.create_function("gc_km", 4, _zone_distance_km, deterministic=True)
        return conn

    # -- run lifecycle ------------------------------------------------

    def begin_run(self, start_time: datetime) -> int:
        with self._connect() as conn:
            cur = conn.execute(
                "INSERT INTO analysis (start_time) VALUES (?)",
                (start_time.strftime("%Y-%m-%d %H:%M:%S"),),
            )
            return cur.lastrowid

    def finish_run(
        self,
        run_id: int,
        end_time: datetime,
        files_scanned: int,
        images_found: int,
        geotagged_count: int,
    ) -> None:
        with self._connect() as conn:
            conn.execute(
                "UPDATE analysis SET end_time=?, files_scanned=?,"
                " images_found=?, geotagged_count=? WHERE run_id=?",
                (
                    end_time.strftime("%Y-%m-%d %H:%M:%S"),
                    files_scanned,
                    images_found,
                    geotagged_count,
                    run_id,
                ),
            )

    def latest_finished_run(self) -> Optional[int]:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT run_id FROM analysis WHERE end_time IS NOT NULL"
                " ORDER BY run_id DESC LIMIT 1"
            ).fetchone()
            return row["run_id"] if row else None

    def require_run(self, run_id: Optional[int] = None) -> int:
        if run_id is not None:
            return run_id
        latest = self.latest_finished_run()
        if latest is None:
            raise NoFinishedRunError("no finished analysis run in this workspace")
        return latest

    def run_info(self, run_id: int) -> Optional[AnalysisRow]:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT * FROM analysis WHERE run_id=?", (run_id,)
            ).fetchone()
        if row is None:
            return None
        return AnalysisRow(
            run_id=row["run_id"],
            start_time=row["start_time"],
            end_time=row["end_time"],
            files_scanned=row["files_scanned"],
            images_found=row["images_found"],
            geotagged_count=row["geotagged_count"],
        )

    # -- persistence --------------------------------------------------

    def persist_markers(self, markers: Iterable[MarkerRow]) -> None:
        rows = [
            (
                m.run_id, m.id, m.name, m.path, m.content_hash, m.thumb_name,
                m.make, m.model, m.fake_id, m.datetime, m.gps_datetime, 1,
                m.lat_e6, m.lng_e6, m.altitude_m, m.address,
                json.dumps(m.metadata, sort_keys=True),
                json.dumps(m.findings, sort_keys=True),
                m.multiples, int(m.reference), m.type, m.color, m.ordre,
                m.nb_fake_id, *[m.slot_counts[h] for h in SLOT_HOURS],
            )
            for m in markers
        ]
        placeholders = ", ".join("?" * (24 + len(SLOT_HOURS)))
        with self._connect() as conn:
            conn.executemany(
                f"INSERT INTO markers (run_id, id, name, path, content_hash,"
                f" thumb_name, make, model, fake_id, datetime, gps_datetime,"
                f" geotagged, lat_e6, lng_e6, altitude_m, address, metadata,"
                f" findings, multiples, reference, type, color, ordre,"
                f" nb_fake_id, {_SLOT_COLS}) VALUES ({placeholders})",
                rows,
            )

    def persist_non_geotagged(self, assets: Iterable[NonGeoRow]) -> None:
        rows = [
            (
                a.run_id, a.id, a.name, a.path, a.content_hash, a.thumb_name,
                a.make, a.model, a.fake_id, a.datetime, 0,
                json.dumps(a.metadata, sort_keys=True),
                json.dumps(a.findings, sort_keys=True),
            )
            for a in assets
        ]
        with self._connect() as conn:
            conn.executemany(
                "INSERT INTO markers (run_id, id, name, path, content_hash,"
                " thumb_name, make, model, fake_id, datetime, geotagged,"
                " metadata, findings) VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?)",
                rows,
            )

    def persist_devices(self, run_id: int, devices: Iterable[DeviceRow]) -> None:
        with self._connect() as conn:
            conn.executemany(
                "INSERT INTO devices (run_id, fake_id, make, model, ordre,"
                " color, nb_fake_id) VALUES (?,?,?,?,?,?,?)",
                [
                    (run_id, d.fake_id, d.make, d.model, d.ordre, d.color, d.nb_fake_id)
                    for d in devices
                ],
            )

    # -- row mapping ---------------------------------------------------

    @staticmethod
    def _marker_from_row(row: sqlite3.Row) -> MarkerRow:
        return MarkerRow(
            id=row["id"],
            run_id=row["run_id"],
            name=row["name"],
            path=row["path"],
            thumb_name=row["thumb_name"],
            make=row["make"],
            model=row["model"],
            fake_id=row["fake_id"],
            datetime=row["datetime"],
            gps_datetime=row["gps_datetime"],
            lat_e6=row["lat_e6"],
            lng_e6=row["lng_e6"],
            multiples=row["multiples"],
            reference=bool(row["reference"]),
            type=row["type"],
            color=row["color"],
            ordre=row["ordre"],
            nb_fake_id=row["nb_fake_id"],
            slot_counts={h: row[f"non_geotag_h{h}"] for h in SLOT_HOURS},
            metadata=json.loads(row["metadata"]),
            address=row["address"],
            findings=json.loads(row["findings"]),
            content_hash=row["content_hash"],
            altitude_m=row["altitude_m"],
        )

    @staticmethod
    def _nongeo_from_row(row: sqlite3.Row) -> NonGeoRow:
        return NonGeoRow(
            id=row["id"],
            run_id=row["run_id"],
            name=row["name"],
            path=row["path"],
            thumb_name=row["thumb_name"],
            make=row["make"],
            model=row["model"],
            fake_id=row["fake_id"],
            datetime=row["datetime"],
            metadata=json.loads(row["metadata"]),
            findings=json.loads(row["findings"]),
            content_hash=row["content_hash"],
        )

    # -- queries -------------------------------------------------------

    def query_markers(
        self, spec: Optional[FilterSpec] = None, run_id: Optional[int] = None
    ) -> list[MarkerRow]:
        """Reference markers matching every present filter clause."""
        run_id = self.require_run(run_id)
        spec = spec or FilterSpec()
        clauses = ["run_id = ?", "geotagged = 1", "reference = 1"]
        params: list = [run_id]
        if spec.devices is not None:
            marks = ", ".join("?" * len(spec.devices))
            clauses.append(f"fake_id IN ({marks})")
            params.extend(sorted(spec.devices))
        if spec.date_from is not None:
            clauses.append("datetime IS NOT NULL AND datetime >= ?")
            params.append(spec.date_from.strftime("%Y-%m-%d %H:%M:%S"))
        if spec.date_to is not None:
            clauses.append("datetime IS NOT NULL AND datetime <= ?")
            params.append(spec.date_to.strftime("%Y-%m-%d %H:%M:%S"))
        if spec.zone is not None:
            clauses.append("gc_km(lat_e6, lng_e6, ?, ?) < ?")
            params.extend(
                [
                    spec.zone.center.latitude,
                    spec.zone.center.longitude,
                    spec.zone.radius_km,
                ]
            )
        sql = (
            "SELECT * FROM markers WHERE "
            + " AND ".join(clauses)
            + " ORDER BY ordre ASC, datetime ASC, id ASC"
        )
        with self._connect() as conn:
            rows = conn.execute(sql, params).fetchall()
        return [self._marker_from_row(r) for r in rows]

    def marker_by_id(self, marker_id: int, run_id: Optional[int] = None) -> MarkerRow:
        run_id = self.require_run(run_id)
        with self._connect() as conn:
            row = conn.execute(
                "SELECT * FROM markers WHERE run_id=? AND id=? AND geotagged=1",
                (run_id, marker_id),
            ).fetchone()
        if row is None:
            raise UnknownMarkerError(f"no marker with id {marker_id}")
        return self._marker_from_row(row)

    def asset_by_id(self, asset_id: int, run_id: Optional[int] = None):
        """Any image asset (marker or non-geotagged) by id."""
        run_id = self.require_run(run_id)
        with self._connect() as conn:
            row = conn.execute(
                "SELECT * FROM markers WHERE run_id=? AND id=?",
                (run_id, asset_id),
            ).fetchone()
        if row is None:
            raise UnknownMarkerError(f"no asset with id {asset_id}")
        if row["geotagged"]:
            return self._marker_from_row(row)
        return self._nongeo_from_row(row)

    def linked_non_geotagged(
        self, marker_id: int, slot: int, run_id: Optional[int] = None
    ) -> list[NonGeoRow]:
        """Non-geotagged images of the marker's device within +/- slot hours."""
        if slot not in SLOT_HOURS:
            raise ValueError(f"slot must be one of {SLOT_HOURS}")
        run_id = self.require_run(run_id)
        marker = self.marker_by_id(marker_id, run_id)
        if marker.datetime is None:
            return []
        anchor = datetime.strptime(marker.datetime, "%Y-%m-%d %H:%M:%S")
        lo = (anchor - timedelta(hours=slot)).strftime("%Y-%m-%d %H:%M:%S")
        hi = (anchor + timedelta(hours=slot)).strftime("%Y-%m-%d %H:%M:%S")
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT * FROM markers WHERE run_id=? AND geotagged=0 AND"
                " fake_id=? AND datetime IS NOT NULL AND datetime BETWEEN ? AND ?"
                " ORDER BY datetime ASC, id ASC",
                (run_id, marker.fake_id, lo, hi),
            ).fetchall()
        return [self._nongeo_from_row(r) for r in rows]

    def same_location_group(
        self, marker_id: int, run_id: Optional[int] = None
    ) -> list[MarkerRow]:
        """All markers in the coordinate bucket, reference first."""
        run_id = self.require_run(run_id)
        marker = self.marker_by_id(marker_id, run_id)
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT * FROM markers WHERE run_id=? AND geotagged=1 AND"
                " lat_e6=? AND lng_e6=? ORDER BY reference DESC, id ASC",
                (run_id, marker.lat_e6, marker.lng_e6),
            ).fetchall()
        return [self._marker_from_row(r) for r in rows]

    def devices(self, run_id: Optional[int] = None) -> list[DeviceRow]:
        run_id = self.require_run(run_id)
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT * FROM devices WHERE run_id=? ORDER BY ordre ASC",
                (run_id,),
            ).fetchall()
        return [
            DeviceRow(
                fake_id=r["fake_id"],
                make=r["make"],
                model=r["model"],
                ordre=r["ordre"],
                color=r["color"],
                nb_fake_id=r["nb_fake_id"],
            )
            for r in rows
        ]

    def marker_count(self, run_id: Optional[int] = None) -> int:
        run_id = self.require_run(run_id)
        with self._connect() as conn:
            row = conn.execute(
                "SELECT COUNT(*) AS n FROM markers WHERE run_id=? AND geotagged=1",
                (run_id,),
            ).fetchone()
        return row["n"]

    def non_geotagged(self, run_id: Optional[int] = None) -> list[NonGeoRow]:
        run_id = self.require_run(run_id)
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT * FROM markers WHERE run_id=? AND geotagged=0"
                " ORDER BY id ASC",
                (run_id,),
            ).fetchall()
        return [self._nongeo_from_row(r) for r in rows]
