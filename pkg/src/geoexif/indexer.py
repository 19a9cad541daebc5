"""Recursive read-only evidence scan.

Detects images by content, extracts and cross-checks metadata, builds
thumbnails, precomputes the device/time/location correlations, and
populates the store. Files under the scan root are only ever opened for
reading; everything generated lands in the workspace.
"""

from __future__ import annotations

import enum
import hashlib
import io
import logging
import os
import threading
import warnings
from bisect import bisect_left, bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable, Optional

from PIL import Image

from . import exif as exif_mod
from .device import DeviceFingerprint, build_fingerprint
from .exif import ExifRecord, ImageKind, MalformedRationalError, RationalU
from .geo import DmsCoordinate, GeoPoint, InvalidCoordinateError, dms_to_decimal
from .geo_services import GeoServices, offline_services
from .store import (
    PALETTE_SIZE,
    SLOT_HOURS,
    AnalysisStore,
    DeviceRow,
    MarkerRow,
    NonGeoRow,
)

logger = logging.getLogger(__name__)

MARKER_TYPE = 1  # opaque marker "type" column; single-valued for now


class ScanSetupError(Exception):
    """Bad scan preconditions (missing root, workspace inside root...)."""


class ScanAbortedError(Exception):
    """Scan failed midway; the run is left without an end time."""


class Classification(enum.Enum):
    GEOTAGGED = "geotagged"
    NON_GEOTAGGED = "non-geotagged"


class FindingCode(enum.Enum):
    TIMESTAMP_MISMATCH = "TIMESTAMP_MISMATCH"
    LOW_GPS_ACCURACY = "LOW_GPS_ACCURACY"
    NON_GPS_POSITIONING = "NON_GPS_POSITIONING"
    ALTITUDE_IMPLAUSIBLE = "ALTITUDE_IMPLAUSIBLE"
    MALFORMED_METADATA = "MALFORMED_METADATA"


class Severity(enum.Enum):
    INFO = "INFO"
    WARNING = "WARNING"


@dataclass(frozen=True)
class VerificationFinding:
    code: FindingCode
    severity: Severity
    detail: str

    def to_dict(self) -> dict:
        return {
            "code": self.code.value,
            "severity": self.severity.value,
            "detail": self.detail,
        }


@dataclass
class ScanConfig:
    root: Path
    workspace: Path
    slot_hours: tuple[int, ...] = SLOT_HOURS
    thumbnail_max_px: int = 256
    reverse_geocode: bool = False
    altitude_check: bool = False
    dop_threshold: float = 5.0
    altitude_tolerance_m: float = 200.0
    workers: int = 1

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        self.workspace = Path(self.workspace)
        if tuple(self.slot_hours) != SLOT_HOURS:
            raise ScanSetupError(f"slot hours are fixed at {SLOT_HOURS}")


@dataclass
class ImageAsset:
    path: str
    name: str
    content_hash: str
    kind: ImageKind
    exif: Optional[ExifRecord]
    fingerprint: DeviceFingerprint
    exif_datetime: Optional[datetime] = None
    gps_datetime: Optional[datetime] = None
    position: Optional[GeoPoint] = None
    altitude_m: Optional[float] = None
    thumbnail: Optional[str] = None  # workspace-relative
    address: Optional[str] = None
    findings: list[VerificationFinding] = field(default_factory=list)
    multiples: int = 0
    reference: bool = False
    slot_counts: dict[int, int] = field(default_factory=dict)

    @property
    def geotagged(self) -> bool:
        return self.position is not None


@dataclass
class AnalysisRun:
    id: int
    start_time: datetime
    end_time: Optional[datetime]
    files_scanned: int = 0
    images_found: int = 0
    geotagged_count: int = 0


@dataclass
class DeviceRank:
    fake_id: str
    make: str
    model: str
    ordre: int
    color: int
    nb_fake_id: int


def parse_timestamp(value: object) -> Optional[datetime]:
    """Parse an EXIF timestamp string; tolerates '-' date separators."""
    if not isinstance(value, str):
        return None
    text = value.strip().rstrip("\x00")
    for fmt in ("%Y:%m:%d %H:%M:%S", "%Y-%m-%d %H:%M:%S"):
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    return None


def extract_exif_datetime(record: ExifRecord) -> Optional[datetime]:
    """Device timestamp, by EXIF convention of decreasing trust."""
    for tag in ("DateTimeOriginal", "CreateDate", "DateTime"):
        stamp = parse_timestamp(record.named(tag))
        if stamp is not None:
            return stamp
    return None


def extract_gps_datetime(record: ExifRecord) -> Optional[datetime]:
    """UTC timestamp from GPSDateStamp + GPSTimeStamp, when both exist."""
    gps = exif_mod.extract_gps(record)
    if gps is None or gps.date_stamp is None or gps.time_stamp is None:
        return None
    base = None
    for fmt in ("%Y:%m:%d", "%Y-%m-%d"):
        try:
            base = datetime.strptime(gps.date_stamp.strip().rstrip("\x00"), fmt)
            break
        except ValueError:
            continue
    if base is None or len(gps.time_stamp) < 3:
        return None
    try:
        h, m, s = (exif_mod.rational_to_decimal(r) for r in gps.time_stamp[:3])
    except MalformedRationalError:
        return None
    if not (0 <= h < 24 and 0 <= m < 60 and 0 <= s < 61):
        return None
    return base + timedelta(hours=h, minutes=m, seconds=s)


def _triplet_to_decimal(
    triplet: tuple[RationalU, ...], hemisphere: str
) -> tuple[Optional[float], Optional[str], bool]:
    """Returns (decimal, problem, canonical)."""
    if len(triplet) < 3:
        return None, f"coordinate needs 3 rationals, got {len(triplet)}", True
    try:
        deg, minutes, seconds = (
            exif_mod.rational_to_decimal(r) for r in triplet[:3]
        )
    except MalformedRationalError as exc:
        return None, str(exc), True
    coord = DmsCoordinate(deg, minutes, seconds, hemisphere)
    try:
        return dms_to_decimal(coord), None, coord.is_canonical
    except InvalidCoordinateError as exc:
        return None, str(exc), coord.is_canonical


def classify(asset: ImageAsset) -> Classification:
    """Split assets into geotagged/non-geotagged; sets asset.position.

    Requires all four positional GPS tags present and convertible;
    anything less (or malformed rationals / out-of-range values) lands in
    the non-geotagged group with a MALFORMED_METADATA finding when the
    tags existed but could not be used.
    """
    asset.position = None
    if asset.exif is None:
        return Classification.NON_GEOTAGGED
    gps = exif_mod.extract_gps(asset.exif)
    if gps is None:
        return Classification.NON_GEOTAGGED
    present = (
        gps.latitude is not None
        and gps.latitude_ref is not None
        and gps.longitude is not None
        and gps.longitude_ref is not None
    )
    if not present:
        if gps.latitude is not None or gps.longitude is not None:
            asset.findings.append(
                VerificationFinding(
                    FindingCode.MALFORMED_METADATA,
                    Severity.INFO,
                    "incomplete GPS position tags; image treated as non-geotagged",
                )
            )
        return Classification.NON_GEOTAGGED
    if gps.latitude_ref not in ("N", "S") or gps.longitude_ref not in ("E", "W"):
        asset.findings.append(
            VerificationFinding(
                FindingCode.MALFORMED_METADATA,
                Severity.WARNING,
                f"invalid hemisphere refs {gps.latitude_ref!r}/{gps.longitude_ref!r}",
            )
        )
        return Classification.NON_GEOTAGGED
    lat, lat_err, lat_canon = _triplet_to_decimal(gps.latitude, gps.latitude_ref)
    lng, lng_err, lng_canon = _triplet_to_decimal(gps.longitude, gps.longitude_ref)
    if lat is None or lng is None:
        asset.findings.append(
            VerificationFinding(
                FindingCode.MALFORMED_METADATA,
                Severity.WARNING,
                f"unusable GPS coordinates: {lat_err or lng_err}"
                f" (lat={gps.latitude!r} lng={gps.longitude!r})",
            )
        )
        return Classification.NON_GEOTAGGED
    try:
        asset.position = GeoPoint(lat, lng)
    except InvalidCoordinateError as exc:
        asset.findings.append(
            VerificationFinding(
                FindingCode.MALFORMED_METADATA, Severity.WARNING, str(exc)
            )
        )
        return Classification.NON_GEOTAGGED
    if not (lat_canon and lng_canon):
        asset.findings.append(
            VerificationFinding(
                FindingCode.MALFORMED_METADATA,
                Severity.INFO,
                f"non-canonical DMS values (lat={gps.latitude!r}"
                f" lng={gps.longitude!r}); converted anyway",
            )
        )
    return Classification.GEOTAGGED


def verify_asset(
    asset: ImageAsset, config: ScanConfig, services: GeoServices
) -> list[VerificationFinding]:
    """Cross-verification checks over one asset's metadata."""
    findings: list[VerificationFinding] = []
    if asset.exif is None:
        return findings
    gps = exif_mod.extract_gps(asset.exif)
    method = gps.processing_method if gps else None
    if method:
        normalized = method.strip().upper()
        if normalized in ("CELLID", "WLAN", "MANUAL"):
            findings.append(
                VerificationFinding(
                    FindingCode.NON_GPS_POSITIONING,
                    Severity.INFO,
                    f"position from GPSProcessingMethod={normalized}"
                    " (not a satellite fix)",
                )
            )
        elif normalized == "GPS" and gps.dop is not None:
            if gps.dop > config.dop_threshold:
                findings.append(
                    VerificationFinding(
                        FindingCode.LOW_GPS_ACCURACY,
                        Severity.WARNING,
                        f"GPSDOP={gps.dop} exceeds threshold"
                        f" {config.dop_threshold}",
                    )
                )
    if asset.exif_datetime is not None and asset.gps_datetime is not None:
        delta = abs(asset.exif_datetime - asset.gps_datetime)
        if delta > timedelta(hours=24):
            findings.append(
                VerificationFinding(
                    FindingCode.TIMESTAMP_MISMATCH,
                    Severity.WARNING,
                    f"device time {asset.exif_datetime} vs GPS time"
                    f" {asset.gps_datetime} differ by {delta} (>24h);"
                    " wall-clock comparison, device zone unknown",
                )
            )
    if (
        config.altitude_check
        and asset.position is not None
        and asset.altitude_m is not None
    ):
        elevation = services.elevation_m(asset.position)
        if elevation is None:
            findings.append(
                VerificationFinding(
                    FindingCode.ALTITUDE_IMPLAUSIBLE,
                    Severity.INFO,
                    "no elevation data for position; altitude check skipped",
                )
            )
        elif abs(asset.altitude_m - elevation) > config.altitude_tolerance_m:
            findings.append(
                VerificationFinding(
                    FindingCode.ALTITUDE_IMPLAUSIBLE,
                    Severity.WARNING,
                    f"GPSAltitude {asset.altitude_m} m vs terrain"
                    f" {elevation} m differs beyond"
                    f" {config.altitude_tolerance_m} m",
                )
            )
    return findings


def make_thumbnail(data: bytes, content_hash: str, config: ScanConfig) -> Optional[str]:
    """Write an aspect-preserving thumbnail; never upscales.

    Returns the workspace-relative path, or None when the pixel stream
    cannot be decoded.
    """
    rel = f"thumbs/{content_hash[:16]}.jpg"
    target = config.workspace / rel
    if target.exists():
        return rel
    try:
        with warnings.catch_warnings():
            # Pillow warns loudly on fixture-grade EXIF corruption.
            warnings.simplefilter("ignore")
            img = Image.open(io.BytesIO(data))
            img = img.convert("RGB")
            img.thumbnail((config.thumbnail_max_px, config.thumbnail_max_px))
            target.parent.mkdir(parents=True, exist_ok=True)
            img.save(target, format="JPEG", quality=85)
    except Exception as exc:
        logger.info("thumbnail failed for %s: %s", content_hash[:16], exc)
        return None
    return rel


def _harvest_metadata(record: Optional[ExifRecord]) -> dict:
    """All harvested tags in JSON-safe form for the report column."""
    if record is None:
        return {}

    def safe(value: object) -> object:
        if isinstance(value, RationalU):
            return f"{value.numerator}/{value.denominator}"
        if isinstance(value, tuple):
            return [safe(v) for v in value]
        if isinstance(value, (bytes, bytearray)):
            return bytes(value).hex()
        return value

    named = {}
    opaque = []
    for (ifd, tag_id), entry in sorted(record.entries.items()):
        if entry.name is not None:
            named[entry.name] = safe(entry.value)
        else:
            opaque.append(
                {"ifd": ifd, "tag": f"0x{tag_id:04X}", "value": safe(entry.value)}
            )
    result: dict = {"byte_order": record.byte_order.name, "tags": named}
    if opaque:
        result["opaque_tags"] = opaque
    if record.warnings:
        result["parse_warnings"] = list(record.warnings)
    return result


def build_asset(
    path: Path,
    data: bytes,
    kind: ImageKind,
    config: ScanConfig,
    services: GeoServices,
) -> ImageAsset:
    record = exif_mod.parse_exif(data)
    asset = ImageAsset(
        path=str(path),
        name=path.name,
        content_hash=hashlib.sha256(data).hexdigest(),
        kind=kind,
        exif=record,
        fingerprint=build_fingerprint(record),
    )
    if record is not None:
        asset.exif_datetime = extract_exif_datetime(record)
        asset.gps_datetime = extract_gps_datetime(record)
        gps = exif_mod.extract_gps(record)
        if gps is not None and gps.altitude is not None:
            try:
                altitude = exif_mod.rational_to_decimal(gps.altitude)
                asset.altitude_m = -altitude if gps.altitude_below_sea else altitude
            except MalformedRationalError:
                pass
        for warning in record.warnings:
            asset.findings.append(
                VerificationFinding(
                    FindingCode.MALFORMED_METADATA, Severity.INFO, warning
                )
            )
    classify(asset)
    asset.thumbnail = make_thumbnail(data, asset.content_hash, config)
    if asset.thumbnail is None:
        asset.findings.append(
            VerificationFinding(
                FindingCode.MALFORMED_METADATA,
                Severity.INFO,
                "pixel stream undecodable; no thumbnail generated",
            )
        )
    if asset.position is not None and config.reverse_geocode:
        asset.address = services.reverse_geocode(asset.position)
    asset.findings.extend(verify_asset(asset, config, services))
    return asset


def group_same_coordinates(assets: list[ImageAsset]) -> None:
    """Bucket geotagged assets by 6-decimal coordinates.

    Every member of a bucket of size n carries multiples = n - 1; the
    lexicographically lowest path becomes the deterministic reference.
    """
    buckets: dict[tuple[int, int], list[ImageAsset]] = {}
    for asset in assets:
        if asset.position is None:
            continue
        key = (
            round(asset.position.latitude * 10**6),
            round(asset.position.longitude * 10**6),
        )
        buckets.setdefault(key, []).append(asset)
    for members in buckets.values():
        reference = min(members, key=lambda a: a.path)
        for asset in members:
            asset.multiples = len(members) - 1
            asset.reference = asset is reference


def compute_timeslot_links(assets: list[ImageAsset]) -> None:
    """Per-marker counts of same-device non-geotagged images in each slot.

    Both sides use the device timestamp. Implemented with per-device
    sorted timestamp arrays and binary search; the test suite holds this
    against a plain pairwise oracle.
    """
    nongeo_by_device: dict[str, list[datetime]] = {}
    for asset in assets:
        if not asset.geotagged and asset.exif_datetime is not None:
            nongeo_by_device.setdefault(asset.fingerprint.fake_id, []).append(
                asset.exif_datetime
            )
    for stamps in nongeo_by_device.values():
        stamps.sort()
    for asset in assets:
        if not asset.geotagged:
            continue
        if asset.exif_datetime is None:
            asset.slot_counts = {h: 0 for h in SLOT_HOURS}
            asset.findings.append(
                VerificationFinding(
                    FindingCode.MALFORMED_METADATA,
                    Severity.INFO,
                    "no device timestamp; time-slot linking disabled",
                )
            )
            continue
        stamps = nongeo_by_device.get(asset.fingerprint.fake_id, [])
        counts = {}
        for hours in SLOT_HOURS:
            width = timedelta(hours=hours)
            lo = bisect_left(stamps, asset.exif_datetime - width)
            hi = bisect_right(stamps, asset.exif_datetime + width)
            counts[hours] = hi - lo
        asset.slot_counts = counts


def rank_devices(assets: list[ImageAsset]) -> dict[str, DeviceRank]:
    """Rank devices by total image count (descending, fake_id tiebreak)."""
    counts: dict[str, int] = {}
    first_seen: dict[str, DeviceFingerprint] = {}
    for asset in assets:
        fake_id = asset.fingerprint.fake_id
        counts[fake_id] = counts.get(fake_id, 0) + 1
        first_seen.setdefault(fake_id, asset.fingerprint)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    result = {}
    for index, (fake_id, count) in enumerate(ranked):
        fp = first_seen[fake_id]
        result[fake_id] = DeviceRank(
            fake_id=fake_id,
            make=fp.make,
            model=fp.model,
            ordre=index + 1,
            color=index % PALETTE_SIZE,
            nb_fake_id=count,
        )
    return result


def _list_files(root: Path) -> list[Path]:
    """Every directory entry that is not a directory, in sorted path order.

    Dangling symlinks are included (they get counted, fail to read, and
    are skipped with a log line). Symlinked directories are not followed.
    """
    paths: list[Path] = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        dirnames.sort()
        for name in filenames:
            paths.append(Path(dirpath) / name)
    paths.sort(key=str)
    return paths


ProgressFn = Callable[[int, int, int], None]


def scan_tree(
    config: ScanConfig,
    services: Optional[GeoServices] = None,
    store: Optional[AnalysisStore] = None,
    progress: Optional[ProgressFn] = None,
) -> AnalysisRun:
    """Run one full scan; returns the finished run's bookkeeping.

    The evidence tree is never written to. If anything fails after the
    run record is created, the run keeps a NULL end time (the unfinished
    marker) and ScanAbortedError is raised.
    """
    root = config.root.resolve()
    workspace = config.workspace.resolve()
    if not root.is_dir():
        raise ScanSetupError(f"scan root is not a readable directory: {root}")
    if workspace == root or root in workspace.parents:
        raise ScanSetupError("workspace must live outside the scan root")
    workspace.mkdir(parents=True, exist_ok=True)

    if store is None:
        store = AnalysisStore(workspace)
    if services is None:
        services = offline_services(workspace)

    start_time = datetime.now().replace(microsecond=0)
    run_id = store.begin_run(start_time)
    run = AnalysisRun(id=run_id, start_time=start_time, end_time=None)

    lock = threading.Lock()

    def notify() -> None:
        if progress is not None:
            progress(run.files_scanned, run.images_found, run.geotagged_count)

    def process(path: Path) -> Optional[ImageAsset]:
        try:
            data = path.read_bytes()
        except OSError as exc:
            logger.warning("unreadable file skipped: %s (%s)", path, exc)
            with lock:
                run.files_scanned += 1
                notify()
            return None
        kind = exif_mod.detect_image_kind(data)
        if kind not in (ImageKind.JPEG, ImageKind.TIFF):
            with lock:
                run.files_scanned += 1
                notify()
            return None
        asset = build_asset(path, data, kind, config, services)
        with lock:
            run.files_scanned += 1
            run.images_found += 1
            if asset.geotagged:
                run.geotagged_count += 1
            notify()
        return asset

    try:
        paths = _list_files(root)
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                results = list(pool.map(process, paths))
        else:
            results = [process(p) for p in paths]
        assets = [a for a in results if a is not None]

        group_same_coordinates(assets)
        compute_timeslot_links(assets)
        ranks = rank_devices(assets)

        assets.sort(key=lambda a: a.path)
        markers: list[MarkerRow] = []
        others: list[NonGeoRow] = []
        for asset_id, asset in enumerate(assets, start=1):
            rank = ranks[asset.fingerprint.fake_id]
            meta = _harvest_metadata(asset.exif)
            findings = [f.to_dict() for f in asset.findings]
            stamp = (
                asset.exif_datetime.strftime("%Y-%m-%d %H:%M:%S")
                if asset.exif_datetime
                else None
            )
            if asset.geotagged:
                markers.append(
                    MarkerRow(
                        id=asset_id,
                        run_id=run_id,
                        name=asset.name,
                        path=asset.path,
                        thumb_name=asset.thumbnail,
                        make=asset.fingerprint.make,
                        model=asset.fingerprint.model,
                        fake_id=asset.fingerprint.fake_id,
                        datetime=stamp,
                        gps_datetime=(
                            asset.gps_datetime.strftime("%Y-%m-%d %H:%M:%S")
                            if asset.gps_datetime
                            else None
                        ),
                        lat_e6=round(asset.position.latitude * 10**6),
                        lng_e6=round(asset.position.longitude * 10**6),
                        multiples=asset.multiples,
                        reference=asset.reference,
                        type=MARKER_TYPE,
                        color=rank.color,
                        ordre=rank.ordre,
                        nb_fake_id=rank.nb_fake_id,
                        slot_counts=dict(asset.slot_counts),
                        metadata=meta,
                        address=asset.address,
                        findings=findings,
                        content_hash=asset.content_hash,
                        altitude_m=asset.altitude_m,
                    )
                )
            else:
                others.append(
                    NonGeoRow(
                        id=asset_id,
                        run_id=run_id,
                        name=asset.name,
                        path=asset.path,
                        thumb_name=asset.thumbnail,
                        make=asset.fingerprint.make,
                        model=asset.fingerprint.model,
                        fake_id=asset.fingerprint.fake_id,
                        datetime=stamp,
                        metadata=meta,
                        findings=findings,
                        content_hash=asset.content_hash,
                    )
                )
        store.persist_markers(markers)
        store.persist_non_geotagged(others)
        store.persist_devices(
            run_id,
            [
                DeviceRow(
                    fake_id=r.fake_id,
                    make=r.make,
                    model=r.model,
                    ordre=r.ordre,
                    color=r.color,
                    nb_fake_id=r.nb_fake_id,
                )
                for r in sorted(ranks.values(), key=lambda r: r.ordre)
            ],
        )
        run.end_time = datetime.now().replace(microsecond=0)
        store.finish_run(
            run_id,
            run.end_time,
            run.files_scanned,
            run.images_found,
            run.geotagged_count,
        )
    except Exception as exc:
        logger.error("scan aborted: %s", exc)
        raise ScanAbortedError(str(exc)) from exc
    return run
