"""Synthetic evidence-corpus generator.

Builds JPEG fixtures with hand-assembled EXIF segments (including
deliberate corruptions) plus a manifest of expected scan results. The
manifest's correlation numbers are computed here with a plain pairwise
double loop, independent of the indexer's algorithms, so scans can be
checked against it.
"""

from __future__ import annotations

import io
import json
import random
import struct
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Optional

from PIL import Image

from .exif import IFD0, IFD_EXIF, IFD_GPS, RationalU

SLOT_HOURS = (1, 2, 3, 4, 5, 12, 24)

_ASCII = 2
_SHORT = 3
_LONG = 4
_RATIONAL = 5
_UNDEFINED = 7

_TAG_EXIF_IFD = 0x8769
_TAG_GPS_IFD = 0x8825

# name -> (ifd, tag id, tiff type)
_BUILD_TAGS = {
    "Make": (IFD0, 0x010F, _ASCII),
    "Model": (IFD0, 0x0110, _ASCII),
    "Orientation": (IFD0, 0x0112, _SHORT),
    "DateTime": (IFD0, 0x0132, _ASCII),
    "DateTimeOriginal": (IFD_EXIF, 0x9003, _ASCII),
    "CreateDate": (IFD_EXIF, 0x9004, _ASCII),
    "MakerNote": (IFD_EXIF, 0x927C, _UNDEFINED),
    "OwnerName": (IFD_EXIF, 0xA430, _ASCII),
    "SerialNumber": (IFD_EXIF, 0xA431, _ASCII),
    "LensInfo": (IFD_EXIF, 0xA432, _RATIONAL),
    "LensMake": (IFD_EXIF, 0xA433, _ASCII),
    "LensModel": (IFD_EXIF, 0xA434, _ASCII),
    "LensSerialNumber": (IFD_EXIF, 0xA435, _ASCII),
    "GPSVersionID": (IFD_GPS, 0x0000, 1),
    "GPSLatitudeRef": (IFD_GPS, 0x0001, _ASCII),
    "GPSLatitude": (IFD_GPS, 0x0002, _RATIONAL),
    "GPSLongitudeRef": (IFD_GPS, 0x0003, _ASCII),
    "GPSLongitude": (IFD_GPS, 0x0004, _RATIONAL),
    "GPSAltitudeRef": (IFD_GPS, 0x0005, 1),
    "GPSAltitude": (IFD_GPS, 0x0006, _RATIONAL),
    "GPSTimeStamp": (IFD_GPS, 0x0007, _RATIONAL),
    "GPSDOP": (IFD_GPS, 0x000B, _RATIONAL),
    "GPSProcessingMethod": (IFD_GPS, 0x001B, _UNDEFINED),
    "GPSDateStamp": (IFD_GPS, 0x001D, _ASCII),
}

_TYPE_SIZES = {1: 1, _ASCII: 1, _SHORT: 2, _LONG: 4, _RATIONAL: 8, _UNDEFINED: 1}


def _encode_value(order: str, type_id: int, value: object) -> tuple[int, bytes]:
    """Encode one tag value; returns (count, payload bytes)."""
    if type_id == _ASCII:
        raw = str(value).encode("utf-8") + b"\x00"
        return len(raw), raw
    if type_id == _UNDEFINED:
        raw = bytes(value)
        return len(raw), raw
    if type_id == _RATIONAL:
        items = value if isinstance(value, tuple) and not isinstance(value, RationalU) else (value,)
        raw = b"".join(
            struct.pack(order + "II", r.numerator, r.denominator) for r in items
        )
        return len(items), raw
    items = value if isinstance(value, tuple) else (value,)
    code = {1: "B", _SHORT: "H", _LONG: "I"}[type_id]
    return len(items), struct.pack(order + code * len(items), *items)


def build_tiff(
    tags: dict[str, object],
    byte_order: str = "MM",
    raw_tags: Optional[list[tuple[str, int, int, object]]] = None,
    truncate_to_entries: Optional[int] = None,
) -> bytes:
    """Assemble a TIFF blob holding the given named tags.

    raw_tags allows (ifd, tag_id, type_id, value) entries outside the
    known-name table. truncate_to_entries cuts the blob after that many
    IFD0 entries while the declared count still names them all, which is
    how real-world truncated files look.
    """
    order = ">" if byte_order == "MM" else "<"
    per_ifd: dict[str, list[tuple[int, int, object]]] = {IFD0: [], IFD_EXIF: [], IFD_GPS: []}
    for name, value in tags.items():
        ifd, tag_id, type_id = _BUILD_TAGS[name]
        per_ifd[ifd].append((tag_id, type_id, value))
    for ifd, tag_id, type_id, value in raw_tags or []:
        per_ifd[ifd].append((tag_id, type_id, value))

    if per_ifd[IFD_EXIF]:
        per_ifd[IFD0].append((_TAG_EXIF_IFD, _LONG, 0))
    if per_ifd[IFD_GPS]:
        per_ifd[IFD0].append((_TAG_GPS_IFD, _LONG, 0))
    for entries in per_ifd.values():
        entries.sort(key=lambda e: e[0])

    ifd_order = [IFD0] + [i for i in (IFD_EXIF, IFD_GPS) if per_ifd[i]]
    offsets: dict[str, int] = {}
    cursor = 8
    for ifd in ifd_order:
        offsets[ifd] = cursor
        cursor += 2 + 12 * len(per_ifd[ifd]) + 4
    value_area_start = cursor

    # First pass: encode values, laying out-of-line data sequentially.
    value_blob = b""
    encoded: dict[str, list[tuple[int, int, int, bytes, Optional[int]]]] = {}
    for ifd in ifd_order:
        rows = []
        for tag_id, type_id, value in per_ifd[ifd]:
            if tag_id in (_TAG_EXIF_IFD, _TAG_GPS_IFD):
                target = IFD_EXIF if tag_id == _TAG_EXIF_IFD else IFD_GPS
                count, payload = 1, struct.pack(order + "I", offsets[target])
                rows.append((tag_id, type_id, count, payload, None))
                continue
            count, payload = _encode_value(order, type_id, value)
            if len(payload) <= 4:
                rows.append((tag_id, type_id, count, payload.ljust(4, b"\x00"), None))
            else:
                if len(payload) % 2:
                    payload += b"\x00"
                rows.append((tag_id, type_id, count, payload, value_area_start + len(value_blob)))
                value_blob += payload
        encoded[ifd] = rows

    blob = (b"MM" if byte_order == "MM" else b"II") + struct.pack(order + "HI", 42, 8)
    for ifd in ifd_order:
        rows = encoded[ifd]
        blob += struct.pack(order + "H", len(rows))
        for tag_id, type_id, count, payload, value_offset in rows:
            blob += struct.pack(order + "HHI", tag_id, type_id, count)
            if value_offset is None:
                blob += payload[:4]
            else:
                blob += struct.pack(order + "I", value_offset)
        blob += struct.pack(order + "I", 0)
    blob += value_blob

    if truncate_to_entries is not None:
        blob = blob[: 8 + 2 + 12 * truncate_to_entries]
    return blob


def build_exif_app1(tiff: bytes) -> bytes:
    payload = b"Exif\x00\x00" + tiff
    return b"\xff\xe1" + struct.pack(">H", len(payload) + 2) + payload


def base_jpeg(width: int = 64, height: int = 48,
              color: tuple[int, int, int] = (120, 120, 120)) -> bytes:
    img = Image.new("RGB", (width, height), color)
    buf = io.BytesIO()
    img.save(buf, format="JPEG", quality=80)
    return buf.getvalue()


def insert_app1(jpeg: bytes, app1: bytes) -> bytes:
    """Splice an APP1 segment right after the SOI marker."""
    return jpeg[:2] + app1 + jpeg[2:]


def decimal_to_dms(value: float) -> tuple[str, tuple[RationalU, RationalU, RationalU]]:
    """Split signed decimal degrees into (hemisphere-magnitude, DMS triplet).

    Seconds are encoded at 1/10000 s granularity (~3 mm), so the decimal
    survives a round trip through the 6-decimal marker representation.
    """
    mag = abs(value)
    deg = int(mag)
    rem_min = (mag - deg) * 60.0
    minutes = int(rem_min)
    seconds = (rem_min - minutes) * 60.0
    triplet = (
        RationalU(deg, 1),
        RationalU(minutes, 1),
        RationalU(round(seconds * 10000), 10000),
    )
    return ("-" if value < 0 else "+"), triplet


@dataclass
class ImageSpec:
    """Recipe for one synthetic image file."""

    name: str
    directory: str = ""
    make: Optional[str] = None
    model: Optional[str] = None
    serial: Optional[str] = None
    owner: Optional[str] = None
    lens_model: Optional[str] = None
    datetime: Optional[str] = None  # EXIF form "YYYY:MM:DD HH:MM:SS"
    lat: Optional[float] = None
    lng: Optional[float] = None
    altitude_m: Optional[float] = None
    gps_datetime: Optional[str] = None  # UTC, EXIF form
    processing_method: Optional[str] = None
    dop: Optional[float] = None
    width: int = 64
    height: int = 48
    color: tuple[int, int, int] = (120, 120, 120)
    no_exif: bool = False
    corrupt_pixels: bool = False
    truncate_exif: bool = False
    zero_denominator_gps: bool = False

    @property
    def relpath(self) -> str:
        return f"{self.directory}/{self.name}" if self.directory else self.name

    @property
    def fake_id(self) -> str:
        """Expected device id, per the same concatenation contract the
        scanner implements (recomputed here as the oracle)."""
        if self.truncate_exif:
            return (self.make or "") + (self.model or "")
        parts = (self.make or "").strip() + (self.model or "").strip()
        for extra in (self.serial, self.owner, self.lens_model):
            if extra is not None:
                parts += " | " + extra
        return parts if parts else "UNKNOWN-DEVICE"

    @property
    def effectively_geotagged(self) -> bool:
        if self.truncate_exif or self.no_exif or self.zero_denominator_gps:
            return False
        return self.lat is not None and self.lng is not None

    @property
    def parsed_datetime(self) -> Optional[datetime]:
        if self.datetime is None or self.truncate_exif or self.no_exif:
            return None
        return datetime.strptime(self.datetime, "%Y:%m:%d %H:%M:%S")


def render_image(spec: ImageSpec) -> bytes:
    """Produce the file bytes for one image spec."""
    if spec.no_exif:
        return base_jpeg(spec.width, spec.height, spec.color)

    tags: dict[str, object] = {}
    if spec.make is not None:
        tags["Make"] = spec.make
    if spec.model is not None:
        tags["Model"] = spec.model
    if spec.serial is not None:
        tags["SerialNumber"] = spec.serial
    if spec.owner is not None:
        tags["OwnerName"] = spec.owner
    if spec.lens_model is not None:
        tags["LensModel"] = spec.lens_model
    if spec.datetime is not None:
        tags["DateTime"] = spec.datetime
        tags["DateTimeOriginal"] = spec.datetime
    if spec.lat is not None and spec.lng is not None:
        tags["GPSVersionID"] = (2, 2, 0, 0)
        sign, lat_dms = decimal_to_dms(spec.lat)
        tags["GPSLatitudeRef"] = "S" if sign == "-" else "N"
        if spec.zero_denominator_gps:
            lat_dms = (lat_dms[0], lat_dms[1], RationalU(lat_dms[2].numerator, 0))
        tags["GPSLatitude"] = lat_dms
        sign, lng_dms = decimal_to_dms(spec.lng)
        tags["GPSLongitudeRef"] = "W" if sign == "-" else "E"
        tags["GPSLongitude"] = lng_dms
    if spec.altitude_m is not None:
        tags["GPSAltitudeRef"] = 1 if spec.altitude_m < 0 else 0
        tags["GPSAltitude"] = RationalU(round(abs(spec.altitude_m) * 100), 100)
    if spec.gps_datetime is not None:
        dt = datetime.strptime(spec.gps_datetime, "%Y:%m:%d %H:%M:%S")
        tags["GPSDateStamp"] = dt.strftime("%Y:%m:%d")
        tags["GPSTimeStamp"] = (
            RationalU(dt.hour, 1),
            RationalU(dt.minute, 1),
            RationalU(dt.second, 1),
        )
    if spec.processing_method is not None:
        tags["GPSProcessingMethod"] = b"ASCII\x00\x00\x00" + spec.processing_method.encode()
    if spec.dop is not None:
        tags["GPSDOP"] = RationalU(round(spec.dop * 10), 10)

    if spec.truncate_exif:
        # Declared entry list is longer than what survives; the three
        # survivors carry inline (<= 4 byte) values.
        tiff = build_tiff(
            {
                "Make": (spec.make or "FUJ")[:3],
                "Model": (spec.model or "XT1")[:3],
                "Orientation": 1,
                "DateTime": spec.datetime or "2013:01:01 00:00:00",
                "DateTimeOriginal": "2013:01:01 00:00:00",
                "OwnerName": "someone with a long name",
                "SerialNumber": "0123456789",
            },
            truncate_to_entries=3,
        )
    else:
        tiff = build_tiff(tags)
    app1 = build_exif_app1(tiff)
    if spec.corrupt_pixels:
        # Valid SOI + EXIF followed by garbage instead of scan data.
        return b"\xff\xd8" + app1 + b"\x00\x13\x37" * 40
    return insert_app1(base_jpeg(spec.width, spec.height, spec.color), app1)


def _slot_counts_bruteforce(
    marker_dt: Optional[datetime], nongeo_dts: list[datetime]
) -> dict[str, int]:
    counts = {}
    for hours in SLOT_HOURS:
        if marker_dt is None:
            counts[str(hours)] = 0
            continue
        limit = timedelta(hours=hours)
        counts[str(hours)] = sum(1 for t in nongeo_dts if abs(t - marker_dt) <= limit)
    return counts


def build_manifest(specs: list[ImageSpec], text_files: list[str]) -> dict:
    """Expected scan outcome, derived from the recipes by brute force."""
    device_counts: dict[str, int] = {}
    for spec in specs:
        device_counts[spec.fake_id] = device_counts.get(spec.fake_id, 0) + 1
    ranked = sorted(device_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    devices = {
        fake_id: {"count": count, "ordre": rank + 1}
        for rank, (fake_id, count) in enumerate(ranked)
    }

    nongeo_by_device: dict[str, list[datetime]] = {}
    for spec in specs:
        if not spec.effectively_geotagged and spec.parsed_datetime is not None:
            nongeo_by_device.setdefault(spec.fake_id, []).append(spec.parsed_datetime)

    buckets: dict[tuple[int, int], list[ImageSpec]] = {}
    for spec in specs:
        if spec.effectively_geotagged:
            key = (round(spec.lat * 10**6), round(spec.lng * 10**6))
            buckets.setdefault(key, []).append(spec)

    markers = []
    for spec in specs:
        if not spec.effectively_geotagged:
            continue
        key = (round(spec.lat * 10**6), round(spec.lng * 10**6))
        bucket = buckets[key]
        reference_path = min(b.relpath for b in bucket)
        markers.append(
            {
                "path": spec.relpath,
                "name": spec.name,
                "fake_id": spec.fake_id,
                "lat": key[0] / 10**6,
                "lng": key[1] / 10**6,
                "datetime": (
                    spec.parsed_datetime.strftime("%Y-%m-%d %H:%M:%S")
                    if spec.parsed_datetime
                    else None
                ),
                "slot_counts": _slot_counts_bruteforce(
                    spec.parsed_datetime, nongeo_by_device.get(spec.fake_id, [])
                ),
                "bucket_size": len(bucket),
                "is_reference": spec.relpath == reference_path,
            }
        )

    return {
        "root": "corpus",
        "files_scanned": len(specs) + len(text_files),
        "images_found": len(specs),
        "geotagged_count": sum(1 for s in specs if s.effectively_geotagged),
        "devices": devices,
        "markers": markers,
        "non_geotagged": [
            {
                "path": s.relpath,
                "fake_id": s.fake_id,
                "datetime": (
                    s.parsed_datetime.strftime("%Y-%m-%d %H:%M:%S")
                    if s.parsed_datetime
                    else None
                ),
            }
            for s in specs
            if not s.effectively_geotagged
        ],
    }


def write_corpus(specs: list[ImageSpec], text_files: list[str], out_dir: Path) -> dict:
    """Write corpus files and manifest under out_dir; returns the manifest.

    Layout: out_dir/corpus/ holds the evidence tree (the scan root);
    out_dir/manifest.json sits beside it so it never pollutes the scan.
    """
    corpus_root = out_dir / "corpus"
    corpus_root.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        target = corpus_root / spec.relpath
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(render_image(spec))
    for i, relpath in enumerate(text_files):
        target = corpus_root / relpath
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(f"evidence log placeholder {i}\n", "utf-8")
    manifest = build_manifest(specs, text_files)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2), "utf-8")
    return manifest


# --- built-in corpora ------------------------------------------------------

# Time-slot offsets (minutes) of the staged SONY non-geotagged shots,
# relative to the first SONY marker: 11 inside +/-1 h, 4 more inside
# +/-2 h, 10 more inside +/-3 h.
_SONY_OFFSETS_MIN = [
    -55, -40, -30, -20, -10, 5, 15, 25, 35, 45, 55,
    -110, -90, 70, 100,
    -170, -160, -150, 130, 140, 150, 160, 170, 175, 178,
]


def staged_specs() -> tuple[list[ImageSpec], list[str]]:
    """The staged demo corpus: one richly-instrumented device cluster plus
    smaller devices covering grouping, verification and corruption paths."""
    specs: list[ImageSpec] = []
    t0 = datetime(2013, 8, 11, 16, 3, 41)

    sony = dict(make="SONY", model="DSC-HX100V", directory="camera1")
    sony_markers = [
        ("DSC04487.JPG", 43.203640, 5.822985, "2013:08:11 16:03:41"),
        ("DSC04488.JPG", 43.203777, 5.823039, "2013:08:11 16:07:17"),
        ("DSC04489.JPG", 43.203777, 5.823008, "2013:08:11 16:08:12"),
        ("DSC04490.JPG", 43.203838, 5.823083, "2013:08:11 16:09:01"),
    ]
    for name, lat, lng, stamp in sony_markers:
        specs.append(ImageSpec(name=name, lat=lat, lng=lng, datetime=stamp, **sony))
    for i, offset in enumerate(_SONY_OFFSETS_MIN):
        stamp = (t0 + timedelta(minutes=offset)).strftime("%Y:%m:%d %H:%M:%S")
        name = "notes.txt" if i == len(_SONY_OFFSETS_MIN) - 1 else f"DSC{4500 + i:05d}.JPG"
        specs.append(ImageSpec(name=name, datetime=stamp, **sony))

    for i in range(6):
        specs.append(
            ImageSpec(
                name=f"IMG_{i + 1:04d}.JPG",
                directory="phone",
                make="Apple",
                model="iPhone 5",
                lat=48.858370,
                lng=2.294481,
                datetime=f"2013:08:12 10:{5 * i:02d}:00",
            )
        )

    htc = dict(make="HTC", model="One", directory="htc")
    specs.append(
        ImageSpec(
            name="HTC_mismatch.jpg", lat=43.30, lng=5.90,
            datetime="2013:08:13 10:00:00", gps_datetime="2013:08:14 11:00:00",
            **htc,
        )
    )
    specs.append(
        ImageSpec(
            name="HTC_wlan.jpg", lat=43.31, lng=5.91,
            datetime="2013:08:13 11:00:00", processing_method="WLAN", **htc,
        )
    )
    specs.append(
        ImageSpec(
            name="HTC_dop.jpg", lat=43.32, lng=5.92,
            datetime="2013:08:13 12:00:00", processing_method="GPS", dop=9.9,
            **htc,
        )
    )
    specs.append(
        ImageSpec(
            name="HTC_clean.jpg", lat=43.33, lng=5.93,
            datetime="2013:08:13 13:00:00", **htc,
        )
    )

    nikon = dict(make="NIKON", model="D300", directory="nikon")
    specs.append(
        ImageSpec(
            name="DSC_0001.JPG", lat=34.052235, lng=-118.243683,
            datetime="2013:08:14 09:00:00", **nikon,
        )
    )
    specs.append(
        ImageSpec(
            name="DSC_0002.JPG", lat=34.052240, lng=-118.243700,
            datetime="2013:08:14 09:05:00", **nikon,
        )
    )
    specs.append(ImageSpec(name="DSC_0003.JPG", datetime="2013:08:14 09:30:00", **nikon))

    specs.append(
        ImageSpec(
            name="corrupt.jpg", directory="misc",
            make="CASIO COMPUTER CO.,LTD", model="EX-Z750",
            lat=43.40, lng=5.95, datetime="2013:08:11 18:00:00",
            corrupt_pixels=True,
        )
    )
    specs.append(
        ImageSpec(
            name="truncated.jpg", directory="misc",
            make="FUJ", model="XT1", truncate_exif=True,
        )
    )
    specs.append(
        ImageSpec(
            name="badgps.jpg", directory="misc",
            make="Garmin", model="Virb",
            lat=43.12, lng=5.84, datetime="2013:08:11 14:00:00",
            zero_denominator_gps=True,
        )
    )
    specs.append(
        ImageSpec(
            name="notime.jpg", directory="misc",
            make="Panasonic", model="DMC-TZ5",
            lat=35.658581, lng=139.745438,
        )
    )
    specs.append(ImageSpec(name="unknown.jpg", directory="misc", no_exif=True))

    text_files = ["readme.txt", "notes/evidence_log.txt"]
    return specs, text_files


_DEVICE_POOL = [
    ("SONY", "DSC-HX100V", None),
    ("Apple", "iPhone 5", None),
    ("NIKON", "D300", None),
    ("Canon", "EOS 5D", "527001"),
    ("HTC", "One", None),
    ("Samsung", "GT-I9300", None),
    ("FUJIFILM", "X-T1", None),
    ("Panasonic", "DMC-TZ5", None),
]


def random_specs(
    count: int = 500,
    geotagged_fraction: float = 0.4,
    devices: int = 6,
    missing_datetime_fraction: float = 0.04,
    start: str = "2013-08-10 00:00:00",
    span_hours: float = 72.0,
    region: tuple[float, float, float, float] = (42.5, 5.0, 44.0, 6.5),
    same_coord_groups: tuple[int, ...] = (3, 2),
    text_files: int = 5,
    seed: int = 20130811,
) -> tuple[list[ImageSpec], list[str]]:
    """Randomized corpus with exact geotag counts and a handful of
    shared-coordinate groups; everything is reproducible from the seed."""
    rng = random.Random(seed)
    pool = _DEVICE_POOL[: max(1, min(devices, len(_DEVICE_POOL)))]
    t_start = datetime.strptime(start, "%Y-%m-%d %H:%M:%S")
    geo_count = round(count * geotagged_fraction)
    geo_indexes = set(rng.sample(range(count), geo_count))
    missing_dt = set(rng.sample(range(count), round(count * missing_datetime_fraction)))
    dirs = ("cardA", "cardB", "phone", "sd0")

    specs: list[ImageSpec] = []
    for i in range(count):
        make, model, serial = pool[rng.randrange(len(pool))]
        spec = ImageSpec(
            name=f"IMG_{i:05d}{rng.choice(['.jpg', '.JPG', '.jpeg'])}",
            directory=rng.choice(dirs),
            make=make,
            model=model,
            serial=serial,
            color=(rng.randrange(256), rng.randrange(256), rng.randrange(256)),
        )
        if i not in missing_dt:
            offset = timedelta(seconds=rng.uniform(0, span_hours * 3600))
            spec.datetime = (t_start + offset).strftime("%Y:%m:%d %H:%M:%S")
        if i in geo_indexes:
            spec.lat = round(rng.uniform(region[0], region[2]), 6)
            spec.lng = round(rng.uniform(region[1], region[3]), 6)
        specs.append(spec)

    # Force a few groups to share one rounded coordinate.
    geo_specs = [s for s in specs if s.lat is not None]
    cursor = 0
    for group_size in same_coord_groups:
        members = geo_specs[cursor : cursor + group_size]
        cursor += group_size
        if len(members) < 2:
            break
        for m in members[1:]:
            m.lat, m.lng = members[0].lat, members[0].lng

    names = [f"logs/log_{i:02d}.txt" for i in range(text_files)]
    return specs, names


def specs_from_json(payload: dict) -> tuple[list[ImageSpec], list[str]]:
    """Materialize a corpus recipe from a JSON document."""
    if "random" in payload:
        params = dict(payload["random"])
        if "seed" in payload:
            params.setdefault("seed", payload["seed"])
        if "same_coord_groups" in params:
            params["same_coord_groups"] = tuple(params["same_coord_groups"])
        if "region" in params:
            params["region"] = tuple(params["region"])
        return random_specs(**params)
    specs = []
    for entry in payload.get("images", []):
        entry = dict(entry)
        if "color" in entry:
            entry["color"] = tuple(entry["color"])
        specs.append(ImageSpec(**entry))
    return specs, list(payload.get("text_files", []))


BUILTIN_CORPORA = {
    "demo": staged_specs,
    "large": random_specs,
}


def generate(out_dir: Path, spec_source: str = "demo") -> dict:
    """Entry point behind the gen-fixtures CLI."""
    if spec_source in BUILTIN_CORPORA:
        specs, texts = BUILTIN_CORPORA[spec_source]()
    else:
        payload = json.loads(Path(spec_source).read_text("utf-8"))
        specs, texts = specs_from_json(payload)
    return write_corpus(specs, texts, out_dir)
