"""Content-based image-type detection and EXIF/TIFF metadata parsing.

Everything here operates on raw byte sequences: detection never trusts
file names, and the parser never reads outside the buffer it was given.
Malformed structures degrade to warnings so that one corrupt file cannot
abort an evidence sweep.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from typing import NamedTuple, Optional


class ImageKind(enum.Enum):
    JPEG = "jpeg"
    TIFF = "tiff"
    OTHER_IMAGE = "other-image"
    NOT_IMAGE = "not-image"


class ByteOrder(enum.Enum):
    BIG_ENDIAN = ">"
    LITTLE_ENDIAN = "<"


class RationalU(NamedTuple):
    """EXIF rational: numerator/denominator pair, kept unreduced."""

    numerator: int
    denominator: int


class MalformedRationalError(ValueError):
    """Zero-denominator rational; the tag should be treated as absent."""


def rational_to_decimal(r: RationalU) -> float:
    """Exact quotient of a rational tag value."""
    if r.denominator == 0:
        raise MalformedRationalError(f"zero denominator in rational {r!r}")
    return r.numerator / r.denominator


# Segment-level signatures. JPEG is the paper's target; TIFF carries EXIF
# natively. A few other formats are recognized only to label them.
_PNG_SIG = b"\x89PNG\r\n\x1a\n"


def detect_image_kind(data: bytes) -> ImageKind:
    """Classify a byte sequence by its leading signature (first 8 bytes).

    File names and extensions play no role here.
    """
    head = bytes(data[:8])
    if len(head) >= 3 and head[0] == 0xFF and head[1] == 0xD8 and head[2] == 0xFF:
        return ImageKind.JPEG
    if len(head) >= 4 and head[:4] in (b"II*\x00", b"MM\x00*"):
        return ImageKind.TIFF
    if head == _PNG_SIG:
        return ImageKind.OTHER_IMAGE
    if head[:6] in (b"GIF87a", b"GIF89a") or head[:2] == b"BM":
        return ImageKind.OTHER_IMAGE
    return ImageKind.NOT_IMAGE


# IFD names used as the first half of tag keys.
IFD0 = "IFD0"
IFD_EXIF = "Exif"
IFD_GPS = "GPS"

# Pointer tags inside IFD0.
_TAG_EXIF_IFD = 0x8769
_TAG_GPS_IFD = 0x8825

# Known tag-id -> name maps, per IFD. Everything else is retained opaque.
TAG_NAMES: dict[str, dict[int, str]] = {
    IFD0: {
        0x010F: "Make",
        0x0110: "Model",
        0x0132: "DateTime",
    },
    IFD_EXIF: {
        0x9003: "DateTimeOriginal",
        0x9004: "CreateDate",
        0x927C: "MakerNote",
        0xA430: "OwnerName",
        0xA431: "SerialNumber",
        0xA432: "LensInfo",
        0xA433: "LensMake",
        0xA434: "LensModel",
        0xA435: "LensSerialNumber",
    },
    IFD_GPS: {
        0x0000: "GPSVersionID",
        0x0001: "GPSLatitudeRef",
        0x0002: "GPSLatitude",
        0x0003: "GPSLongitudeRef",
        0x0004: "GPSLongitude",
        0x0005: "GPSAltitudeRef",
        0x0006: "GPSAltitude",
        0x0007: "GPSTimeStamp",
        0x000B: "GPSDOP",
        0x001B: "GPSProcessingMethod",
        0x001D: "GPSDateStamp",
    },
}

# TIFF field types: id -> (struct letter or None, element size).
_TYPE_BYTE = 1
_TYPE_ASCII = 2
_TYPE_SHORT = 3
_TYPE_LONG = 4
_TYPE_RATIONAL = 5
_TYPE_SBYTE = 6
_TYPE_UNDEFINED = 7
_TYPE_SSHORT = 8
_TYPE_SLONG = 9
_TYPE_SRATIONAL = 10
_TYPE_FLOAT = 11
_TYPE_DOUBLE = 12

_TYPE_SIZES = {
    _TYPE_BYTE: 1,
    _TYPE_ASCII: 1,
    _TYPE_SHORT: 2,
    _TYPE_LONG: 4,
    _TYPE_RATIONAL: 8,
    _TYPE_SBYTE: 1,
    _TYPE_UNDEFINED: 1,
    _TYPE_SSHORT: 2,
    _TYPE_SLONG: 4,
    _TYPE_SRATIONAL: 8,
    _TYPE_FLOAT: 4,
    _TYPE_DOUBLE: 8,
}

_SCALAR_CODES = {
    _TYPE_BYTE: "B",
    _TYPE_SHORT: "H",
    _TYPE_LONG: "I",
    _TYPE_SBYTE: "b",
    _TYPE_SSHORT: "h",
    _TYPE_SLONG: "i",
    _TYPE_FLOAT: "f",
    _TYPE_DOUBLE: "d",
}


@dataclass(frozen=True)
class TagEntry:
    """One parsed IFD entry; raw precision preserved (rationals unreduced)."""

    ifd: str
    tag_id: int
    name: Optional[str]
    type_id: int
    value: object


@dataclass
class GpsIfd:
    """Decoded view of the GPS sub-IFD. Fields absent in the file are None."""

    latitude_ref: Optional[str] = None
    latitude: Optional[tuple[RationalU, ...]] = None
    longitude_ref: Optional[str] = None
    longitude: Optional[tuple[RationalU, ...]] = None
    altitude: Optional[RationalU] = None
    altitude_below_sea: bool = False
    processing_method: Optional[str] = None
    dop: Optional[float] = None
    date_stamp: Optional[str] = None
    time_stamp: Optional[tuple[RationalU, ...]] = None
    version_id: Optional[tuple[int, ...]] = None


@dataclass
class ExifRecord:
    """Parsed tag map from one image file.

    Keys are (ifd, tag_id); GPS tags only ever appear under the GPS IFD.
    """

    byte_order: ByteOrder
    entries: dict[tuple[str, int], TagEntry] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def has_gps(self) -> bool:
        return any(key[0] == IFD_GPS for key in self.entries)

    def get(self, ifd: str, tag_id: int) -> object:
        entry = self.entries.get((ifd, tag_id))
        return entry.value if entry is not None else None

    def named(self, name: str) -> object:
        """Look a tag up by its well-known name, whatever IFD it lives in."""
        for ifd, names in TAG_NAMES.items():
            for tag_id, tag_name in names.items():
                if tag_name == name:
                    value = self.get(ifd, tag_id)
                    if value is not None:
                        return value
        return None


def _decode_ascii(raw: bytes) -> str:
    # Payload runs to the first NUL; encoding is nominally ASCII but real
    # files carry anything, so decode permissively.
    nul = raw.find(b"\x00")
    if nul != -1:
        raw = raw[:nul]
    return raw.decode("utf-8", errors="replace")


def decode_processing_method(value: object) -> Optional[str]:
    """GPSProcessingMethod is UNDEFINED with an 8-byte charset prefix."""
    if isinstance(value, str):
        return value
    if not isinstance(value, (bytes, bytearray)):
        return None
    raw = bytes(value)
    for prefix in (b"ASCII\x00\x00\x00", b"UNICODE\x00", b"JIS\x00\x00\x00\x00\x00"):
        if raw.startswith(prefix):
            raw = raw[len(prefix) :]
            break
    return _decode_ascii(raw)


class _TiffReader:
    """Bounds-checked cursor over one TIFF blob."""

    def __init__(self, data: bytes, order: ByteOrder, warnings: list[str]):
        self.data = data
        self.order = order
        self.warnings = warnings

    def u16(self, offset: int) -> Optional[int]:
        if offset < 0 or offset + 2 > len(self.data):
            return None
        return struct.unpack_from(self.order.value + "H", self.data, offset)[0]

    def u32(self, offset: int) -> Optional[int]:
        if offset < 0 or offset + 4 > len(self.data):
            return None
        return struct.unpack_from(self.order.value + "I", self.data, offset)[0]

    def raw(self, offset: int, size: int) -> Optional[bytes]:
        if offset < 0 or size < 0 or offset + size > len(self.data):
            return None
        return self.data[offset : offset + size]

    def decode_value(self, type_id: int, count: int, raw: bytes) -> object:
        if type_id == _TYPE_ASCII:
            return _decode_ascii(raw)
        if type_id in (_TYPE_UNDEFINED,):
            return raw
        if type_id in (_TYPE_RATIONAL, _TYPE_SRATIONAL):
            code = "I" if type_id == _TYPE_RATIONAL else "i"
            pairs = struct.unpack(self.order.value + code * (2 * count), raw)
            values = tuple(
                RationalU(pairs[2 * i], pairs[2 * i + 1]) for i in range(count)
            )
            return values[0] if count == 1 else values
        code = _SCALAR_CODES.get(type_id)
        if code is None:
            return raw
        values = struct.unpack(self.order.value + code * count, raw)
        return values[0] if count == 1 else values

    def parse_ifd(self, ifd_name: str, offset: int) -> dict[int, TagEntry]:
        entries: dict[int, TagEntry] = {}
        count = self.u16(offset)
        if count is None:
            self.warnings.append(f"{ifd_name}: entry count unreadable at {offset}")
            return entries
        available = max(0, (len(self.data) - (offset + 2)) // 12)
        if count > available:
            self.warnings.append(
                f"{ifd_name}: declares {count} entries, only {available} fit"
            )
            count = available
        for i in range(count):
            base = offset + 2 + 12 * i
            tag_id = self.u16(base)
            type_id = self.u16(base + 2)
            value_count = self.u32(base + 4)
            if tag_id is None or type_id is None or value_count is None:
                self.warnings.append(f"{ifd_name}: truncated entry {i}")
                break
            elem_size = _TYPE_SIZES.get(type_id)
            if elem_size is None:
                raw = self.raw(base + 8, 4)
                self.warnings.append(
                    f"{ifd_name}: tag 0x{tag_id:04X} has unknown type {type_id}"
                )
                entries[tag_id] = TagEntry(ifd_name, tag_id, None, type_id, raw)
                continue
            size = elem_size * value_count
            if size <= 4:
                raw = self.raw(base + 8, size)
            else:
                value_offset = self.u32(base + 8)
                raw = None if value_offset is None else self.raw(value_offset, size)
            if raw is None:
                self.warnings.append(
                    f"{ifd_name}: tag 0x{tag_id:04X} value out of bounds"
                )
                continue
            try:
                value = self.decode_value(type_id, value_count, raw)
            except struct.error:
                self.warnings.append(
                    f"{ifd_name}: tag 0x{tag_id:04X} value undecodable"
                )
                continue
            name = TAG_NAMES.get(ifd_name, {}).get(tag_id)
            entries[tag_id] = TagEntry(ifd_name, tag_id, name, type_id, value)
        return entries


def _parse_tiff(data: bytes) -> Optional[ExifRecord]:
    if len(data) < 8:
        return None
    if data[:2] == b"II":
        order = ByteOrder.LITTLE_ENDIAN
    elif data[:2] == b"MM":
        order = ByteOrder.BIG_ENDIAN
    else:
        return None
    warnings: list[str] = []
    reader = _TiffReader(data, order, warnings)
    if reader.u16(2) != 42:
        return None
    ifd0_offset = reader.u32(4)
    if ifd0_offset is None:
        return None
    record = ExifRecord(byte_order=order, warnings=warnings)

    ifd0 = reader.parse_ifd(IFD0, ifd0_offset)
    sub_pointers: list[tuple[str, int]] = []
    for tag_id, entry in ifd0.items():
        if tag_id == _TAG_EXIF_IFD and isinstance(entry.value, int):
            sub_pointers.append((IFD_EXIF, entry.value))
        elif tag_id == _TAG_GPS_IFD and isinstance(entry.value, int):
            sub_pointers.append((IFD_GPS, entry.value))
        else:
            record.entries[(IFD0, tag_id)] = entry

    seen_offsets = {ifd0_offset}
    for ifd_name, offset in sub_pointers:
        if offset in seen_offsets:
            warnings.append(f"{ifd_name}: IFD offset cycle at {offset}")
            continue
        seen_offsets.add(offset)
        for tag_id, entry in reader.parse_ifd(ifd_name, offset).items():
            record.entries[(ifd_name, tag_id)] = entry
    return record


def _find_jpeg_exif(data: bytes) -> tuple[Optional[bytes], list[str]]:
    """Walk JPEG segments until SOS/EOI looking for the Exif APP1 payload."""
    warnings: list[str] = []
    pos = 2
    n = len(data)
    while pos + 1 < n:
        if data[pos] != 0xFF:
            warnings.append(f"segment desync at offset {pos}")
            return None, warnings
        marker = data[pos + 1]
        if marker == 0xFF:  # fill byte
            pos += 1
            continue
        if marker in (0x01, 0xD8) or 0xD0 <= marker <= 0xD7:
            pos += 2
            continue
        if marker in (0xD9, 0xDA):  # EOI / SOS: no EXIF past this point
            return None, warnings
        if pos + 4 > n:
            warnings.append("truncated segment header")
            return None, warnings
        length = struct.unpack_from(">H", data, pos + 2)[0]
        if length < 2:
            warnings.append(f"bad segment length at offset {pos}")
            return None, warnings
        end = pos + 2 + length
        payload = data[pos + 4 : min(end, n)]
        if marker == 0xE1 and payload[:6] == b"Exif\x00\x00":
            if end > n:
                warnings.append("APP1 segment truncated")
            return payload[6:], warnings
        pos = end
    return None, warnings


def parse_exif(data: bytes) -> Optional[ExifRecord]:
    """Parse EXIF tags out of JPEG or TIFF bytes.

    Returns None when the bytes are not a JPEG/TIFF or carry no EXIF
    segment. Malformed tag entries are skipped and recorded as warnings;
    this function never raises on hostile input.
    """
    kind = detect_image_kind(data)
    if kind == ImageKind.JPEG:
        tiff, warnings = _find_jpeg_exif(data)
        if tiff is None:
            return None
        record = _parse_tiff(tiff)
        if record is None:
            return None
        record.warnings = warnings + record.warnings
        return record
    if kind == ImageKind.TIFF:
        return _parse_tiff(bytes(data))
    return None


def extract_gps(record: ExifRecord) -> Optional[GpsIfd]:
    """Build the typed GPS view from a record; None when no GPS IFD exists."""
    if not record.has_gps:
        return None
    gps = GpsIfd()
    value = record.get(IFD_GPS, 0x0000)
    if isinstance(value, tuple):
        gps.version_id = value
    elif isinstance(value, int):
        gps.version_id = (value,)
    ref = record.get(IFD_GPS, 0x0001)
    if isinstance(ref, str) and ref:
        gps.latitude_ref = ref[0]
    lat = record.get(IFD_GPS, 0x0002)
    if isinstance(lat, tuple) and all(isinstance(v, RationalU) for v in lat):
        gps.latitude = lat
    elif isinstance(lat, RationalU):
        gps.latitude = (lat,)
    ref = record.get(IFD_GPS, 0x0003)
    if isinstance(ref, str) and ref:
        gps.longitude_ref = ref[0]
    lng = record.get(IFD_GPS, 0x0004)
    if isinstance(lng, tuple) and all(isinstance(v, RationalU) for v in lng):
        gps.longitude = lng
    elif isinstance(lng, RationalU):
        gps.longitude = (lng,)
    alt_ref = record.get(IFD_GPS, 0x0005)
    gps.altitude_below_sea = alt_ref in (1, (1,), b"\x01")
    alt = record.get(IFD_GPS, 0x0006)
    if isinstance(alt, RationalU):
        gps.altitude = alt
    ts = record.get(IFD_GPS, 0x0007)
    if isinstance(ts, tuple) and all(isinstance(v, RationalU) for v in ts):
        gps.time_stamp = ts
    dop = record.get(IFD_GPS, 0x000B)
    if isinstance(dop, RationalU):
        try:
            gps.dop = rational_to_decimal(dop)
        except MalformedRationalError:
            record.warnings.append("GPSDOP has zero denominator; ignored")
    method = record.get(IFD_GPS, 0x001B)
    gps.processing_method = decode_processing_method(method)
    stamp = record.get(IFD_GPS, 0x001D)
    if isinstance(stamp, str):
        gps.date_stamp = stamp
    return gps
