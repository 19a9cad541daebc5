"""geoexif: forensic photo-geolocation workbench."""

__version__ = "0.1.0"

from .device import UNKNOWN_DEVICE, DeviceFingerprint, build_fingerprint
from .exif import (
    ExifRecord,
    ImageKind,
    MalformedRationalError,
    RationalU,
    detect_image_kind,
    parse_exif,
    rational_to_decimal,
)
from .geo import (
    DmsCoordinate,
    GeoPoint,
    ZoneFilter,
    dms_to_decimal,
    great_circle_distance_km,
    within_zone,
)
from .indexer import AnalysisRun, ScanConfig, scan_tree
from .store import AnalysisStore, FilterSpec

__all__ = [
    "AnalysisRun",
    "AnalysisStore",
    "DeviceFingerprint",
    "DmsCoordinate",
    "ExifRecord",
    "FilterSpec",
    "GeoPoint",
    "ImageKind",
    "MalformedRationalError",
    "RationalU",
    "ScanConfig",
    "UNKNOWN_DEVICE",
    "ZoneFilter",
    "build_fingerprint",
    "detect_image_kind",
    "dms_to_decimal",
    "great_circle_distance_km",
    "parse_exif",
    "rational_to_decimal",
    "scan_tree",
    "within_zone",
]
