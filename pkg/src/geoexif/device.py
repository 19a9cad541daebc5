"""Best-effort device fingerprinting from EXIF identity tags.

Make and model rarely identify a physical device on their own, so every
extra identity tag the file carries (serial numbers, owner, lens data) is
folded into one deterministic "fake id" string.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exif import ExifRecord, RationalU

UNKNOWN_DEVICE = "UNKNOWN-DEVICE"

# Fixed append order; determinism matters more than any particular order.
OPTIONAL_INFO_TAGS = (
    "SerialNumber",
    "OwnerName",
    "LensInfo",
    "LensMake",
    "LensModel",
    "LensSerialNumber",
)


@dataclass(frozen=True)
class DeviceFingerprint:
    make: str
    model: str
    optional_infos: str
    fake_id: str


def _stringify(value: object) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, RationalU):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, tuple):
        return " ".join(_stringify(v) for v in value)
    if isinstance(value, (bytes, bytearray)):
        return bytes(value).decode("utf-8", errors="replace")
    return str(value)


def build_fingerprint(exif: Optional[ExifRecord]) -> DeviceFingerprint:
    """Collapse identity tags into a fake id.

    make and model are whitespace-trimmed; the optional tags are appended
    in fixed order, each prefixed with " | ". An image with no usable
    identity tags gets the reserved UNKNOWN-DEVICE id so it still shows
    up under device filters.
    """
    make = ""
    model = ""
    extras = ""
    if exif is not None:
        raw_make = exif.named("Make")
        raw_model = exif.named("Model")
        make = _stringify(raw_make).strip() if raw_make is not None else ""
        model = _stringify(raw_model).strip() if raw_model is not None else ""
        for tag_name in OPTIONAL_INFO_TAGS:
            value = exif.named(tag_name)
            if value is not None:
                extras += " | " + _stringify(value)
    fake_id = make + model + extras
    if not fake_id:
        fake_id = UNKNOWN_DEVICE
    return DeviceFingerprint(
        make=make, model=model, optional_infos=extras, fake_id=fake_id
    )
