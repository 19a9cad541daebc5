"""Image-type detection and EXIF parser tests.

Fixtures are assembled with the corpus builder; the GPS directory test
mirrors a real big-endian hex dump (5 entries, rational triplets) down
to the byte level.
"""

from __future__ import annotations

import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoexif.corpus import (
    ImageSpec,
    base_jpeg,
    build_exif_app1,
    build_tiff,
    insert_app1,
    render_image,
)
from geoexif.exif import (
    IFD0,
    IFD_EXIF,
    IFD_GPS,
    ImageKind,
    MalformedRationalError,
    RationalU,
    decode_processing_method,
    detect_image_kind,
    extract_gps,
    parse_exif,
    rational_to_decimal,
)


class TestDetectImageKind:
    def test_jpeg_signature(self):
        assert detect_image_kind(b"\xff\xd8\xff\xe1rest") == ImageKind.JPEG

    def test_empty(self):
        assert detect_image_kind(b"") == ImageKind.NOT_IMAGE

    def test_short_input(self):
        assert detect_image_kind(b"\xff\xd8") == ImageKind.NOT_IMAGE

    def test_tiff_both_orders(self):
        assert detect_image_kind(b"II*\x00rest") == ImageKind.TIFF
        assert detect_image_kind(b"MM\x00*rest") == ImageKind.TIFF

    def test_png_is_other(self):
        assert detect_image_kind(b"\x89PNG\r\n\x1a\n....") == ImageKind.OTHER_IMAGE

    def test_text(self):
        assert detect_image_kind(b"hello world") == ImageKind.NOT_IMAGE

    def test_renamed_jpeg_detected_by_bytes(self, tmp_path):
        target = tmp_path / "notes.txt"
        target.write_bytes(base_jpeg())
        assert detect_image_kind(target.read_bytes()) == ImageKind.JPEG

    @given(st.binary(min_size=0, max_size=64))
    @settings(max_examples=300)
    def test_pure_function_of_first_8_bytes(self, data):
        assert detect_image_kind(data) == detect_image_kind(data[:8] + b"\xaa" * 32)


class TestRationalToDecimal:
    def test_paper_latitude_seconds(self):
        assert rational_to_decimal(RationalU(5683, 100)) == pytest.approx(56.83)

    def test_paper_longitude_seconds(self):
        assert rational_to_decimal(RationalU(2679, 100)) == pytest.approx(26.79)

    def test_zero_numerator(self):
        assert rational_to_decimal(RationalU(0, 1)) == 0.0

    def test_zero_denominator_rejected(self):
        with pytest.raises(MalformedRationalError):
            rational_to_decimal(RationalU(1, 0))


def gps_directory_tiff() -> bytes:
    """Big-endian TIFF whose GPS directory matches the reference dump:
    version 2 2 0 0, latitude 57 38 56.83 N, longitude 10 24 26.79 W."""
    return build_tiff(
        {
            "GPSVersionID": (2, 2, 0, 0),
            "GPSLatitudeRef": "N",
            "GPSLatitude": (
                RationalU(57, 1),
                RationalU(38, 1),
                RationalU(5683, 100),
            ),
            "GPSLongitudeRef": "W",
            "GPSLongitude": (
                RationalU(10, 1),
                RationalU(24, 1),
                RationalU(2679, 100),
            ),
        },
        byte_order="MM",
    )


class TestParseExif:
    def test_gps_directory_values(self):
        data = insert_app1(base_jpeg(), build_exif_app1(gps_directory_tiff()))
        record = parse_exif(data)
        assert record is not None
        gps = extract_gps(record)
        assert gps.latitude_ref == "N"
        assert gps.latitude == (
            RationalU(57, 1),
            RationalU(38, 1),
            RationalU(5683, 100),
        )
        assert gps.longitude_ref == "W"
        assert gps.longitude == (
            RationalU(10, 1),
            RationalU(24, 1),
            RationalU(2679, 100),
        )

    def test_gps_rational_bytes_match_reference_dump(self):
        # 57/1 38/1 5683/100 big-endian, exactly as dumped in the wild.
        blob = gps_directory_tiff()
        expected = bytes.fromhex(
            "0000003900000001000000260000000100001633000"
            "00064"
        )
        assert expected in blob

    def test_no_app1_returns_absent(self):
        assert parse_exif(base_jpeg()) is None

    def test_not_an_image_returns_absent(self):
        assert parse_exif(b"just text") is None

    def test_declared_entries_truncated(self):
        # 10 declared IFD0 entries, bytes cut after 3; the survivors all
        # carry inline values.
        raw = [
            (IFD0, 0x0112, 3, 1),
            (IFD0, 0x011A, 3, 72),
            (IFD0, 0x011B, 3, 72),
            (IFD0, 0x0128, 3, 2),
            (IFD0, 0x0131, 3, 7),
            (IFD0, 0x0213, 3, 1),
            (IFD0, 0x0214, 3, (0, 0)),
        ]
        tiff = build_tiff(
            {"Make": "AAA", "Model": "BBB", "DateTime": "2013:08:11 16:03:41"},
            raw_tags=raw,
            truncate_to_entries=3,
        )
        assert struct.unpack_from(">H", tiff, 8)[0] == 10
        data = insert_app1(base_jpeg(), build_exif_app1(tiff))
        record = parse_exif(data)
        assert record is not None
        assert len(record.entries) == 3
        assert any("fit" in w for w in record.warnings)

    def test_little_endian_supported(self):
        tiff = build_tiff({"Make": "SONY", "Model": "DSC-HX100V"}, byte_order="II")
        record = parse_exif(insert_app1(base_jpeg(), build_exif_app1(tiff)))
        assert record.named("Make") == "SONY"
        assert record.byte_order.name == "LITTLE_ENDIAN"

    def test_gps_tags_only_under_gps_ifd(self):
        data = render_image(
            ImageSpec(name="x.jpg", make="SONY", model="A", lat=1.0, lng=2.0)
        )
        record = parse_exif(data)
        for (ifd, tag_id), entry in record.entries.items():
            if entry.name and entry.name.startswith("GPS"):
                assert ifd == IFD_GPS

    def test_determinism(self):
        data = render_image(
            ImageSpec(
                name="x.jpg", make="SONY", model="A", lat=1.5, lng=2.5,
                datetime="2013:08:11 16:03:41",
            )
        )
        first = parse_exif(data)
        second = parse_exif(data)
        assert first.entries == second.entries
        assert first.warnings == second.warnings

    def test_truncation_fuzz_never_raises(self):
        data = render_image(
            ImageSpec(
                name="x.jpg", make="SONY", model="DSC-HX100V",
                serial="S123", owner="owner", lat=43.2, lng=5.8,
                datetime="2013:08:11 16:03:41",
                gps_datetime="2013:08:11 14:03:41",
                processing_method="GPS", dop=2.5, altitude_m=120.0,
            )
        )
        for cut in range(len(data)):
            parse_exif(data[:cut])  # must not raise

    @given(st.binary(min_size=0, max_size=300))
    @settings(max_examples=300)
    def test_random_bytes_after_soi_never_raise(self, junk):
        parse_exif(b"\xff\xd8\xff" + junk)
        parse_exif(b"II*\x00" + junk)
        parse_exif(b"MM\x00*" + junk)


class TestProcessingMethodDecoding:
    def test_ascii_prefix(self):
        assert decode_processing_method(b"ASCII\x00\x00\x00WLAN") == "WLAN"

    def test_bare_bytes(self):
        assert decode_processing_method(b"GPS\x00") == "GPS"


ascii_strings = st.text(
    alphabet=st.characters(min_codepoint=32, max_codepoint=126), min_size=1, max_size=24
)
rationals = st.builds(
    RationalU,
    st.integers(min_value=0, max_value=2**31),
    st.integers(min_value=1, max_value=10**6),
)


@given(
    make=ascii_strings,
    model=ascii_strings,
    stamp=ascii_strings,
    lat=st.tuples(rationals, rationals, rationals),
    serial=ascii_strings,
)
@settings(max_examples=100, deadline=None)
def test_roundtrip_recovers_written_tags(make, model, stamp, lat, serial):
    """Whatever tag set the builder writes, the parser reads back."""
    tags = {
        "Make": make,
        "Model": model,
        "DateTime": stamp,
        "SerialNumber": serial,
        "GPSLatitudeRef": "N",
        "GPSLatitude": lat,
    }
    data = insert_app1(base_jpeg(), build_exif_app1(build_tiff(tags)))
    record = parse_exif(data)
    assert record is not None
    assert record.warnings == []
    assert record.named("Make") == make
    assert record.named("Model") == model
    assert record.named("DateTime") == stamp
    assert record.named("SerialNumber") == serial
    assert record.named("GPSLatitude") == lat
    assert record.named("GPSLatitudeRef") == "N"
