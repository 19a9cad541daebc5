"""Shared fixtures: generated corpora and scanned workspaces."""

from __future__ import annotations

from pathlib import Path

import pytest

from geoexif.corpus import staged_specs, write_corpus
from geoexif.indexer import ScanConfig, scan_tree
from geoexif.store import AnalysisStore


class ScannedCorpus:
    """One generated corpus scanned into a workspace."""

    def __init__(self, base: Path, manifest: dict, run):
        self.base = base
        self.root = base / "fixtures" / "corpus"
        self.workspace = base / "workspace"
        self.manifest = manifest
        self.run = run
        self.store = AnalysisStore(self.workspace)

    def marker_by_name(self, name: str):
        for marker in self.store.query_markers():
            if marker.name == name:
                return marker
        raise AssertionError(f"no reference marker named {name}")


def _scan_into(base: Path, specs, texts) -> ScannedCorpus:
    manifest = write_corpus(specs, texts, base / "fixtures")
    run = scan_tree(
        ScanConfig(root=base / "fixtures" / "corpus", workspace=base / "workspace")
    )
    return ScannedCorpus(base, manifest, run)


@pytest.fixture(scope="session")
def demo_scan(tmp_path_factory) -> ScannedCorpus:
    base = tmp_path_factory.mktemp("demo")
    specs, texts = staged_specs()
    return _scan_into(base, specs, texts)


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[{status}] {name}")
