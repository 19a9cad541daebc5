"""Pluggable reverse-geocoding and elevation clients with offline stubs.

Forensic workstations are often air-gapped, so the offline stub is the
default everywhere: it answers from a plain-text table and performs zero
network operations. HTTP providers are opt-in adapters with client-side
rate limiting and a persistent per-workspace cache.
"""

from __future__ import annotations

import enum
import json
import logging
import threading
import time
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .geo import GeoPoint

logger = logging.getLogger(__name__)

# Process-wide count of outbound HTTP requests; the offline acceptance
# posture asserts this stays at zero for the whole suite.
NETWORK_CALLS = 0
_network_lock = threading.Lock()


def _count_network_call() -> None:
    global NETWORK_CALLS
    with _network_lock:
        NETWORK_CALLS += 1


def network_call_count() -> int:
    return NETWORK_CALLS


class ProviderKind(enum.Enum):
    OFFLINE_STUB = "offline-stub"
    HTTP_PROVIDER = "http"


@dataclass
class GeoProviderConfig:
    provider: ProviderKind = ProviderKind.OFFLINE_STUB
    endpoint: Optional[str] = None  # template with {lat} and {lng}
    rate_limit_per_s: float = 1.0
    cache_path: Optional[Path] = None
    stub_table_path: Optional[Path] = None
    # dotted path into the provider's JSON response, e.g. "display_name"
    # or "results.0.elevation"
    response_field: str = ""
    timeout_s: float = 10.0

    def __post_init__(self) -> None:
        if self.provider is ProviderKind.HTTP_PROVIDER and not self.endpoint:
            raise ValueError("HTTP provider requires an endpoint")


def _cache_key(p: GeoPoint) -> str:
    # ~11 m cache granularity; trades hits against address precision.
    return f"{p.latitude:.4f},{p.longitude:.4f}"


def load_stub_table(path: Path) -> dict[str, Union[str, float]]:
    """Read a stub table: one "lat lng<TAB>value" line per entry."""
    table: dict[str, Union[str, float]] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        coords, _, value = line.partition("\t")
        parts = coords.split()
        if len(parts) != 2 or not value:
            continue
        try:
            point = GeoPoint(float(parts[0]), float(parts[1]))
        except ValueError:
            continue
        table[_cache_key(point)] = value
    return table


def _extract_field(payload: object, dotted: str) -> object:
    value = payload
    for part in dotted.split("."):
        if isinstance(value, dict):
            value = value.get(part)
        elif isinstance(value, list):
            try:
                value = value[int(part)]
            except (ValueError, IndexError):
                return None
        else:
            return None
    return value


class _RateLimiter:
    def __init__(self, per_second: float):
        self.interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self) -> None:
        if self.interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_at - now
            self._next_at = max(now, self._next_at) + self.interval
        if delay > 0:
            time.sleep(delay)


@dataclass
class _Counters:
    lookups: int = 0
    cache_hits: int = 0
    provider_calls: int = 0
    network_calls: int = 0


class GeoLookupClient:
    """One lookup service (reverse geocoding or elevation) with caching.

    The cache persists inside the workspace and survives process
    restarts; definitive provider answers (including "no result") are
    cached, transient network failures are not.
    """

    def __init__(self, config: GeoProviderConfig, numeric: bool = False):
        self.config = config
        self.numeric = numeric
        self.counters = _Counters()
        self._lock = threading.Lock()
        self._limiter = _RateLimiter(config.rate_limit_per_s)
        self._stub: dict[str, Union[str, float]] = {}
        if config.stub_table_path is not None and config.stub_table_path.exists():
            self._stub = load_stub_table(config.stub_table_path)
        self._cache: dict[str, object] = {}
        if config.cache_path is not None and config.cache_path.exists():
            try:
                self._cache = json.loads(config.cache_path.read_text("utf-8"))
            except (OSError, json.JSONDecodeError):
                logger.warning("cache file unreadable, starting empty: %s",
                               config.cache_path)

    def set_stub_entries(self, entries: dict[GeoPoint, Union[str, float]]) -> None:
        """Inject stub answers programmatically (tests, canned tables)."""
        for point, value in entries.items():
            self._stub[_cache_key(point)] = value

    def _save_cache(self) -> None:
        if self.config.cache_path is None:
            return
        try:
            self.config.cache_path.parent.mkdir(parents=True, exist_ok=True)
            self.config.cache_path.write_text(
                json.dumps(self._cache, sort_keys=True), "utf-8"
            )
        except OSError:
            logger.warning("could not persist lookup cache")

    def _resolve(self, p: GeoPoint) -> tuple[object, bool]:
        """Returns (value, definitive)."""
        with self._lock:
            self.counters.provider_calls += 1
        if self.config.provider is ProviderKind.OFFLINE_STUB:
            return self._stub.get(_cache_key(p)), True
        url = self.config.endpoint.format(
            lat=urllib.parse.quote(f"{p.latitude:.6f}"),
            lng=urllib.parse.quote(f"{p.longitude:.6f}"),
        )
        self._limiter.wait()
        with self._lock:
            self.counters.network_calls += 1
        _count_network_call()
        try:
            with urllib.request.urlopen(url, timeout=self.config.timeout_s) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except Exception as exc:  # timeouts, DNS, HTTP errors, bad JSON
            logger.warning("provider lookup failed for %s: %s", url, exc)
            return None, False
        if self.config.response_field:
            return _extract_field(payload, self.config.response_field), True
        return payload, True

    def lookup(self, p: GeoPoint) -> Optional[Union[str, float]]:
        key = _cache_key(p)
        with self._lock:
            self.counters.lookups += 1
            hit = key in self._cache
            if hit:
                self.counters.cache_hits += 1
                value = self._cache[key]
        if not hit:
            # resolve outside the lock so provider calls can overlap up to
            # the rate limit; a duplicate concurrent miss is harmless
            value, definitive = self._resolve(p)
            if definitive:
                with self._lock:
                    self._cache[key] = value
                    self._save_cache()
        if value is None:
            return None
        if self.numeric:
            try:
                return float(value)
            except (TypeError, ValueError):
                return None
        return str(value)


@dataclass
class GeoServices:
    """The two lookup services a scan may consult."""

    geocoder: GeoLookupClient
    elevation: GeoLookupClient

    def reverse_geocode(self, p: GeoPoint) -> Optional[str]:
        value = self.geocoder.lookup(p)
        return None if value is None else str(value)

    def elevation_m(self, p: GeoPoint) -> Optional[float]:
        value = self.elevation.lookup(p)
        return None if value is None else float(value)

    @property
    def network_calls(self) -> int:
        return (
            self.geocoder.counters.network_calls
            + self.elevation.counters.network_calls
        )


def offline_services(workspace: Optional[Path] = None) -> GeoServices:
    """Default, air-gap-safe service pair backed by workspace caches."""
    geo_cache = workspace / "geocode-cache.json" if workspace else None
    ele_cache = workspace / "elevation-cache.json" if workspace else None
    return GeoServices(
        geocoder=GeoLookupClient(GeoProviderConfig(cache_path=geo_cache)),
        elevation=GeoLookupClient(
            GeoProviderConfig(cache_path=ele_cache), numeric=True
        ),
    )
