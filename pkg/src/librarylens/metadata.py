"""Enrich ISBNs with book metadata via pluggable providers.

Two providers ship: a remote HTTP client (one GET per ISBN, bearer key) and
an offline fixture provider backed by a bundled JSON file, so tests and
headless runs never need network access or an API key.  Fetched records are
cached on disk as one JSON object per line; corrupt lines are skipped with a
warning so a torn write never poisons the cache.
"""

from __future__ import annotations

import enum
import hashlib
import io
import json
import logging
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .ingest import Binding, parse_binding

log = logging.getLogger(__name__)

HEIGHT_RANGE_MM = (100.0, 400.0)
THICKNESS_RANGE_MM = (3.0, 120.0)
UNKNOWN_PAGES_THICKNESS_MM = 18.0  # median paperback

_BINDING_HEIGHTS_MM = {
    Binding.HARDCOVER: 235.0,
    Binding.PAPERBACK: 210.0,
    Binding.MASS_MARKET: 175.0,
}
_DEFAULT_HEIGHT_MM = 203.0


class ConfigurationError(Exception):
    """Provider misconfiguration (e.g. remote mode without an API key)."""


class ProviderError(Exception):
    pass


class NotFound(ProviderError):
    pass


class RateLimited(ProviderError):
    pass


class NetworkFailure(ProviderError):
    pass


class DimensionSource(enum.Enum):
    PROVIDER = "Provider"
    ESTIMATED = "Estimated"


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = "https://api2.isbndb.com"
    api_key: str = ""
    max_in_flight: int = 4
    retry_budget: int = 3
    backoff_base_ms: int = 250

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


@dataclass(frozen=True)
class VolumeMeta:
    isbn13: str
    title: str = ""
    authors: tuple[str, ...] = ()
    binding: Binding = Binding.UNKNOWN
    page_count: int = 0
    height_mm: float = _DEFAULT_HEIGHT_MM
    spine_thickness_mm: float = UNKNOWN_PAGES_THICKNESS_MM
    cover_image: str | None = None
    average_rating: float | None = None
    subjects: tuple[str, ...] = ()
    dimension_source: DimensionSource = DimensionSource.ESTIMATED

    def to_dict(self) -> dict:
        return {
            "isbn13": self.isbn13,
            "title": self.title,
            "authors": list(self.authors),
            "binding": self.binding.value,
            "page_count": self.page_count,
            "height_mm": self.height_mm,
            "spine_thickness_mm": self.spine_thickness_mm,
            "cover_image": self.cover_image,
            "average_rating": self.average_rating,
            "subjects": list(self.subjects),
            "dimension_source": self.dimension_source.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VolumeMeta":
        return cls(
            isbn13=d["isbn13"],
            title=d.get("title", ""),
            authors=tuple(d.get("authors", ())),
            binding=Binding(d.get("binding", "Unknown")),
            page_count=d.get("page_count", 0),
            height_mm=d.get("height_mm", _DEFAULT_HEIGHT_MM),
            spine_thickness_mm=d.get("spine_thickness_mm", UNKNOWN_PAGES_THICKNESS_MM),
            cover_image=d.get("cover_image"),
            average_rating=d.get("average_rating"),
            subjects=tuple(d.get("subjects", ())),
            dimension_source=DimensionSource(d.get("dimension_source", "Estimated")),
        )


@dataclass(frozen=True)
class FetchFailure:
    isbn13: str
    reason: str  # not-found | network | rate-limited


def _round_tenth(value: float) -> float:
    return math.floor(value * 10 + 0.5) / 10


def _clamp(value: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return max(lo, min(hi, value))


def estimate_dimensions(page_count: int, binding: Binding) -> tuple[float, float, DimensionSource]:
    """Physical size from page count and binding when no tracked data exists.

    Spine thickness is a 4.0 mm cover allowance plus 0.06 mm per page,
    clamped to plausible shelf values; zero pages falls back to a median
    paperback thickness.
    """
    if page_count < 0:
        raise ValueError("page_count must be >= 0")
    height = _BINDING_HEIGHTS_MM.get(binding, _DEFAULT_HEIGHT_MM)
    if page_count == 0:
        thickness = UNKNOWN_PAGES_THICKNESS_MM
    else:
        thickness = _round_tenth(_clamp(4.0 + 0.06 * page_count, THICKNESS_RANGE_MM))
    return height, thickness, DimensionSource.ESTIMATED


def record_to_meta(isbn13: str, record: dict) -> VolumeMeta:
    """Build a VolumeMeta from a provider record, tolerating absent fields."""
    pages = record.get("pages") or 0
    try:
        pages = max(0, int(pages))
    except (TypeError, ValueError):
        pages = 0
    binding = parse_binding(str(record.get("binding") or ""))
    dims = record.get("dimensions") or {}
    if isinstance(dims, dict) and "height_mm" in dims and "thickness_mm" in dims:
        height = _round_tenth(_clamp(float(dims["height_mm"]), HEIGHT_RANGE_MM))
        thickness = _round_tenth(_clamp(float(dims["thickness_mm"]), THICKNESS_RANGE_MM))
        source = DimensionSource.PROVIDER
    else:
        height, thickness, source = estimate_dimensions(pages, binding)
    rating = record.get("average_rating")
    try:
        rating = float(rating) if rating is not None else None
    except (TypeError, ValueError):
        rating = None
    if rating is not None and not 0.0 < rating <= 5.0:
        rating = None
    return VolumeMeta(
        isbn13=isbn13,
        title=str(record.get("title") or ""),
        authors=tuple(str(a) for a in record.get("authors") or ()),
        binding=binding,
        page_count=pages,
        height_mm=height,
        spine_thickness_mm=thickness,
        cover_image=record.get("image"),
        average_rating=rating,
        subjects=tuple(str(s) for s in record.get("subjects") or ()),
        dimension_source=source,
    )


class MetadataProvider:
    """A source of raw book records and cover bytes, keyed by ISBN-13."""

    name = "abstract"

    def get_book(self, isbn13: str) -> dict:
        """Return the raw record; raise NotFound/RateLimited/NetworkFailure."""
        raise NotImplementedError

    def get_cover_bytes(self, ref: str) -> bytes | None:
        raise NotImplementedError


class RemoteProvider(MetadataProvider):
    """HTTP client issuing one GET /book/{isbn13} per volume."""

    name = "remote"

    def __init__(self, config: ProviderConfig, session=None):
        if not config.api_key:
            raise ConfigurationError("remote provider requires an API key (ISBNDB_API_KEY)")
        import requests

        self.config = config
        self._session = session or requests.Session()

    def get_book(self, isbn13: str) -> dict:
        import requests

        url = f"{self.config.base_url.rstrip('/')}/book/{isbn13}"
        try:
            resp = self._session.get(
                url,
                headers={"Authorization": f"Bearer {self.config.api_key}"},
                timeout=15,
            )
        except requests.RequestException as exc:
            raise NetworkFailure(str(exc)) from exc
        if resp.status_code == 404:
            raise NotFound(isbn13)
        if resp.status_code == 429:
            raise RateLimited(isbn13)
        if resp.status_code != 200:
            raise NetworkFailure(f"HTTP {resp.status_code} for {isbn13}")
        try:
            return resp.json()
        except ValueError as exc:
            raise NetworkFailure(f"bad JSON body for {isbn13}") from exc

    def get_cover_bytes(self, ref: str) -> bytes | None:
        import requests

        try:
            resp = self._session.get(ref, timeout=15)
        except requests.RequestException:
            return None
        if resp.status_code != 200:
            return None
        return resp.content


def bundled_fixture_path() -> Path:
    return Path(resources.files("librarylens").joinpath("data/fixtures/metadata_fixture.json"))


class FixtureProvider(MetadataProvider):
    """Offline provider reading a bundled JSON map of ISBN-13 to record.

    Cover references use the scheme ``fixture://<isbn13>``; the cover is a
    deterministic synthetic 64x96 two-band image so the quantization stage
    has real pixels to work on without any binary assets in the repo.
    """

    name = "fixture"

    COVER_SIZE = (64, 96)  # W x H

    def __init__(self, source: str | Path | dict | None = None):
        if source is None:
            source = bundled_fixture_path()
        if isinstance(source, dict):
            self._records = source
        else:
            self._records = json.loads(Path(source).read_text(encoding="utf-8"))

    def get_book(self, isbn13: str) -> dict:
        record = self._records.get(isbn13)
        if record is None:
            raise NotFound(isbn13)
        return record

    def _cover_colors(self, isbn13: str) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
        record = self._records.get(isbn13) or {}
        rgb = record.get("cover_rgb")
        if rgb:
            primary = tuple(int(c) for c in rgb)
        else:
            digest = hashlib.sha256(isbn13.encode()).digest()
            primary = (digest[0], digest[1], digest[2])
        secondary = tuple(255 - c for c in primary)
        return primary, secondary

    def get_cover_bytes(self, ref: str) -> bytes | None:
        if not ref.startswith("fixture://"):
            return None
        isbn13 = ref[len("fixture://"):]
        if isbn13 not in self._records:
            return None
        primary, secondary = self._cover_colors(isbn13)
        w, h = self.COVER_SIZE
        band = h * 7 // 10
        img = Image.new("RGB", (w, h), primary)
        img.paste(Image.new("RGB", (w, h - band), secondary), (0, band))
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()


class MetadataCache:
    """Append-only JSONL record cache, safe for one writer and many readers."""

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._records_path = self.cache_dir / "metadata.jsonl"
        self._covers_dir = self.cache_dir / "covers"
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        self._load()

    def _load(self):
        if not self._records_path.exists():
            return
        with self._records_path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    self._entries[entry["isbn13"]] = entry
                except (ValueError, KeyError):
                    log.warning("skipping corrupt cache line %d in %s", lineno, self._records_path)

    def get(self, isbn13: str) -> dict | None:
        return self._entries.get(isbn13)

    def put(self, isbn13: str, found: bool, record: dict | None):
        entry = {"isbn13": isbn13, "found": found, "record": record}
        with self._lock:
            self._entries[isbn13] = entry
            with self._records_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def get_cover(self, isbn13: str) -> bytes | None:
        path = self._covers_dir / f"{isbn13}.img"
        if path.exists():
            return path.read_bytes()
        return None

    def put_cover(self, isbn13: str, data: bytes):
        self._covers_dir.mkdir(parents=True, exist_ok=True)
        (self._covers_dir / f"{isbn13}.img").write_bytes(data)


def _fetch_one(
    isbn13: str, provider: MetadataProvider, config: ProviderConfig, cache: MetadataCache | None
) -> VolumeMeta | FetchFailure:
    cached = cache.get(isbn13) if cache else None
    if cached is not None:
        if cached["found"]:
            return record_to_meta(isbn13, cached["record"])
        return FetchFailure(isbn13, "not-found")

    attempts = 0
    while True:
        try:
            record = provider.get_book(isbn13)
        except NotFound:
            if cache:
                cache.put(isbn13, found=False, record=None)
            return FetchFailure(isbn13, "not-found")
        except RateLimited:
            if attempts >= config.retry_budget:
                return FetchFailure(isbn13, "rate-limited")
            time.sleep(config.backoff_base_ms * (2**attempts) / 1000.0)
            attempts += 1
            continue
        except NetworkFailure as exc:
            log.warning("fetch failed for %s: %s", isbn13, exc)
            return FetchFailure(isbn13, "network")
        if cache:
            cache.put(isbn13, found=True, record=record)
        return record_to_meta(isbn13, record)


def fetch_metadata(
    isbns: list[str],
    provider: MetadataProvider,
    config: ProviderConfig | None = None,
    cache: MetadataCache | None = None,
) -> dict[str, VolumeMeta | FetchFailure]:
    """Fetch one record per ISBN with bounded parallelism.

    At most ``config.max_in_flight`` requests run concurrently; rate-limit
    responses are retried with exponential backoff until the retry budget is
    spent.  Found and not-found results land in the cache, so a repeat call
    performs no provider round trips for them.
    """
    config = config or ProviderConfig(api_key="unused")
    if not isbns:
        return {}
    results: dict[str, VolumeMeta | FetchFailure] = {}
    with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
        futures = {isbn: pool.submit(_fetch_one, isbn, provider, config, cache) for isbn in isbns}
        for isbn, future in futures.items():
            results[isbn] = future.result()
    return results


def load_cover(meta: VolumeMeta, provider: MetadataProvider, cache: MetadataCache | None = None) -> np.ndarray | None:
    """Decode the volume's cover into an (H, W, 3) uint8 array, or None.

    Absent references, fetch failures, and undecodable bytes all yield None;
    downstream falls back to a neutral spine color.
    """
    if not meta.cover_image:
        return None
    data = cache.get_cover(meta.isbn13) if cache else None
    if data is None:
        data = provider.get_cover_bytes(meta.cover_image)
        if data is None:
            return None
        if cache:
            cache.put_cover(meta.isbn13, data)
    try:
        with Image.open(io.BytesIO(data)) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except Exception as exc:
        log.warning("cover decode failed for %s: %s", meta.isbn13, exc)
        return None


def provider_from_env() -> MetadataProvider:
    """Fixture provider when LIBRARYLENS_OFFLINE=1, remote otherwise."""
    if os.environ.get("LIBRARYLENS_OFFLINE") == "1":
        return FixtureProvider(os.environ.get("LIBRARYLENS_FIXTURE") or None)
    return RemoteProvider(
        ProviderConfig(
            base_url=os.environ.get("ISBNDB_BASE_URL", "https://api2.isbndb.com"),
            api_key=os.environ.get("ISBNDB_API_KEY", ""),
        )
    )


def cache_from_env() -> MetadataCache | None:
    cache_dir = os.environ.get("LIBRARYLENS_CACHE_DIR")
    if not cache_dir:
        return None
    return MetadataCache(cache_dir)
