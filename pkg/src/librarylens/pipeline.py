"""Assembly line from parsed CSV records to fully enriched volumes.

Merging policy when both the export row and the provider know a field: the
user's row wins for identity and edition facts (title, author, binding,
pages, rating), the provider wins for tracked physical dimensions, subjects
and cover art.  Fetch failures degrade to row-only volumes with estimated
dimensions instead of dropping books.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

from .facets import NormalizerConfig, normalize_batch
from .ingest import Binding, RawRecord
from .metadata import (
    DimensionSource,
    FetchFailure,
    MetadataCache,
    MetadataProvider,
    ProviderConfig,
    VolumeMeta,
    estimate_dimensions,
    fetch_metadata,
    load_cover,
)
from .models import Volume
from .spinecolor import QuantizeConfig, spine_color_for

log = logging.getLogger(__name__)

COVER_WORKERS = 8


def merge_record_and_meta(record: RawRecord, meta: VolumeMeta | FetchFailure) -> VolumeMeta:
    """Resolve one volume's metadata from the export row and the fetch result."""
    fetched = meta if isinstance(meta, VolumeMeta) else None
    binding = record.binding if record.binding is not Binding.UNKNOWN else (
        fetched.binding if fetched else Binding.UNKNOWN
    )
    page_count = record.page_count or (fetched.page_count if fetched else 0)
    if fetched is not None and fetched.dimension_source is DimensionSource.PROVIDER:
        height, thickness, source = fetched.height_mm, fetched.spine_thickness_mm, DimensionSource.PROVIDER
    else:
        height, thickness, source = estimate_dimensions(page_count, binding)
    rating = record.average_rating if record.average_rating > 0 else (
        fetched.average_rating if fetched else None
    )
    return VolumeMeta(
        isbn13=record.isbn13,
        title=record.title,
        authors=(fetched.authors if fetched and fetched.authors else (record.author_display,)),
        binding=binding,
        page_count=page_count,
        height_mm=height,
        spine_thickness_mm=thickness,
        cover_image=fetched.cover_image if fetched else None,
        average_rating=rating,
        subjects=fetched.subjects if fetched else (),
        dimension_source=source,
    )


def build_volumes(
    records: list[RawRecord],
    provider: MetadataProvider,
    provider_config: ProviderConfig | None = None,
    cache: MetadataCache | None = None,
    normalizer_config: NormalizerConfig | None = None,
    llm_client=None,
    quantize_config: QuantizeConfig | None = None,
) -> tuple[dict[str, Volume], list[FetchFailure]]:
    """Run fetch, facet normalization and spine-color extraction for all records.

    Returns volumes keyed by ISBN-13 in record order, plus the fetch
    failures that were absorbed by row-only fallbacks.
    """
    quantize_config = quantize_config or QuantizeConfig()
    fetched = fetch_metadata([r.isbn13 for r in records], provider, provider_config, cache)
    failures = [f for f in fetched.values() if isinstance(f, FetchFailure)]
    for failure in failures:
        log.warning("metadata fetch failed for %s: %s", failure.isbn13, failure.reason)

    merged = {r.isbn13: merge_record_and_meta(r, fetched[r.isbn13]) for r in records}
    facets = normalize_batch(list(merged.values()), normalizer_config, client=llm_client)

    def spine(meta: VolumeMeta):
        cover = load_cover(meta, provider, cache)
        return spine_color_for(meta, cover, quantize_config)

    metas = list(merged.values())
    if metas:
        with ThreadPoolExecutor(max_workers=COVER_WORKERS) as pool:
            colors = dict(zip([m.isbn13 for m in metas], pool.map(spine, metas)))
    else:
        colors = {}

    volumes: dict[str, Volume] = {}
    for record in records:
        meta = merged[record.isbn13]
        volumes[record.isbn13] = Volume(
            isbn13=record.isbn13,
            title=record.title,
            author_display=record.author_display,
            author_lf=record.author_lf,
            binding=meta.binding,
            page_count=meta.page_count,
            height_mm=meta.height_mm,
            spine_thickness_mm=meta.spine_thickness_mm,
            dimension_source=meta.dimension_source,
            genre=facets[record.isbn13].genre,
            age_band=facets[record.isbn13].age_band,
            facet_source=facets[record.isbn13].facet_source,
            spine_color=colors[record.isbn13],
            average_rating=meta.average_rating,
            my_rating=record.my_rating,
            publisher=record.publisher,
            year_published=record.year_published,
            series_name=record.series_name,
            series_index=record.series_index,
            subjects=meta.subjects,
            cover_image=meta.cover_image,
        )
    return volumes, failures
