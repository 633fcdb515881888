"""Normalize noisy provider subjects into closed genre and reading-age enums.

An LLM client maps each volume to one of ten genres and four age bands; any
response outside the enumerations is thrown away and the deterministic
keyword-table fallback used instead, so the output space stays closed no
matter what the model says.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

from .metadata import VolumeMeta

log = logging.getLogger(__name__)


class Genre(enum.Enum):
    FANTASY = "Fantasy"
    SCIFI = "SciFi"
    DYSTOPIAN = "Dystopian"
    MYSTERY = "Mystery"
    HORROR = "Horror"
    HISTORICAL = "Historical"
    ROMANCE = "Romance"
    CLASSICS = "Classics"
    OTHER = "Other"
    NONFICTION = "Nonfiction"


class AgeBand(enum.Enum):
    CHILDREN = "Children"
    MIDDLE_GRADE = "MiddleGrade"
    YOUNG_ADULT = "YoungAdult"
    ADULT = "Adult"


class FacetSource(enum.Enum):
    LLM = "LLM"
    RULES = "Rules"


GENRE_ORDER = {genre: i for i, genre in enumerate(Genre)}
AGE_ORDER = {band: i for i, band in enumerate(AgeBand)}


@dataclass(frozen=True)
class Facets:
    genre: Genre
    age_band: AgeBand
    facet_source: FacetSource

    def to_dict(self) -> dict:
        return {
            "genre": self.genre.value,
            "age_band": self.age_band.value,
            "facet_source": self.facet_source.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Facets":
        return cls(
            genre=Genre(d["genre"]),
            age_band=AgeBand(d["age_band"]),
            facet_source=FacetSource(d.get("facet_source", "Rules")),
        )


@dataclass(frozen=True)
class NormalizerConfig:
    batch_size: int = 25
    api_key: str = ""
    model_id: str = "claude-3-haiku-20240307"
    timeout_ms: int = 30_000
    endpoint: str = ""

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def _load_keyword_table() -> tuple[list[tuple[Genre, list[re.Pattern]]], list[tuple[AgeBand, list[re.Pattern]]]]:
    raw = json.loads(resources.files("librarylens").joinpath("data/keywords.json").read_text("utf-8"))
    genres = [
        (Genre(g["genre"]), [re.compile(p) for p in g["patterns"]])
        for g in raw["genres"]
    ]
    ages = [
        (AgeBand(a["age_band"]), [re.compile(p) for p in a["patterns"]])
        for a in raw["age_bands"]
    ]
    return genres, ages


_GENRE_RULES, _AGE_RULES = _load_keyword_table()


def rules_normalize(meta: VolumeMeta) -> Facets:
    """Keyword-table bucketing over lowercase subjects + title; total and pure."""
    text = " ; ".join(list(meta.subjects) + [meta.title]).lower()
    genre = Genre.OTHER
    for candidate, patterns in _GENRE_RULES:
        if any(p.search(text) for p in patterns):
            genre = candidate
            break
    age_band = AgeBand.ADULT
    for candidate, patterns in _AGE_RULES:
        if any(p.search(text) for p in patterns):
            age_band = candidate
            break
    return Facets(genre=genre, age_band=age_band, facet_source=FacetSource.RULES)


class ChatCompletionClient:
    """Minimal chat-completion HTTP client with a configurable endpoint."""

    def __init__(self, config: NormalizerConfig):
        self.config = config

    def complete(self, prompt: str) -> str:
        import requests

        resp = requests.post(
            self.config.endpoint,
            headers={"Authorization": f"Bearer {self.config.api_key}"},
            json={
                "model": self.config.model_id,
                "messages": [{"role": "user", "content": prompt}],
            },
            timeout=self.config.timeout_ms / 1000.0,
        )
        resp.raise_for_status()
        return resp.json()["choices"][0]["message"]["content"]


def llm_disabled() -> bool:
    return os.environ.get("LIBRARYLENS_LLM_DISABLED") == "1"


def _batch_prompt(volumes: list[VolumeMeta]) -> str:
    genres = ", ".join(g.value for g in Genre)
    ages = ", ".join(a.value for a in AgeBand)
    lines = [
        "Classify each book into exactly one genre and one reading-age band.",
        f"Allowed genres: {genres}.",
        f"Allowed age bands: {ages}.",
        'Reply with a single JSON object mapping isbn13 to {"genre": ..., "age_band": ...}.',
        "Use only the allowed values, verbatim. Books:",
    ]
    for v in volumes:
        lines.append(json.dumps({"isbn13": v.isbn13, "title": v.title, "subjects": list(v.subjects)}))
    return "\n".join(lines)


_FENCE_RE = re.compile(r"^```(?:json)?\s*|\s*```$")


def _parse_llm_response(text: str) -> dict:
    return json.loads(_FENCE_RE.sub("", text.strip()))


def _normalize_one_batch(volumes: list[VolumeMeta], client) -> dict[str, Facets]:
    try:
        parsed = _parse_llm_response(client.complete(_batch_prompt(volumes)))
    except Exception as exc:
        log.warning("facet batch fell back to rules: %s", exc)
        return {v.isbn13: rules_normalize(v) for v in volumes}

    results: dict[str, Facets] = {}
    for volume in volumes:
        entry = parsed.get(volume.isbn13) if isinstance(parsed, dict) else None
        try:
            facets = Facets(
                genre=Genre(entry["genre"]),
                age_band=AgeBand(entry["age_band"]),
                facet_source=FacetSource.LLM,
            )
        except (TypeError, KeyError, ValueError):
            facets = rules_normalize(volume)
        results[volume.isbn13] = facets
    return results


def normalize_batch(
    volumes: list[VolumeMeta],
    config: NormalizerConfig | None = None,
    client=None,
) -> dict[str, Facets]:
    """One Facets per volume, batched at most ``batch_size`` per request.

    With no client, a disabled flag, or a missing key, every volume takes
    the rules path; an unreachable model downgrades only its own batch.
    """
    config = config or NormalizerConfig()
    if not volumes:
        return {}
    if client is None and not llm_disabled() and config.api_key and config.endpoint:
        client = ChatCompletionClient(config)
    if client is None or llm_disabled():
        return {v.isbn13: rules_normalize(v) for v in volumes}

    batches = [volumes[i : i + config.batch_size] for i in range(0, len(volumes), config.batch_size)]
    results: dict[str, Facets] = {}
    with ThreadPoolExecutor(max_workers=min(4, len(batches))) as pool:
        for batch_result in pool.map(lambda b: _normalize_one_batch(b, client), batches):
            results.update(batch_result)
    return results
