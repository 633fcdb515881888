"""Display-color encodings and labeled SVG blueprint rendering.

The SVG is the artifact a user carries to their physical shelves, so the
renderer favors byte-determinism (fixed number formatting, insertion-order
iteration) over prettiness; identical inputs must yield identical bytes.
"""

from __future__ import annotations

import enum
import json
import math
import os
from collections.abc import Mapping
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .facets import AgeBand, Genre
from .models import Volume
from .shelf import Orientation, SceneLayout, ShelfSpec, occupied_width_mm
from .spinecolor import RGB, hex_to_rgb, luminance, rgb_to_hex


class EncodingMode(enum.Enum):
    ORIGINAL = "original"
    AGE = "age"
    GENRE = "genre"
    RATING = "rating"


def parse_encoding(text: str) -> EncodingMode:
    try:
        return EncodingMode(text.strip().lower())
    except ValueError:
        raise ValueError(f"unknown encoding mode: {text!r}") from None


@dataclass(frozen=True)
class PaletteTable:
    genre_colors: Mapping[Genre, RGB]
    age_colors: Mapping[AgeBand, RGB]
    rating_low: RGB
    rating_high: RGB
    missing_rating: RGB

    def __post_init__(self):
        missing_genres = [g for g in Genre if g not in self.genre_colors]
        missing_ages = [a for a in AgeBand if a not in self.age_colors]
        if missing_genres or missing_ages:
            raise ValueError(f"palette incomplete: {missing_genres + missing_ages}")
        if len(set(self.genre_colors.values())) != len(Genre):
            raise ValueError("genre colors must be pairwise distinct")
        if len(set(self.age_colors.values())) != len(AgeBand):
            raise ValueError("age colors must be pairwise distinct")


def load_palettes(path: str | Path | None = None) -> PaletteTable:
    """Load the palette table from a flat key -> hex JSON map.

    Resolution order: explicit path, LIBRARYLENS_PALETTES, bundled defaults.
    """
    if path is None:
        path = os.environ.get("LIBRARYLENS_PALETTES")
    if path is None:
        raw = json.loads(resources.files("librarylens").joinpath("data/palettes.json").read_text("utf-8"))
    else:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return PaletteTable(
        genre_colors={g: hex_to_rgb(raw[f"genre.{g.value}"]) for g in Genre},
        age_colors={a: hex_to_rgb(raw[f"age.{a.value}"]) for a in AgeBand},
        rating_low=hex_to_rgb(raw["rating.low"]),
        rating_high=hex_to_rgb(raw["rating.high"]),
        missing_rating=hex_to_rgb(raw["rating.missing"]),
    )


RATING_MIN, RATING_MAX = 1.0, 5.0


def rating_t(rating: float) -> float:
    """Clamped interpolation parameter: 1.0 -> 0, 5.0 -> 1."""
    return min(1.0, max(0.0, (rating - RATING_MIN) / (RATING_MAX - RATING_MIN)))


def _lerp_channel(low: int, high: int, t: float) -> int:
    value = low + t * (high - low)
    return max(0, min(255, int(math.floor(value + 0.5))))


def display_color(volume: Volume, mode: EncodingMode, palettes: PaletteTable) -> RGB:
    """The spine fill for one volume under the active encoding; total."""
    if mode is EncodingMode.ORIGINAL:
        return volume.spine_color
    if mode is EncodingMode.AGE:
        return palettes.age_colors[volume.age_band]
    if mode is EncodingMode.GENRE:
        return palettes.genre_colors[volume.genre]
    if volume.average_rating is None:
        return palettes.missing_rating
    t = rating_t(volume.average_rating)
    return tuple(
        _lerp_channel(lo, hi, t) for lo, hi in zip(palettes.rating_low, palettes.rating_high)
    )


MARGIN = 10.0
CAPTION_BAND = 18.0
OVERFLOW_GAP = 8.0
LABEL_FONT_SIZE = 8.0
CAPTION_FONT_SIZE = 10.0


def _fmt(value: float) -> str:
    return f"{value:.1f}"


def _label_fill(fill: RGB) -> str:
    return "#000000" if luminance(fill) > 140 else "#ffffff"


def _book_rect(parts: list[str], x: float, y: float, w: float, h: float, fill: RGB, isbn13: str):
    parts.append(
        f'<rect class="book" data-isbn={quoteattr(isbn13)} x="{_fmt(x)}" y="{_fmt(y)}" '
        f'width="{_fmt(w)}" height="{_fmt(h)}" fill="{rgb_to_hex(fill)}" stroke="#222222" stroke-width="0.4"/>'
    )


def _book_label(parts: list[str], clip_id: str, x: float, y: float, w: float, h: float, title: str, fill: RGB):
    parts.append(f'<clipPath id="{clip_id}"><rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}"/></clipPath>')
    cx, cy = x + w / 2, y + h / 2
    parts.append(
        f'<text class="label" clip-path="url(#{clip_id})" x="{_fmt(cx)}" y="{_fmt(cy)}" '
        f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})" text-anchor="middle" dominant-baseline="central" '
        f'font-family="sans-serif" font-size="{_fmt(LABEL_FONT_SIZE)}" fill="{_label_fill(fill)}">{escape(title)}</text>'
    )


def render_svg(
    layout: SceneLayout,
    volumes: Mapping[str, Volume],
    spec: ShelfSpec,
    mode: EncodingMode,
    palettes: PaletteTable,
    labels: bool = True,
) -> str:
    """Render the layout as an SVG blueprint at 1 mm = 1 user unit.

    Every volume becomes one filled rectangle; Flat volumes lie on their
    side.  Shelf-number captions are always drawn; ``labels`` additionally
    writes each title vertically, clipped to its spine.  Overflow volumes
    are drawn in a strip below the bookcase.
    """
    row_pitch = spec.shelf_clearance_mm + CAPTION_BAND
    overflow_volumes = [volumes[i] for i in layout.overflow]
    overflow_width = sum(v.spine_thickness_mm for v in overflow_volumes)
    overflow_height = max((v.height_mm for v in overflow_volumes), default=0.0)

    width = 2 * MARGIN + max(spec.shelf_width_mm, overflow_width)
    height = MARGIN + spec.shelf_count * row_pitch + MARGIN
    if layout.overflow:
        height += OVERFLOW_GAP + overflow_height + CAPTION_BAND

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]

    baselines = []
    for i in range(spec.shelf_count):
        baseline = MARGIN + i * row_pitch + spec.shelf_clearance_mm
        baselines.append(baseline)
        parts.append(
            f'<line class="shelf" x1="{_fmt(MARGIN)}" y1="{_fmt(baseline)}" '
            f'x2="{_fmt(MARGIN + spec.shelf_width_mm)}" y2="{_fmt(baseline)}" stroke="#333333" stroke-width="2"/>'
        )
        parts.append(
            f'<text class="caption" x="{_fmt(MARGIN)}" y="{_fmt(baseline + 13)}" '
            f'font-family="sans-serif" font-size="{_fmt(CAPTION_FONT_SIZE)}" fill="#333333">shelf {i + 1}</text>'
        )

    clip_counter = 0
    for isbn13, placement in layout.placements.items():
        volume = volumes[isbn13]
        w = occupied_width_mm(volume, placement.orientation)
        h = volume.height_mm if placement.orientation is Orientation.UPRIGHT else volume.spine_thickness_mm
        x = MARGIN + placement.x_offset_mm
        y = baselines[placement.shelf_index] - h
        fill = display_color(volume, mode, palettes)
        _book_rect(parts, x, y, w, h, fill, isbn13)
        if labels:
            _book_label(parts, f"clip{clip_counter}", x, y, w, h, volume.title, fill)
            clip_counter += 1

    if layout.overflow:
        strip_baseline = MARGIN + spec.shelf_count * row_pitch + OVERFLOW_GAP + overflow_height
        x = MARGIN
        for volume in overflow_volumes:
            w, h = volume.spine_thickness_mm, volume.height_mm
            y = strip_baseline - h
            fill = display_color(volume, mode, palettes)
            _book_rect(parts, x, y, w, h, fill, volume.isbn13)
            if labels:
                _book_label(parts, f"clip{clip_counter}", x, y, w, h, volume.title, fill)
                clip_counter += 1
            x += w
        parts.append(
            f'<text class="caption" x="{_fmt(MARGIN)}" y="{_fmt(strip_baseline + 13)}" '
            f'font-family="sans-serif" font-size="{_fmt(CAPTION_FONT_SIZE)}" fill="#333333">overflow</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts)
