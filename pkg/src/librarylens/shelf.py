"""Order volumes, pack them onto dimensioned shelves, and re-flow moves.

All operations are pure: layouts are never mutated in place, so concurrent
callers on distinct libraries need no coordination here.
"""

from __future__ import annotations

import colorsys
import enum
import functools
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .facets import AGE_ORDER, GENRE_ORDER
from .models import Volume


class SortKey(enum.Enum):
    SIZE = "size"
    COLOR = "color"
    ALPHA = "alpha"
    AUTHOR_SERIES = "authorseries"
    RATING = "rating"
    GENRE = "genre"
    AGE = "age"


class Orientation(enum.Enum):
    UPRIGHT = "Upright"
    FLAT = "Flat"


@dataclass(frozen=True)
class ShelfSpec:
    shelf_count: int = 5
    shelf_width_mm: float = 760.0
    shelf_clearance_mm: float = 300.0

    def __post_init__(self):
        if self.shelf_count < 1:
            raise ValueError("shelf_count must be >= 1")
        if self.shelf_width_mm < 50:
            raise ValueError("shelf_width_mm must be >= 50")
        if self.shelf_clearance_mm < 100:
            raise ValueError("shelf_clearance_mm must be >= 100")

    def to_dict(self) -> dict:
        return {
            "shelf_count": self.shelf_count,
            "shelf_width_mm": self.shelf_width_mm,
            "shelf_clearance_mm": self.shelf_clearance_mm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ShelfSpec":
        return cls(
            shelf_count=d["shelf_count"],
            shelf_width_mm=d["shelf_width_mm"],
            shelf_clearance_mm=d["shelf_clearance_mm"],
        )


@dataclass(frozen=True)
class SortStrategy:
    keys: tuple[SortKey, ...]
    descending: tuple[bool, ...]

    def __post_init__(self):
        if not self.keys:
            raise ValueError("strategy needs at least one key")
        if len(self.keys) != len(set(self.keys)):
            raise ValueError("strategy keys must be unique")
        if len(self.keys) != len(self.descending):
            raise ValueError("one direction per key required")

    def serialize(self) -> str:
        return ",".join(("-" if d else "") + k.value for k, d in zip(self.keys, self.descending))


def parse_strategy(text: str) -> SortStrategy:
    """Parse "genre,-rating,alpha" style strategy strings (case-insensitive)."""
    keys: list[SortKey] = []
    descending: list[bool] = []
    for token in text.split(","):
        token = token.strip().lower()
        desc = token.startswith("-")
        if desc:
            token = token[1:]
        try:
            keys.append(SortKey(token))
        except ValueError:
            raise ValueError(f"unknown sort key: {token!r}") from None
        descending.append(desc)
    return SortStrategy(keys=tuple(keys), descending=tuple(descending))


DEFAULT_STRATEGY = parse_strategy("authorseries")


@dataclass(frozen=True)
class Placement:
    shelf_index: int
    x_offset_mm: float
    orientation: Orientation


@dataclass(frozen=True)
class SceneLayout:
    order: tuple[str, ...]
    placements: Mapping[str, Placement]
    overflow: tuple[str, ...]
    manual: bool = False


def occupied_width_mm(volume: Volume, orientation: Orientation) -> float:
    if orientation is Orientation.UPRIGHT:
        return volume.spine_thickness_mm
    return volume.height_mm


_ARTICLE_RE = re.compile(r"^(?:a|an|the)\s+")

GRAY_SATURATION_CUTOFF = 0.10
HUE_BUCKETS = 12


def _alpha_key(title: str) -> str:
    return _ARTICLE_RE.sub("", title.casefold().strip())


def color_sort_key(rgb: tuple[int, int, int]) -> tuple[int, int, float]:
    """(gray flag, hue bucket, -lightness): chromatic runs first, grays after.

    Near-grays interleave randomly under raw hue ordering, so anything with
    saturation below the cutoff is pushed into a separate lightness-ordered
    run at the end.
    """
    r, g, b = (c / 255.0 for c in rgb)
    hue, lightness, saturation = colorsys.rgb_to_hls(r, g, b)
    if saturation < GRAY_SATURATION_CUTOFF:
        return (1, 0, -lightness)
    return (0, int(hue * HUE_BUCKETS) % HUE_BUCKETS, -lightness)


def _natural_key(volume: Volume, key: SortKey) -> tuple:
    if key is SortKey.SIZE:
        return (volume.height_mm, volume.spine_thickness_mm)
    if key is SortKey.COLOR:
        return color_sort_key(volume.spine_color)
    if key is SortKey.ALPHA:
        return (_alpha_key(volume.title),)
    if key is SortKey.AUTHOR_SERIES:
        return (
            volume.author_lf,
            volume.series_name or "",
            volume.series_index or 0.0,
            volume.title,
        )
    if key is SortKey.GENRE:
        return (GENRE_ORDER[volume.genre],)
    if key is SortKey.AGE:
        return (AGE_ORDER[volume.age_band],)
    raise AssertionError(key)


def sort_volumes(volumes: Sequence[Volume], strategy: SortStrategy) -> list[Volume]:
    """Stable lexicographic sort over the strategy keys, isbn13 as final tie.

    Unknown ratings sort after the 5.0-to-1.0 range regardless of the rating
    key's direction, so they never pollute either extreme.
    """
    cache: dict[str, dict[SortKey, tuple]] = {}
    for v in volumes:
        cache[v.isbn13] = {k: _natural_key(v, k) for k in strategy.keys if k is not SortKey.RATING}

    def compare(a: Volume, b: Volume) -> int:
        for key, desc in zip(strategy.keys, strategy.descending):
            if key is SortKey.RATING:
                a_unknown, b_unknown = a.average_rating is None, b.average_rating is None
                if a_unknown != b_unknown:
                    return 1 if a_unknown else -1
                if not a_unknown and a.average_rating != b.average_rating:
                    less = a.average_rating < b.average_rating
                    return (1 if less else -1) if desc else (-1 if less else 1)
                continue
            ka, kb = cache[a.isbn13][key], cache[b.isbn13][key]
            if ka != kb:
                less = ka < kb
                return (1 if less else -1) if desc else (-1 if less else 1)
        if a.isbn13 != b.isbn13:
            return -1 if a.isbn13 < b.isbn13 else 1
        return 0

    return sorted(volumes, key=functools.cmp_to_key(compare))


def pack(order: Sequence[str], volumes: Mapping[str, Volume], spec: ShelfSpec) -> SceneLayout:
    """Greedy left-to-right fill of the order onto shelves.

    A volume goes Upright when its height clears the shelf, Flat when only
    its thickness does; when the current shelf lacks remaining width the
    fill advances to the next (empty) shelf.  Volumes that cannot fit any
    shelf land in overflow, which absorbs all failures.
    """
    placements: dict[str, Placement] = {}
    overflow: list[str] = []
    shelf_index = 0
    used = 0.0
    for isbn in order:
        volume = volumes[isbn]
        if volume.height_mm <= spec.shelf_clearance_mm:
            orientation = Orientation.UPRIGHT
        elif volume.spine_thickness_mm <= spec.shelf_clearance_mm:
            orientation = Orientation.FLAT
        else:
            overflow.append(isbn)
            continue
        occupied = occupied_width_mm(volume, orientation)
        if occupied > spec.shelf_width_mm or shelf_index >= spec.shelf_count:
            overflow.append(isbn)
            continue
        if used + occupied > spec.shelf_width_mm:
            shelf_index += 1
            used = 0.0
            if shelf_index >= spec.shelf_count:
                overflow.append(isbn)
                continue
        placements[isbn] = Placement(shelf_index, used, orientation)
        used += occupied
    return SceneLayout(order=tuple(order), placements=placements, overflow=tuple(overflow), manual=False)


def move(
    layout: SceneLayout,
    from_index: int,
    to_index: int,
    volumes: Mapping[str, Volume],
    spec: ShelfSpec,
) -> SceneLayout:
    """Relocate one volume in the flow order and re-pack everything.

    ``to_index`` addresses a position in the post-removal list.  Bad indices
    raise without touching the input layout.
    """
    n = len(layout.order)
    if not (0 <= from_index < n and 0 <= to_index < n):
        raise IndexError(f"move indices out of bounds: {from_index} -> {to_index} over {n}")
    new_order = list(layout.order)
    item = new_order.pop(from_index)
    new_order.insert(to_index, item)
    packed = pack(new_order, volumes, spec)
    return SceneLayout(packed.order, packed.placements, packed.overflow, manual=True)


def resort(
    layout: SceneLayout,
    strategy: SortStrategy,
    volumes: Mapping[str, Volume],
    spec: ShelfSpec,
) -> SceneLayout:
    """Discard any manual order and lay out from scratch per the strategy."""
    ordered = sort_volumes(list(volumes.values()), strategy)
    return pack([v.isbn13 for v in ordered], volumes, spec)


def reading_order(layout: SceneLayout) -> list[str]:
    """Placed isbns shelf-by-shelf, left-to-right; equals order minus overflow."""
    placed = sorted(
        layout.placements.items(), key=lambda kv: (kv[1].shelf_index, kv[1].x_offset_mm)
    )
    return [isbn for isbn, _ in placed]
