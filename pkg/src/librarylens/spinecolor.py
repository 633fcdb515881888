"""Restricted-palette quantization of cover images and RGB histograms.

Median cut is used because it is deterministic and seed-free: identical
image bytes and config always produce an identical palette.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RGB = tuple[int, int, int]

NEUTRAL_SPINE: RGB = (120, 120, 120)


@dataclass(frozen=True)
class QuantizeConfig:
    palette_size: int = 4
    max_pixels: int = 65_536

    def __post_init__(self):
        if not 1 <= self.palette_size <= 16:
            raise ValueError(f"palette_size must be in [1, 16], got {self.palette_size}")
        if self.max_pixels < 1:
            raise ValueError("max_pixels must be >= 1")


@dataclass(frozen=True)
class HistogramConfig:
    bins: int = 256

    def __post_init__(self):
        if not 2 <= self.bins <= 256:
            raise ValueError(f"bins must be in [2, 256], got {self.bins}")


@dataclass(frozen=True)
class PaletteResult:
    entries: tuple[tuple[RGB, int], ...]  # (color, pixel_count), dominant first
    dominant: RGB


def luminance(color: RGB) -> float:
    r, g, b = color
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def rgb_to_hex(color: RGB) -> str:
    return "#{:02x}{:02x}{:02x}".format(*color)


def hex_to_rgb(s: str) -> RGB:
    s = s.lstrip("#")
    if len(s) != 6:
        raise ValueError(f"expected #RRGGBB, got {s!r}")
    return (int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16))


def _sample_pixels(image: np.ndarray, max_pixels: int) -> np.ndarray:
    """Flatten to (N, 3); above the cap, take a deterministic stride sample."""
    flat = np.asarray(image, dtype=np.int64).reshape(-1, 3)
    if flat.shape[0] > max_pixels:
        stride = math.ceil(flat.shape[0] / max_pixels)
        flat = flat[::stride]
    return flat


def _round_mean(values: np.ndarray) -> RGB:
    # half away from zero; channel means are always nonnegative
    means = values.mean(axis=0)
    return tuple(int(math.floor(m + 0.5)) for m in means)


def quantize(image: np.ndarray, config: QuantizeConfig = QuantizeConfig()) -> PaletteResult:
    """Median-cut the sampled pixels into at most ``palette_size`` boxes.

    Starting from one box over all sampled pixels, the box with the largest
    channel range is repeatedly split at the median of that channel (the
    midpoint element joins the lower half) until the palette size is reached
    or no box is splittable.  Each entry is the rounded per-channel mean of
    its box; the dominant entry maximizes pixel count, with ties broken by
    lower luminance and then lexicographic RGB.
    """
    image = np.asarray(image)
    if image.size == 0:
        raise ValueError("cannot quantize a zero-pixel image")
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {image.shape}")

    pixels = _sample_pixels(image, config.max_pixels)
    boxes: list[np.ndarray] = [pixels]

    while len(boxes) < config.palette_size:
        best_i, best_range = -1, 0
        for i, box in enumerate(boxes):
            if box.shape[0] < 2:
                continue
            spread = int((box.max(axis=0) - box.min(axis=0)).max())
            if spread > best_range:
                best_i, best_range = i, spread
        if best_i < 0:
            break
        box = boxes[best_i]
        channel = int(np.argmax(box.max(axis=0) - box.min(axis=0)))
        order = np.argsort(box[:, channel], kind="stable")
        split = (box.shape[0] + 1) // 2
        boxes[best_i : best_i + 1] = [box[order[:split]], box[order[split:]]]

    entries = [(_round_mean(box), box.shape[0]) for box in boxes]
    entries.sort(key=lambda e: (-e[1], luminance(e[0]), e[0]))
    return PaletteResult(entries=tuple(entries), dominant=entries[0][0])


def rgb_histogram(
    image: np.ndarray, config: HistogramConfig = HistogramConfig()
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-channel counts over ``bins`` buckets; value v lands in v*bins//256."""
    flat = np.asarray(image, dtype=np.int64).reshape(-1, 3)
    channels = []
    for c in range(3):
        binned = flat[:, c] * config.bins // 256
        channels.append(np.bincount(binned, minlength=config.bins))
    return tuple(channels)


def spine_color_for(meta, cover: np.ndarray | None, config: QuantizeConfig = QuantizeConfig()) -> RGB:
    """Dominant palette color of the cover, or a neutral gray when absent.

    ``meta`` is accepted so callers can pass the volume record along with its
    cover; the fallback is currently metadata-independent.
    """
    if cover is None:
        return NEUTRAL_SPINE
    return quantize(cover, config).dominant
