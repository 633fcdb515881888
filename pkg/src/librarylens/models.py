"""Fully enriched volume record shared by the layout and rendering stages."""

from __future__ import annotations

from dataclasses import dataclass

from .facets import AgeBand, FacetSource, Genre
from .ingest import Binding
from .metadata import DimensionSource
from .spinecolor import RGB, hex_to_rgb, rgb_to_hex


@dataclass(frozen=True)
class Volume:
    isbn13: str
    title: str
    author_display: str
    author_lf: str
    binding: Binding
    page_count: int
    height_mm: float
    spine_thickness_mm: float
    dimension_source: DimensionSource
    genre: Genre
    age_band: AgeBand
    facet_source: FacetSource
    spine_color: RGB
    average_rating: float | None = None
    my_rating: int = 0
    publisher: str = ""
    year_published: int | None = None
    series_name: str | None = None
    series_index: float | None = None
    subjects: tuple[str, ...] = ()
    cover_image: str | None = None

    def to_dict(self) -> dict:
        return {
            "isbn13": self.isbn13,
            "title": self.title,
            "author_display": self.author_display,
            "author_lf": self.author_lf,
            "binding": self.binding.value,
            "page_count": self.page_count,
            "height_mm": self.height_mm,
            "spine_thickness_mm": self.spine_thickness_mm,
            "dimension_source": self.dimension_source.value,
            "genre": self.genre.value,
            "age_band": self.age_band.value,
            "facet_source": self.facet_source.value,
            "spine_color": rgb_to_hex(self.spine_color),
            "average_rating": self.average_rating,
            "my_rating": self.my_rating,
            "publisher": self.publisher,
            "year_published": self.year_published,
            "series_name": self.series_name,
            "series_index": self.series_index,
            "subjects": list(self.subjects),
            "cover_image": self.cover_image,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Volume":
        return cls(
            isbn13=d["isbn13"],
            title=d["title"],
            author_display=d["author_display"],
            author_lf=d["author_lf"],
            binding=Binding(d["binding"]),
            page_count=d["page_count"],
            height_mm=d["height_mm"],
            spine_thickness_mm=d["spine_thickness_mm"],
            dimension_source=DimensionSource(d["dimension_source"]),
            genre=Genre(d["genre"]),
            age_band=AgeBand(d["age_band"]),
            facet_source=FacetSource(d["facet_source"]),
            spine_color=hex_to_rgb(d["spine_color"]),
            average_rating=d.get("average_rating"),
            my_rating=d.get("my_rating", 0),
            publisher=d.get("publisher", ""),
            year_published=d.get("year_published"),
            series_name=d.get("series_name"),
            series_index=d.get("series_index"),
            subjects=tuple(d.get("subjects", ())),
            cover_image=d.get("cover_image"),
        )
