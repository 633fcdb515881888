from librarylens.facets import AgeBand, FacetSource, Genre
from librarylens.ingest import Binding
from librarylens.metadata import DimensionSource
from librarylens.models import Volume


def make_volume(
    isbn13="9780000000001",
    title="Untitled",
    author_lf="Author, Some",
    height_mm=210.0,
    spine_thickness_mm=20.0,
    genre=Genre.OTHER,
    age_band=AgeBand.ADULT,
    spine_color=(120, 120, 120),
    average_rating=None,
    series_name=None,
    series_index=None,
    binding=Binding.PAPERBACK,
    page_count=200,
):
    return Volume(
        isbn13=isbn13,
        title=title,
        author_display=author_lf,
        author_lf=author_lf,
        binding=binding,
        page_count=page_count,
        height_mm=height_mm,
        spine_thickness_mm=spine_thickness_mm,
        dimension_source=DimensionSource.ESTIMATED,
        genre=genre,
        age_band=age_band,
        facet_source=FacetSource.RULES,
        spine_color=spine_color,
        average_rating=average_rating,
        series_name=series_name,
        series_index=series_index,
    )
