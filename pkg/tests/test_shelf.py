import random

import pytest
from hypothesis import given, settings, strategies as st

from librarylens.facets import AgeBand, Genre
from librarylens.shelf import (
    DEFAULT_STRATEGY,
    Orientation,
    SceneLayout,
    ShelfSpec,
    SortKey,
    SortStrategy,
    color_sort_key,
    move,
    occupied_width_mm,
    pack,
    parse_strategy,
    reading_order,
    resort,
    sort_volumes,
)

from conftest import make_volume


def isbn(i: int) -> str:
    stem = f"9781{i:08d}"
    total = sum(int(c) * (3 if j % 2 else 1) for j, c in enumerate(stem))
    return stem + str((10 - total % 10) % 10)


def volume_map(volumes):
    return {v.isbn13: v for v in volumes}


class TestParseStrategy:
    def test_tokens_and_directions(self):
        s = parse_strategy("genre,-rating,alpha")
        assert s.keys == (SortKey.GENRE, SortKey.RATING, SortKey.ALPHA)
        assert s.descending == (False, True, False)
        assert s.serialize() == "genre,-rating,alpha"

    def test_case_insensitive(self):
        assert parse_strategy("AuthorSeries").keys == (SortKey.AUTHOR_SERIES,)

    def test_unknown_token(self):
        with pytest.raises(ValueError):
            parse_strategy("banana")

    def test_empty(self):
        with pytest.raises(ValueError):
            parse_strategy("")

    def test_duplicate_keys(self):
        with pytest.raises(ValueError):
            parse_strategy("alpha,alpha")


class TestSortVolumes:
    def test_alpha_strips_leading_article(self):
        hobbit = make_volume(isbn13=isbn(1), title="The Hobbit")
        dune = make_volume(isbn13=isbn(2), title="Dune")
        ordered = sort_volumes([hobbit, dune], parse_strategy("alpha"))
        assert [v.title for v in ordered] == ["Dune", "The Hobbit"]

    def test_single_volume(self):
        v = make_volume(isbn13=isbn(1))
        assert sort_volumes([v], parse_strategy("size")) == [v]

    def test_identical_keys_fall_back_to_isbn(self):
        a = make_volume(isbn13=isbn(9), title="Same")
        b = make_volume(isbn13=isbn(2), title="Same")
        ordered = sort_volumes([a, b], parse_strategy("alpha"))
        assert [v.isbn13 for v in ordered] == sorted([a.isbn13, b.isbn13])

    def test_unknown_rating_sorts_last_in_both_directions(self):
        rated = make_volume(isbn13=isbn(1), average_rating=1.2)
        unrated = make_volume(isbn13=isbn(2), average_rating=None)
        top = make_volume(isbn13=isbn(3), average_rating=4.8)
        for direction in ("rating", "-rating"):
            ordered = sort_volumes([unrated, rated, top], parse_strategy(direction))
            assert ordered[-1].isbn13 == unrated.isbn13

    def test_rating_directions(self):
        low = make_volume(isbn13=isbn(1), average_rating=2.0)
        high = make_volume(isbn13=isbn(2), average_rating=4.5)
        assert sort_volumes([low, high], parse_strategy("-rating"))[0] is high
        assert sort_volumes([low, high], parse_strategy("rating"))[0] is low

    def test_genre_uses_declaration_order(self):
        nonfiction = make_volume(isbn13=isbn(1), genre=Genre.NONFICTION)
        fantasy = make_volume(isbn13=isbn(2), genre=Genre.FANTASY)
        other = make_volume(isbn13=isbn(3), genre=Genre.OTHER)
        ordered = sort_volumes([nonfiction, fantasy, other], parse_strategy("genre"))
        assert [v.genre for v in ordered] == [Genre.FANTASY, Genre.OTHER, Genre.NONFICTION]

    def test_age_uses_declaration_order(self):
        adult = make_volume(isbn13=isbn(1), age_band=AgeBand.ADULT)
        child = make_volume(isbn13=isbn(2), age_band=AgeBand.CHILDREN)
        ordered = sort_volumes([adult, child], parse_strategy("age"))
        assert [v.age_band for v in ordered] == [AgeBand.CHILDREN, AgeBand.ADULT]

    def test_grays_sort_after_chromatic(self):
        gray = make_volume(isbn13=isbn(1), spine_color=(128, 128, 128))
        red = make_volume(isbn13=isbn(2), spine_color=(200, 20, 20))
        blue = make_volume(isbn13=isbn(3), spine_color=(20, 20, 200))
        ordered = sort_volumes([gray, blue, red], parse_strategy("color"))
        assert ordered[-1] is gray
        assert [v.isbn13 for v in ordered[:2]] == [red.isbn13, blue.isbn13]  # red hue 0 < blue hue

    def test_color_key_lightness_descending_within_bucket(self):
        dark = color_sort_key((80, 10, 10))
        light = color_sort_key((250, 170, 170))
        assert light < dark

    def test_size_is_height_then_thickness(self):
        tall = make_volume(isbn13=isbn(1), height_mm=250, spine_thickness_mm=10)
        short_fat = make_volume(isbn13=isbn(2), height_mm=180, spine_thickness_mm=60)
        short_thin = make_volume(isbn13=isbn(3), height_mm=180, spine_thickness_mm=20)
        ordered = sort_volumes([tall, short_fat, short_thin], parse_strategy("size"))
        assert [v.isbn13 for v in ordered] == [short_thin.isbn13, short_fat.isbn13, tall.isbn13]

    def test_author_series_groups_series_in_index_order(self):
        a2 = make_volume(isbn13=isbn(1), author_lf="Jordan, Robert", series_name="WoT", series_index=2.0, title="B")
        a1 = make_volume(isbn13=isbn(2), author_lf="Jordan, Robert", series_name="WoT", series_index=1.0, title="C")
        standalone = make_volume(isbn13=isbn(3), author_lf="Jordan, Robert", title="A")
        ordered = sort_volumes([a2, a1, standalone], parse_strategy("authorseries"))
        assert [v.isbn13 for v in ordered] == [standalone.isbn13, a1.isbn13, a2.isbn13]

    def test_sort_is_idempotent(self):
        rng = random.Random(4)
        volumes = [
            make_volume(isbn13=isbn(i), title=f"T{rng.randrange(5)}", average_rating=rng.choice([None, 3.0, 4.0]))
            for i in range(30)
        ]
        strategy = parse_strategy("rating,alpha")
        once = sort_volumes(volumes, strategy)
        twice = sort_volumes(once, strategy)
        assert once == twice


class TestPack:
    def test_worked_example_single_shelf(self):
        volumes = [
            make_volume(isbn13=isbn(1), spine_thickness_mm=120, height_mm=200),
            make_volume(isbn13=isbn(2), spine_thickness_mm=100, height_mm=200),
            make_volume(isbn13=isbn(3), spine_thickness_mm=90, height_mm=200),
        ]
        spec = ShelfSpec(shelf_count=1, shelf_width_mm=300, shelf_clearance_mm=250)
        layout = pack([v.isbn13 for v in volumes], volume_map(volumes), spec)
        assert list(layout.placements) == [isbn(1), isbn(2)]
        assert layout.overflow == (isbn(3),)
        assert layout.placements[isbn(1)].x_offset_mm == 0.0
        assert layout.placements[isbn(2)].x_offset_mm == 120.0

    def test_worked_example_two_shelves(self):
        volumes = [
            make_volume(isbn13=isbn(1), spine_thickness_mm=120, height_mm=200),
            make_volume(isbn13=isbn(2), spine_thickness_mm=100, height_mm=200),
            make_volume(isbn13=isbn(3), spine_thickness_mm=90, height_mm=200),
        ]
        spec = ShelfSpec(shelf_count=2, shelf_width_mm=300, shelf_clearance_mm=250)
        layout = pack([v.isbn13 for v in volumes], volume_map(volumes), spec)
        assert layout.overflow == ()
        assert layout.placements[isbn(3)].shelf_index == 1
        assert layout.placements[isbn(3)].x_offset_mm == 0.0

    def test_too_tall_book_rotates_flat(self):
        v = make_volume(isbn13=isbn(1), height_mm=260, spine_thickness_mm=40)
        spec = ShelfSpec(shelf_count=1, shelf_width_mm=300, shelf_clearance_mm=250)
        layout = pack([v.isbn13], volume_map([v]), spec)
        placement = layout.placements[v.isbn13]
        assert placement.orientation is Orientation.FLAT
        assert occupied_width_mm(v, placement.orientation) == 260

    def test_unfittable_book_goes_to_overflow_without_burning_shelves(self):
        wide = make_volume(isbn13=isbn(1), height_mm=260, spine_thickness_mm=40)  # flat needs 260
        slim = make_volume(isbn13=isbn(2), height_mm=200, spine_thickness_mm=30)
        spec = ShelfSpec(shelf_count=2, shelf_width_mm=200, shelf_clearance_mm=250)
        layout = pack([wide.isbn13, slim.isbn13], volume_map([wide, slim]), spec)
        assert layout.overflow == (wide.isbn13,)
        assert layout.placements[slim.isbn13].shelf_index == 0

    def test_too_tall_for_any_orientation_overflows(self):
        v = make_volume(isbn13=isbn(1), height_mm=400, spine_thickness_mm=120)
        spec = ShelfSpec(shelf_count=3, shelf_width_mm=500, shelf_clearance_mm=100)
        layout = pack([v.isbn13], volume_map([v]), spec)
        assert layout.overflow == (v.isbn13,)

    def test_spec_invariants(self):
        with pytest.raises(ValueError):
            ShelfSpec(shelf_count=0)
        with pytest.raises(ValueError):
            ShelfSpec(shelf_width_mm=49)
        with pytest.raises(ValueError):
            ShelfSpec(shelf_clearance_mm=99)


class TestMove:
    def _layout(self, n=4):
        volumes = [make_volume(isbn13=isbn(i), spine_thickness_mm=20) for i in range(n)]
        spec = ShelfSpec(shelf_count=2, shelf_width_mm=300, shelf_clearance_mm=250)
        vmap = volume_map(volumes)
        return pack([v.isbn13 for v in volumes], vmap, spec), vmap, spec

    def test_remove_then_insert_semantics(self):
        layout, vmap, spec = self._layout(4)
        moved = move(layout, 3, 1, vmap, spec)
        assert moved.order == (isbn(0), isbn(3), isbn(1), isbn(2))
        assert moved.manual is True

    def test_noop_move_sets_manual(self):
        layout, vmap, spec = self._layout(3)
        moved = move(layout, 1, 1, vmap, spec)
        assert moved.order == layout.order
        assert moved.manual is True

    def test_move_first_to_end(self):
        layout, vmap, spec = self._layout(3)
        moved = move(layout, 0, 2, vmap, spec)
        assert moved.order == (isbn(1), isbn(2), isbn(0))

    def test_out_of_bounds_raises_and_leaves_layout_alone(self):
        layout, vmap, spec = self._layout(3)
        before = (layout.order, dict(layout.placements), layout.overflow, layout.manual)
        with pytest.raises(IndexError):
            move(layout, 0, 3, vmap, spec)
        with pytest.raises(IndexError):
            move(layout, -1, 0, vmap, spec)
        assert (layout.order, dict(layout.placements), layout.overflow, layout.manual) == before


class TestResort:
    def test_discards_manual_order(self):
        volumes = [make_volume(isbn13=isbn(i), title=f"T{9-i}") for i in range(4)]
        vmap = volume_map(volumes)
        spec = ShelfSpec(shelf_count=2, shelf_width_mm=300, shelf_clearance_mm=250)
        manual = move(pack([v.isbn13 for v in volumes], vmap, spec), 0, 3, vmap, spec)
        assert manual.manual
        fresh = resort(manual, parse_strategy("alpha"), vmap, spec)
        scratch = pack([v.isbn13 for v in sort_volumes(volumes, parse_strategy("alpha"))], vmap, spec)
        assert fresh == scratch
        assert fresh.manual is False

    def test_resort_is_stable_under_repetition(self):
        volumes = [make_volume(isbn13=isbn(i)) for i in range(6)]
        vmap = volume_map(volumes)
        spec = ShelfSpec()
        once = resort(pack([v.isbn13 for v in volumes], vmap, spec), DEFAULT_STRATEGY, vmap, spec)
        twice = resort(once, DEFAULT_STRATEGY, vmap, spec)
        assert once == twice


def check_layout_invariants(layout: SceneLayout, vmap, spec: ShelfSpec):
    placed = set(layout.placements)
    overflowed = set(layout.overflow)
    assert placed | overflowed == set(layout.order)
    assert not placed & overflowed
    assert sorted(layout.order) == sorted(vmap)

    by_shelf: dict[int, list[tuple[float, float]]] = {}
    for isbn13, placement in layout.placements.items():
        volume = vmap[isbn13]
        width = occupied_width_mm(volume, placement.orientation)
        if placement.orientation is Orientation.UPRIGHT:
            assert volume.height_mm <= spec.shelf_clearance_mm
        else:
            assert volume.spine_thickness_mm <= spec.shelf_clearance_mm
        assert 0 <= placement.shelf_index < spec.shelf_count
        by_shelf.setdefault(placement.shelf_index, []).append((placement.x_offset_mm, width))

    for spans in by_shelf.values():
        spans.sort()
        total = 0.0
        prev_end = 0.0
        for offset, width in spans:
            assert offset >= prev_end  # non-overlapping, strictly increasing offsets
            prev_end = offset + width
            total = offset + width
        assert total <= spec.shelf_width_mm

    assert reading_order(layout) == [i for i in layout.order if i in placed]


@st.composite
def packing_instance(draw):
    n = draw(st.integers(min_value=0, max_value=30))
    volumes = []
    for i in range(n):
        volumes.append(
            make_volume(
                isbn13=isbn(i),
                height_mm=draw(st.floats(min_value=100, max_value=400)),
                spine_thickness_mm=draw(st.floats(min_value=3, max_value=120)),
            )
        )
    spec = ShelfSpec(
        shelf_count=draw(st.integers(min_value=1, max_value=6)),
        shelf_width_mm=draw(st.floats(min_value=50, max_value=900)),
        shelf_clearance_mm=draw(st.floats(min_value=100, max_value=400)),
    )
    return volumes, spec


class TestPackingProperties:
    @settings(max_examples=120, deadline=None)
    @given(packing_instance())
    def test_pack_invariants(self, instance):
        volumes, spec = instance
        vmap = volume_map(volumes)
        layout = pack([v.isbn13 for v in volumes], vmap, spec)
        check_layout_invariants(layout, vmap, spec)

    @settings(max_examples=60, deadline=None)
    @given(packing_instance(), st.integers(min_value=0, max_value=2**31 - 1))
    def test_move_closure(self, instance, seed):
        volumes, spec = instance
        if not volumes:
            return
        vmap = volume_map(volumes)
        layout = pack([v.isbn13 for v in volumes], vmap, spec)
        rng = random.Random(seed)
        for _ in range(5):
            i = rng.randrange(len(layout.order))
            j = rng.randrange(len(layout.order))
            layout = move(layout, i, j, vmap, spec)
            check_layout_invariants(layout, vmap, spec)
            assert layout.manual is True
