#!/usr/bin/env python3
"""Regenerate the bundled 135-book fixture (CSV export + provider records).

Everything is a pure function of the book index, so reruns are
byte-identical.  Run from the repo root:

    python3 tools/make_fixture.py
"""

from __future__ import annotations

import colorsys
import csv
import io
import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "librarylens" / "data" / "fixtures"

# (genre label, subject pool, count) -- seven genres, 135 books total
GENRE_PLAN = [
    ("Fantasy", ["Epic fantasy", "Fantasy fiction", "Magic", "Dragons"], 40),
    ("SciFi", ["Science Fiction", "Space opera", "Time travel"], 30),
    ("Dystopian", ["Dystopias", "Post-apocalyptic fiction"], 15),
    ("Mystery", ["Mystery fiction", "Detective stories"], 15),
    ("Horror", ["Horror tales", "Ghost stories"], 10),
    ("Romance", ["Romance fiction", "Love stories"], 10),
    ("Classics", ["Classic literature", "Classics"], 15),
]

AGE_SUBJECTS = {
    "Adult": [],
    "YoungAdult": ["Young Adult"],
    "MiddleGrade": ["Middle grade fiction"],
    "Children": ["Juvenile fiction"],
}
# Weighted toward YA/MG like a typical playtest profile.
AGE_CYCLE = ["Adult", "YoungAdult", "YoungAdult", "MiddleGrade", "Adult", "YoungAdult", "MiddleGrade", "Children"]

ADJECTIVES = ["Silent", "Crimson", "Hollow", "Gilded", "Last", "Burning", "Fallen", "Iron", "Shattered", "Winter",
              "Emerald", "Forgotten", "Wandering", "Pale", "Thorned"]
NOUNS = ["Crown", "River", "Empire", "Garden", "Archive", "Voyage", "Cipher", "Orchard", "Citadel", "Harbor",
         "Lantern", "Covenant", "Meridian", "Tempest", "Reliquary"]
SERIES = ["The Ashfall Cycle", "Starward Saga", "The Greywater Files", "Emberlight Trilogy", "The Hollow Realms"]
FIRST = ["Avery", "Brennan", "Carmen", "Dana", "Elliot", "Farah", "Gideon", "Harper", "Imani", "Jonas",
         "Katya", "Lionel", "Mira", "Noor", "Otto"]
LAST = ["Ashford", "Bellweather", "Castellan", "Droste", "Ellison", "Fairbairn", "Greaves", "Holloway", "Iverson",
        "Jessup", "Ketterley", "Larkspur", "Moreno", "Nightingale", "Okafor"]
PUBLISHERS = ["Northlight Press", "Harrow & Vane", "Bluewater Books", "Foxglove House", "Meridian Editions"]
BINDINGS = ["Paperback", "Hardcover", "Mass Market Paperback", "Hardcover", "Paperback", "Kindle Edition",
            "Paperback", "Hardcover", "Audible Audio", "Board Book"]


def isbn13_for(i: int) -> str:
    stem = f"97819{i:07d}"
    total = sum(int(c) * (3 if j % 2 else 1) for j, c in enumerate(stem))
    return stem + str((10 - total % 10) % 10)


def isbn10_from_13(isbn13: str) -> str:
    stem = isbn13[3:12]
    total = sum(int(c) * (10 - i) for i, c in enumerate(stem))
    rem = (11 - total % 11) % 11
    return stem + ("X" if rem == 10 else str(rem))


def cover_rgb(i: int) -> tuple[int, int, int]:
    r, g, b = colorsys.hsv_to_rgb((i * 360 / 135) / 360.0, 0.65, 0.82)
    return (round(r * 255), round(g * 255), round(b * 255))


def book_plan():
    i = 0
    for genre, subject_pool, count in GENRE_PLAN:
        for k in range(count):
            yield i, genre, subject_pool, k
            i += 1


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rows = []
    fixture: dict[str, dict] = {}

    for i, genre, subject_pool, k in book_plan():
        isbn13 = isbn13_for(i)
        adjective = ADJECTIVES[(i * 7 + k) % len(ADJECTIVES)]
        noun = NOUNS[(i * 11 + 3 * k) % len(NOUNS)]
        base_title = f"The {adjective} {noun}"
        series_name = None
        series_index = None
        if i % 3 == 0:
            series_name = SERIES[(i // 3) % len(SERIES)]
            series_index = (i % 4) + 1
            title = f"{base_title} ({series_name}, #{series_index})"
        else:
            title = base_title
        first = FIRST[(i * 5) % len(FIRST)]
        last = LAST[(i * 13 + k) % len(LAST)]
        author = f"{first} {last}"
        author_lf = f"{last}, {first}"
        pages = 150 + (i * 37) % 700
        binding = BINDINGS[i % len(BINDINGS)]
        avg_rating = 0.0 if i % 67 == 33 else round(2.8 + ((i * 29) % 200) / 100.0, 2)
        my_rating = (i * 3) % 6
        year = 1958 + (i * 17) % 66
        publisher = PUBLISHERS[i % len(PUBLISHERS)]

        # a handful of rows carry only the ISBN-10 column
        if i % 27 == 5:
            isbn_cell, isbn13_cell = f'="{isbn10_from_13(isbn13)}"', '=""'
        else:
            isbn_cell, isbn13_cell = '=""', f'="{isbn13}"'

        rows.append([
            title, author, author_lf, isbn_cell, isbn13_cell, str(my_rating), f"{avg_rating:.2f}",
            publisher, binding, str(pages), str(year),
        ])

        age = AGE_CYCLE[i % len(AGE_CYCLE)]
        subjects = [subject_pool[i % len(subject_pool)], subject_pool[(i + 1) % len(subject_pool)]]
        subjects += AGE_SUBJECTS[age]

        record: dict = {
            "title": base_title,
            "authors": [author],
            "pages": pages,
            "binding": binding,
            "subjects": subjects,
        }
        # most books have tracked dimensions; every 9th exercises estimation
        if i % 9 != 4:
            height = {"Hardcover": 236.0, "Paperback": 209.0, "Mass Market Paperback": 174.0}.get(binding, 204.0)
            record["dimensions"] = {
                "height_mm": height + (i % 5) * 2.0,
                "thickness_mm": round(10.0 + (i * 19) % 300 / 10.0, 1),
            }
        # every 45th book has no cover; spine falls back to neutral gray
        if i % 45 != 17:
            record["image"] = f"fixture://{isbn13}"
            record["cover_rgb"] = list(cover_rgb(i))
        if avg_rating == 0.0:
            record["average_rating"] = 3.9
        fixture[isbn13] = record

    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(["Title", "Author", "Author l-f", "ISBN", "ISBN13", "My Rating", "Average Rating",
                     "Publisher", "Binding", "Number of Pages", "Year Published"])
    writer.writerows(rows)

    (OUT_DIR / "library_135.csv").write_text(buf.getvalue(), encoding="utf-8")
    (OUT_DIR / "metadata_fixture.json").write_text(
        json.dumps(fixture, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(rows)} rows and {len(fixture)} fixture records to {OUT_DIR}")


if __name__ == "__main__":
    main()
