"""Parse Goodreads library CSV exports and validate ISBN identifiers."""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass, field


class IngestError(Exception):
    """Fatal parse failure: undecodable input or unusable header."""


class Binding(enum.Enum):
    HARDCOVER = "Hardcover"
    PAPERBACK = "Paperback"
    MASS_MARKET = "MassMarket"
    EBOOK = "Ebook"
    AUDIO = "Audio"
    UNKNOWN = "Unknown"


# Case-insensitive aliases seen in real exports; anything else maps to UNKNOWN.
_BINDING_ALIASES = {
    "hardcover": Binding.HARDCOVER,
    "hardback": Binding.HARDCOVER,
    "library binding": Binding.HARDCOVER,
    "paperback": Binding.PAPERBACK,
    "softcover": Binding.PAPERBACK,
    "trade paperback": Binding.PAPERBACK,
    "mass market paperback": Binding.MASS_MARKET,
    "massmarket": Binding.MASS_MARKET,
    "mass market": Binding.MASS_MARKET,
    "ebook": Binding.EBOOK,
    "kindle edition": Binding.EBOOK,
    "kindle": Binding.EBOOK,
    "nook": Binding.EBOOK,
    "audiobook": Binding.AUDIO,
    "audio cd": Binding.AUDIO,
    "audible audio": Binding.AUDIO,
    "audio": Binding.AUDIO,
}


def parse_binding(text: str) -> Binding:
    return _BINDING_ALIASES.get(text.strip().lower(), Binding.UNKNOWN)


@dataclass(frozen=True)
class RawRecord:
    """One accepted row of a library export, keyed by canonical ISBN-13.

    ``title`` is the title with any trailing series marker stripped; the
    series, when present, lives in ``series_name``/``series_index``.
    """

    isbn13: str
    title: str
    author_display: str
    author_lf: str
    my_rating: int = 0
    average_rating: float = 0.0
    publisher: str = ""
    binding: Binding = Binding.UNKNOWN
    page_count: int = 0
    year_published: int | None = None
    series_name: str | None = None
    series_index: float | None = None

    def to_dict(self) -> dict:
        d = {
            "isbn13": self.isbn13,
            "title": self.title,
            "author_display": self.author_display,
            "author_lf": self.author_lf,
            "my_rating": self.my_rating,
            "average_rating": self.average_rating,
            "publisher": self.publisher,
            "binding": self.binding.value,
            "page_count": self.page_count,
            "year_published": self.year_published,
            "series_name": self.series_name,
            "series_index": self.series_index,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RawRecord":
        return cls(
            isbn13=d["isbn13"],
            title=d["title"],
            author_display=d["author_display"],
            author_lf=d["author_lf"],
            my_rating=d.get("my_rating", 0),
            average_rating=d.get("average_rating", 0.0),
            publisher=d.get("publisher", ""),
            binding=Binding(d.get("binding", "Unknown")),
            page_count=d.get("page_count", 0),
            year_published=d.get("year_published"),
            series_name=d.get("series_name"),
            series_index=d.get("series_index"),
        )


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    deduplicated: int = 0

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [[row, reason] for row, reason in self.rejected],
            "deduplicated": self.deduplicated,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IngestReport":
        return cls(
            accepted=d.get("accepted", 0),
            rejected=[(int(row), reason) for row, reason in d.get("rejected", [])],
            deduplicated=d.get("deduplicated", 0),
        )


def validate_isbn13(s: str) -> bool:
    """True iff ``s`` is exactly 13 digits with a valid weighted check digit."""
    if len(s) != 13 or not s.isdigit():
        return False
    total = sum(int(c) * (3 if i % 2 else 1) for i, c in enumerate(s[:12]))
    check = (10 - total % 10) % 10
    return check == int(s[12])


def validate_isbn10(s: str) -> bool:
    """ISBN-10 check: weights 10..1 mod 11, final 'X' counting as 10."""
    if len(s) != 10 or not s[:9].isdigit():
        return False
    last = s[9]
    if last not in "0123456789Xx":
        return False
    total = sum(int(c) * (10 - i) for i, c in enumerate(s[:9]))
    total += 10 if last in "Xx" else int(last)
    return total % 11 == 0


def isbn10_to_isbn13(s: str) -> str:
    """Convert a valid ISBN-10 to its 978-prefixed ISBN-13 equivalent."""
    if not validate_isbn10(s):
        raise ValueError(f"invalid ISBN-10: {s!r}")
    stem = "978" + s[:9]
    total = sum(int(c) * (3 if i % 2 else 1) for i, c in enumerate(stem))
    check = (10 - total % 10) % 10
    return stem + str(check)


_SERIES_RE = re.compile(r"^(?P<title>.*\S)\s*\((?P<series>.+?),?\s+#(?P<index>\d+(?:\.\d+)?)\)\s*$")


def parse_series_from_title(title: str) -> tuple[str, str | None, float | None]:
    """Split a trailing "(Series, #n)" or "(Series #n)" marker off a title."""
    m = _SERIES_RE.match(title)
    if not m:
        return title, None, None
    return m.group("title"), m.group("series"), float(m.group("index"))


def _strip_isbn_cell(cell: str) -> str:
    """Goodreads wraps ISBN cells as ``="9780..."``; accept bare digits too."""
    cell = cell.strip()
    if cell.startswith('="') and cell.endswith('"'):
        cell = cell[2:-1]
    elif cell.startswith("="):
        cell = cell[1:].strip('"')
    return cell.replace("-", "").strip()


def _resolve_isbn13(isbn13_cell: str, isbn_cell: str) -> tuple[str | None, str | None]:
    """Pick the row's canonical ISBN-13, or a rejection reason.

    Prefers the ISBN13 column; falls back to converting the ISBN column.
    """
    c13 = _strip_isbn_cell(isbn13_cell)
    c10 = _strip_isbn_cell(isbn_cell)
    if c13 and validate_isbn13(c13):
        return c13, None
    if c10:
        if validate_isbn10(c10):
            return isbn10_to_isbn13(c10), None
        if validate_isbn13(c10):
            return c10, None
    if not c13 and not c10:
        return None, "missing isbn"
    return None, "checksum"


def _parse_int(cell: str | None, default: int = 0) -> int:
    try:
        v = int(float(cell))
    except (TypeError, ValueError):
        return default
    return v


def _parse_float(cell: str | None, default: float = 0.0) -> float:
    try:
        return float(cell)
    except (TypeError, ValueError):
        return default


def _author_lf(row: dict, author: str) -> str:
    lf = (row.get("Author l-f") or "").strip()
    if lf:
        return lf
    parts = author.split()
    if len(parts) >= 2:
        return f"{parts[-1]}, {' '.join(parts[:-1])}"
    return author


def parse_goodreads_csv(data: bytes) -> tuple[list[RawRecord], IngestReport]:
    """Parse an exported library CSV into validated records plus a report.

    Per-row failures are non-fatal: rows with no usable ISBN are rejected
    with a reason, later duplicates of an ISBN-13 are counted as
    deduplicated, and the first occurrence wins.  Row numbers in the report
    are 1-based over data rows.

    Raises IngestError when the bytes do not decode as UTF-8 text or the
    header lacks a Title column or both ISBN columns.
    """
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise IngestError(f"input is not UTF-8 text: {exc}") from exc

    reader = csv.DictReader(io.StringIO(text, newline=""))
    header = reader.fieldnames or []
    if "Title" not in header:
        raise IngestError("malformed header: missing Title column")
    if "ISBN13" not in header and "ISBN" not in header:
        raise IngestError("malformed header: missing both ISBN columns")

    records: list[RawRecord] = []
    report = IngestReport()
    seen: set[str] = set()
    for row_number, row in enumerate(reader, start=1):
        isbn13, reason = _resolve_isbn13(row.get("ISBN13") or "", row.get("ISBN") or "")
        if isbn13 is None:
            report.rejected.append((row_number, reason or "missing isbn"))
            continue
        if isbn13 in seen:
            report.deduplicated += 1
            continue
        seen.add(isbn13)

        title, series_name, series_index = parse_series_from_title((row.get("Title") or "").strip())
        author = (row.get("Author") or "").strip()
        records.append(
            RawRecord(
                isbn13=isbn13,
                title=title,
                author_display=author,
                author_lf=_author_lf(row, author),
                my_rating=max(0, min(5, _parse_int(row.get("My Rating")))),
                average_rating=max(0.0, min(5.0, _parse_float(row.get("Average Rating")))),
                publisher=(row.get("Publisher") or "").strip(),
                binding=parse_binding(row.get("Binding") or ""),
                page_count=max(0, _parse_int(row.get("Number of Pages"))),
                year_published=_parse_int(row.get("Year Published"), default=0) or None,
                series_name=series_name,
                series_index=series_index,
            )
        )
    report.accepted = len(records)
    return records, report
