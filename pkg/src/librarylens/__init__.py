"""LibraryLens: pack a Goodreads library export onto interactive virtual shelves."""

__version__ = "0.1.0"
