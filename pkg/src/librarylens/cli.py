"""Command line mirror of the HTTP API for headless use."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .ingest import IngestError
from .metadata import ConfigurationError
from .service import LibraryManager, RowCapExceeded, UnknownLibrary


def default_data_dir() -> Path:
    return Path(os.environ.get("LIBRARYLENS_DATA_DIR", "librarylens_data"))


def cmd_ingest(args) -> int:
    manager = LibraryManager(data_dir=args.data_dir)
    try:
        state = manager.create_library(Path(args.csv).read_bytes())
    except (IngestError, RowCapExceeded, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"library_id": state.library_id, "ingest_report": state.ingest_report.to_dict()}, indent=1))
    return 0


def cmd_render(args) -> int:
    manager = LibraryManager(data_dir=args.data_dir)
    try:
        state, discarded = manager.update_scene(
            args.library,
            sort=args.sort,
            encoding=args.encoding,
            shelves=args.shelves,
            width_mm=args.width_mm,
            clearance_mm=args.clearance_mm,
        )
    except UnknownLibrary:
        print(f"error: unknown library {args.library!r}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if discarded:
        print("note: manual edits were discarded by the re-sort", file=sys.stderr)
    svg = manager.export_svg(state.library_id, labels=not args.no_labels)
    out = Path(args.out)
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out} ({len(state.layout.placements)} placed, {len(state.layout.overflow)} overflow)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, static_dir=args.webui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="librarylens", description=__doc__)
    parser.add_argument("--data-dir", type=Path, default=default_data_dir(), help="library storage directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest a library CSV export and build the library")
    p_ingest.add_argument("csv", help="path to the exported CSV")
    p_ingest.set_defaults(func=cmd_ingest)

    p_render = sub.add_parser("render", help="render a library's current scene to an SVG blueprint")
    p_render.add_argument("library", help="library id returned by ingest")
    p_render.add_argument("--sort", help='strategy, e.g. "genre,-rating,alpha"')
    p_render.add_argument("--encoding", help="original | age | genre | rating")
    p_render.add_argument("--shelves", type=int)
    p_render.add_argument("--width-mm", type=float, dest="width_mm")
    p_render.add_argument("--clearance-mm", type=float, dest="clearance_mm")
    p_render.add_argument("--out", default="shelves.svg", help="output SVG path")
    p_render.add_argument("--no-labels", action="store_true", help="omit per-book title labels")
    p_render.set_defaults(func=cmd_render)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--webui", help="directory with the built web UI bundle to serve at /")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
