"""HTTP service and library manager orchestrating the full pipeline.

Each library lives in its own directory (records, enriched volumes, current
state) as inspectable text files.  Mutations are serialized per library
behind a lock and stamped with a monotonically increasing revision; the
scene is always re-derivable from the persisted order + strategy + spec, so
a restart reproduces it exactly.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Request, UploadFile
from fastapi.responses import JSONResponse, Response

from .facets import NormalizerConfig
from .ingest import IngestError, IngestReport, RawRecord, parse_goodreads_csv
from .metadata import (
    ConfigurationError,
    MetadataCache,
    MetadataProvider,
    ProviderConfig,
    cache_from_env,
    provider_from_env,
)
from .models import Volume
from .pipeline import build_volumes
from .shelf import (
    DEFAULT_STRATEGY,
    SceneLayout,
    ShelfSpec,
    SortStrategy,
    move as shelf_move,
    occupied_width_mm,
    pack,
    parse_strategy,
    resort,
    sort_volumes,
)
from .spinecolor import rgb_to_hex
from .visual import EncodingMode, PaletteTable, display_color, load_palettes, parse_encoding, render_svg

log = logging.getLogger(__name__)

DEFAULT_SPEC = ShelfSpec(shelf_count=5, shelf_width_mm=760.0, shelf_clearance_mm=300.0)
DEFAULT_ROW_CAP = 10_000


class UnknownLibrary(KeyError):
    pass


class StaleRevision(Exception):
    pass


class RowCapExceeded(Exception):
    pass


@dataclass
class LibraryState:
    library_id: str
    records: list[RawRecord]
    volumes: dict[str, Volume]
    layout: SceneLayout
    strategy: SortStrategy
    mode: EncodingMode
    spec: ShelfSpec
    ingest_report: IngestReport
    revision: int = 1


@dataclass
class LibraryManager:
    """Pipeline runner plus per-library persistence and write serialization."""

    data_dir: Path
    provider: MetadataProvider | None = None
    provider_config: ProviderConfig | None = None
    cache: MetadataCache | None = None
    normalizer_config: NormalizerConfig | None = None
    llm_client: object | None = None
    palettes: PaletteTable = field(default_factory=load_palettes)
    row_cap: int = DEFAULT_ROW_CAP

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._states: dict[str, LibraryState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- locking ---------------------------------------------------------

    def lock(self, library_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(library_id, threading.Lock())

    # -- pipeline --------------------------------------------------------

    def _resolve_provider(self) -> MetadataProvider:
        if self.provider is None:
            self.provider = provider_from_env()
        return self.provider

    def create_library(self, csv_bytes: bytes) -> LibraryState:
        records, report = parse_goodreads_csv(csv_bytes)
        total_rows = report.accepted + len(report.rejected) + report.deduplicated
        if total_rows > self.row_cap:
            raise RowCapExceeded(f"{total_rows} rows exceeds the {self.row_cap} row cap")
        provider = self._resolve_provider()
        cache = self.cache if self.cache is not None else cache_from_env()
        volumes, _failures = build_volumes(
            records,
            provider,
            provider_config=self.provider_config,
            cache=cache,
            normalizer_config=self.normalizer_config,
            llm_client=self.llm_client,
        )
        ordered = sort_volumes(list(volumes.values()), DEFAULT_STRATEGY)
        layout = pack([v.isbn13 for v in ordered], volumes, DEFAULT_SPEC)
        state = LibraryState(
            library_id=uuid.uuid4().hex[:12],
            records=records,
            volumes=volumes,
            layout=layout,
            strategy=DEFAULT_STRATEGY,
            mode=EncodingMode.ORIGINAL,
            spec=DEFAULT_SPEC,
            ingest_report=report,
        )
        self._persist_full(state)
        self._states[state.library_id] = state
        return state

    # -- persistence -----------------------------------------------------

    def _library_dir(self, library_id: str) -> Path:
        return self.data_dir / library_id

    def _persist_full(self, state: LibraryState):
        lib_dir = self._library_dir(state.library_id)
        lib_dir.mkdir(parents=True, exist_ok=True)
        with (lib_dir / "records.jsonl").open("w", encoding="utf-8") as fh:
            for record in state.records:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
        with (lib_dir / "volumes.jsonl").open("w", encoding="utf-8") as fh:
            for volume in state.volumes.values():
                fh.write(json.dumps(volume.to_dict(), sort_keys=True) + "\n")
        self._persist_state(state)

    def _persist_state(self, state: LibraryState):
        lib_dir = self._library_dir(state.library_id)
        payload = {
            "library_id": state.library_id,
            "revision": state.revision,
            "order": list(state.layout.order),
            "manual": state.layout.manual,
            "strategy": state.strategy.serialize(),
            "mode": state.mode.value,
            "spec": state.spec.to_dict(),
            "ingest_report": state.ingest_report.to_dict(),
        }
        tmp = lib_dir / "state.json.tmp"
        tmp.write_text(json.dumps(payload, indent=1, sort_keys=True), encoding="utf-8")
        os.replace(tmp, lib_dir / "state.json")

    def _load(self, library_id: str) -> LibraryState:
        lib_dir = self._library_dir(library_id)
        state_path = lib_dir / "state.json"
        if not state_path.exists():
            raise UnknownLibrary(library_id)
        payload = json.loads(state_path.read_text(encoding="utf-8"))
        records = [
            RawRecord.from_dict(json.loads(line))
            for line in (lib_dir / "records.jsonl").read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        volumes: dict[str, Volume] = {}
        for line in (lib_dir / "volumes.jsonl").read_text(encoding="utf-8").splitlines():
            if line.strip():
                volume = Volume.from_dict(json.loads(line))
                volumes[volume.isbn13] = volume
        spec = ShelfSpec.from_dict(payload["spec"])
        packed = pack(payload["order"], volumes, spec)
        layout = SceneLayout(packed.order, packed.placements, packed.overflow, manual=payload["manual"])
        return LibraryState(
            library_id=library_id,
            records=records,
            volumes=volumes,
            layout=layout,
            strategy=parse_strategy(payload["strategy"]),
            mode=EncodingMode(payload["mode"]),
            spec=spec,
            ingest_report=IngestReport.from_dict(payload["ingest_report"]),
            revision=payload["revision"],
        )

    def get(self, library_id: str) -> LibraryState:
        state = self._states.get(library_id)
        if state is None:
            state = self._load(library_id)
            self._states[library_id] = state
        return state

    # -- operations ------------------------------------------------------

    def _update_scene_locked(
        self,
        state: LibraryState,
        sort: str | None,
        encoding: str | None,
        shelves: int | None,
        width_mm: float | None,
        clearance_mm: float | None,
    ) -> bool:
        # validate everything before touching state, so a 422 mutates nothing
        new_spec = None
        if shelves is not None or width_mm is not None or clearance_mm is not None:
            new_spec = ShelfSpec(
                shelf_count=shelves if shelves is not None else state.spec.shelf_count,
                shelf_width_mm=width_mm if width_mm is not None else state.spec.shelf_width_mm,
                shelf_clearance_mm=(
                    clearance_mm if clearance_mm is not None else state.spec.shelf_clearance_mm
                ),
            )
        new_strategy = parse_strategy(sort) if sort is not None else None
        new_mode = parse_encoding(encoding) if encoding is not None else None

        discarded = False
        if new_spec is not None:
            was_manual = state.layout.manual
            packed = pack(state.layout.order, state.volumes, new_spec)
            state.spec = new_spec
            state.layout = SceneLayout(packed.order, packed.placements, packed.overflow, manual=was_manual)
        if new_strategy is not None:
            discarded = state.layout.manual
            state.strategy = new_strategy
            state.layout = resort(state.layout, new_strategy, state.volumes, state.spec)
        if new_mode is not None:
            state.mode = new_mode
        if new_spec is not None or new_strategy is not None or new_mode is not None:
            state.revision += 1
            self._persist_state(state)
        return discarded

    def update_scene(
        self,
        library_id: str,
        sort: str | None = None,
        encoding: str | None = None,
        shelves: int | None = None,
        width_mm: float | None = None,
        clearance_mm: float | None = None,
    ) -> tuple[LibraryState, bool]:
        """Apply any supplied parameters; returns the state and whether a
        manual order was discarded by a re-sort.  Omitted parameters keep
        their current values; invalid ones raise without mutating anything.
        """
        with self.lock(library_id):
            state = self.get(library_id)
            discarded = self._update_scene_locked(state, sort, encoding, shelves, width_mm, clearance_mm)
            return state, discarded

    def scene_payload(
        self,
        library_id: str,
        sort: str | None = None,
        encoding: str | None = None,
        shelves: int | None = None,
        width_mm: float | None = None,
        clearance_mm: float | None = None,
    ) -> dict:
        """update_scene plus response serialization under one lock hold, so
        concurrent mutations can never produce a torn scene."""
        with self.lock(library_id):
            state = self.get(library_id)
            discarded = self._update_scene_locked(state, sort, encoding, shelves, width_mm, clearance_mm)
            return self.scene_response(state, manual_discarded=discarded)

    def move(self, library_id: str, from_index: int, to_index: int, revision: int | None = None) -> LibraryState:
        with self.lock(library_id):
            state = self.get(library_id)
            self._move_locked(state, from_index, to_index, revision)
            return state

    def _move_locked(self, state: LibraryState, from_index: int, to_index: int, revision: int | None):
        if revision is not None and revision != state.revision:
            raise StaleRevision(f"request revision {revision}, state revision {state.revision}")
        state.layout = shelf_move(state.layout, from_index, to_index, state.volumes, state.spec)
        state.revision += 1
        self._persist_state(state)

    def move_payload(self, library_id: str, from_index: int, to_index: int, revision: int | None = None) -> dict:
        with self.lock(library_id):
            state = self.get(library_id)
            self._move_locked(state, from_index, to_index, revision)
            return self.scene_response(state)

    def detail(self, library_id: str, isbn13: str) -> dict:
        with self.lock(library_id):
            state = self.get(library_id)
            volume = state.volumes.get(isbn13)
            if volume is None:
                raise KeyError(isbn13)
            info = volume.to_dict()
            info["in_overflow"] = isbn13 in state.layout.overflow
            info["display_color"] = rgb_to_hex(display_color(volume, state.mode, self.palettes))
            return info

    def export_svg(self, library_id: str, labels: bool = True) -> str:
        with self.lock(library_id):
            state = self.get(library_id)
            return render_svg(state.layout, state.volumes, state.spec, state.mode, self.palettes, labels=labels)

    def scene_response(self, state: LibraryState, manual_discarded: bool = False) -> dict:
        placements = []
        ordered = sorted(
            state.layout.placements.items(), key=lambda kv: (kv[1].shelf_index, kv[1].x_offset_mm)
        )
        for isbn13, placement in ordered:
            volume = state.volumes[isbn13]
            placements.append(
                {
                    "isbn13": isbn13,
                    "shelf_index": placement.shelf_index,
                    "x_offset_mm": placement.x_offset_mm,
                    "orientation": placement.orientation.value,
                    "occupied_width_mm": occupied_width_mm(volume, placement.orientation),
                    "height_mm": volume.height_mm,
                    "spine_thickness_mm": volume.spine_thickness_mm,
                    "title": volume.title,
                    "author": volume.author_display,
                    "display_color": rgb_to_hex(display_color(volume, state.mode, self.palettes)),
                }
            )
        overflow = [
            {
                "isbn13": isbn13,
                "title": state.volumes[isbn13].title,
                "author": state.volumes[isbn13].author_display,
                "display_color": rgb_to_hex(display_color(state.volumes[isbn13], state.mode, self.palettes)),
            }
            for isbn13 in state.layout.overflow
        ]
        return {
            "library_id": state.library_id,
            "revision": state.revision,
            "manual": state.layout.manual,
            "manual_discarded": manual_discarded,
            "strategy": state.strategy.serialize(),
            "encoding": state.mode.value,
            "spec": state.spec.to_dict(),
            "order": list(state.layout.order),
            "placements": placements,
            "overflow": overflow,
        }


def create_app(
    data_dir: str | Path | None = None,
    manager: LibraryManager | None = None,
    static_dir: str | Path | None = None,
    **manager_kwargs,
):
    """Build the FastAPI app over a LibraryManager.

    ``manager`` wins when supplied; otherwise one is constructed over
    ``data_dir`` (default: LIBRARYLENS_DATA_DIR or ./librarylens_data).
    """
    if manager is None:
        data_dir = data_dir or os.environ.get("LIBRARYLENS_DATA_DIR", "librarylens_data")
        manager = LibraryManager(data_dir=Path(data_dir), **manager_kwargs)

    app = FastAPI(title="librarylens")
    app.state.manager = manager

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": message})

    @app.post("/api/library", status_code=201)
    async def upload_library(file: UploadFile = File(...)):
        data = await file.read()
        try:
            state = manager.create_library(data)
        except IngestError as exc:
            return error(400, str(exc))
        except RowCapExceeded as exc:
            return error(413, str(exc))
        except ConfigurationError as exc:
            return error(502, str(exc))
        return {"library_id": state.library_id, "ingest_report": state.ingest_report.to_dict()}

    @app.get("/api/library/{library_id}/scene")
    def get_scene(
        library_id: str,
        sort: str | None = None,
        encoding: str | None = None,
        shelves: int | None = None,
        width_mm: float | None = None,
        clearance_mm: float | None = None,
    ):
        try:
            return manager.scene_payload(
                library_id, sort=sort, encoding=encoding, shelves=shelves,
                width_mm=width_mm, clearance_mm=clearance_mm,
            )
        except UnknownLibrary:
            return error(404, "unknown library")
        except ValueError as exc:
            return error(422, str(exc))

    @app.post("/api/library/{library_id}/move")
    async def post_move(library_id: str, request: Request):
        try:
            payload = await request.json()
        except Exception:
            return error(422, "body must be JSON")
        if not isinstance(payload, dict):
            return error(422, "body must be a JSON object")
        from_index, to_index = payload.get("from"), payload.get("to")
        revision = payload.get("revision")
        if not isinstance(from_index, int) or not isinstance(to_index, int):
            return error(422, "from and to must be integers")
        if revision is not None and not isinstance(revision, int):
            return error(422, "revision must be an integer")
        try:
            return manager.move_payload(library_id, from_index, to_index, revision=revision)
        except UnknownLibrary:
            return error(404, "unknown library")
        except StaleRevision as exc:
            return error(409, str(exc))
        except IndexError as exc:
            return error(422, str(exc))

    @app.get("/api/library/{library_id}/book/{isbn13}")
    def get_book(library_id: str, isbn13: str):
        try:
            return manager.detail(library_id, isbn13)
        except UnknownLibrary:
            return error(404, "unknown library")
        except KeyError:
            return error(404, "unknown isbn")

    @app.get("/api/library/{library_id}/export.svg")
    def export_svg(library_id: str, labels: bool = True):
        try:
            svg = manager.export_svg(library_id, labels=labels)
        except UnknownLibrary:
            return error(404, "unknown library")
        return Response(content=svg, media_type="image/svg+xml")

    static_dir = static_dir or os.environ.get("LIBRARYLENS_WEBUI_DIR")
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="webui")

    return app
