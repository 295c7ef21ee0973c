"""HTTP facade over project sessions for the web UI and scripts.

All mutation goes through POST /sessions/{sid}/transform (plus undo/redo),
which funnels into the transformation engine and appends to the project's
log file; GET endpoints never touch the log. Mutations on one session are
serialized by a per-session lock, so responses reflect exactly the log
order. Error mapping: 404 unknown project/session, 409 a concurrent writer
holds the project, 422 anything the engine rejects (the detail carries the
engine's message).

Configuration comes from the CLI flags or environment (project root
directory, SPARQL timeout, session idle timeout); see ``create_app``.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query, Response
from pydantic import BaseModel

from . import engine
from .errors import (
    FacetprepError,
    HttpStatusError,
    MissingFile,
    NetworkError,
    ProjectLocked,
    QueryTimeout,
)
from .intervals import spec_to_params
from .model import Dataset, distinct_values
from .project import (
    FAVOURITES_FILE,
    Project,
    StoreSession,
    atomic_write,
    load_favourites_file,
    project_folder,
    read_project,
    save_project,
)
from .rdf_export import export_rdf
from .sparql import Favourite, SparqlSource, execute_select, favourites_add, favourites_list, favourites_remove
from .tabular import COMMA, TAB, serialize_table

EXPORT_MEDIA_TYPES = {
    "ntriples": "application/n-triples",
    "turtle": "text/turtle",
    "csv": "text/csv",
    "tsv": "text/tab-separated-values",
}


class CreateProjectBody(BaseModel):
    name: str
    kind: str
    source: dict


class RefreshBody(BaseModel):
    source: dict | None = None


class TransformBody(BaseModel):
    seq: int | None = None
    type: str
    params: dict = {}


class FavouriteBody(BaseModel):
    label: str
    endpoint_url: str
    query: str


class PreviewBody(BaseModel):
    endpoint_url: str
    query: str
    limit: int = 50


class _SessionEntry:
    def __init__(self, store: StoreSession):
        self.store = store
        self.lock = threading.Lock()
        self.last_access = time.monotonic()


def _facet_payload(dataset: Dataset) -> list[dict]:
    out = []
    for facet in dataset.facets:
        out.append(
            {
                "name": facet.name,
                "type": facet.ftype,
                "visible": facet.visible,
                "order": facet.order_index,
                "identifier": facet.name == dataset.identifier_facet,
                "derivation": facet.derivation,
                "intervals": (
                    None
                    if facet.intervals is None
                    else [spec_to_params(s) for s in facet.intervals]
                ),
                "tree": facet.term_tree().to_payload(),
            }
        )
    return out


def _outcome_payload(outcome: engine.ApplyOutcome) -> dict:
    return {"status": outcome.status, "reason": outcome.reason}


def create_app(
    root: Path | str,
    sparql_timeout: float = 30.0,
    session_idle_timeout: float = 3600.0,
    ui_dir: Path | str | None = None,
) -> FastAPI:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="facetprep service")

    sessions: dict[str, _SessionEntry] = {}
    registry_lock = threading.Lock()
    favourites_path = root / FAVOURITES_FILE
    favourites_lock = threading.Lock()

    def _http_error(exc: FacetprepError) -> HTTPException:
        if isinstance(exc, ProjectLocked):
            return HTTPException(409, str(exc))
        if isinstance(exc, MissingFile):
            return HTTPException(404, str(exc))
        if isinstance(exc, (NetworkError, QueryTimeout, HttpStatusError)):
            return HTTPException(502, str(exc))
        return HTTPException(422, str(exc))

    def _sweep_idle() -> None:
        deadline = time.monotonic() - session_idle_timeout
        with registry_lock:
            stale = [sid for sid, e in sessions.items() if e.last_access < deadline]
            for sid in stale:
                sessions.pop(sid).store.close()

    def _entry(sid: str) -> _SessionEntry:
        _sweep_idle()
        entry = sessions.get(sid)
        if entry is None:
            raise HTTPException(404, "unknown session")
        entry.last_access = time.monotonic()
        return entry

    def _entry_for_project(name: str) -> _SessionEntry:
        _sweep_idle()
        for entry in sessions.values():
            if entry.store.project.name == name:
                entry.last_access = time.monotonic()
                return entry
        raise HTTPException(404, "project has no open session")

    # -- projects

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProjectBody):
        folder = project_folder(root, body.name)
        if folder.exists():
            raise HTTPException(409, f"project {body.name!r} already exists")
        try:
            save_project(Project(name=body.name, kind=body.kind, source=body.source), root)
        except FacetprepError as exc:
            raise _http_error(exc) from None
        return {"name": body.name, "kind": body.kind}

    @app.get("/projects")
    def list_projects():
        out = []
        for folder in sorted(root.iterdir()) if root.is_dir() else []:
            if not (folder / "project.json").is_file():
                continue
            try:
                project = read_project(folder)
            except FacetprepError:
                continue
            out.append({"name": project.name, "kind": project.kind, "log_length": len(project.log)})
        return out

    @app.post("/projects/{name}/open")
    def open_project(name: str):
        folder = project_folder(root, name)
        if not folder.is_dir():
            raise HTTPException(404, f"unknown project {name!r}")
        try:
            store = StoreSession.open(folder, sparql_timeout=sparql_timeout)
        except FacetprepError as exc:
            raise _http_error(exc) from None
        sid = secrets.token_hex(16)
        with registry_lock:
            sessions[sid] = _SessionEntry(store)
        return {
            "session_id": sid,
            "project": {"name": store.project.name, "kind": store.project.kind},
            "outcomes": [_outcome_payload(o) for o in store.outcomes_on_open],
            "facets": _facet_payload(store.session.dataset),
            "row_count": len(store.session.dataset.rows),
        }

    @app.post("/projects/{name}/save")
    def save_open_project(name: str):
        entry = _entry_for_project(name)
        with entry.lock:
            entry.store.save()
        return {"saved": True}

    @app.post("/projects/{name}/refresh")
    def refresh_project(name: str, body: RefreshBody = Body(default=RefreshBody())):
        entry = _entry_for_project(name)
        with entry.lock:
            try:
                outcomes = entry.store.refresh(body.source)
            except FacetprepError as exc:
                raise _http_error(exc) from None
            return {
                "outcomes": [_outcome_payload(o) for o in outcomes],
                "facets": _facet_payload(entry.store.session.dataset),
                "row_count": len(entry.store.session.dataset.rows),
            }

    # -- session reads

    @app.get("/sessions/{sid}/facets")
    def get_facets(sid: str):
        entry = _entry(sid)
        dataset = entry.store.session.dataset
        return {
            "facets": _facet_payload(dataset),
            "identifier_facet": dataset.identifier_facet,
            "row_count": len(dataset.rows),
        }

    @app.get("/sessions/{sid}/facets/{facet}/values")
    def get_values(sid: str, facet: str):
        entry = _entry(sid)
        try:
            stats, missing = distinct_values(entry.store.session.dataset, facet)
        except FacetprepError as exc:
            raise _http_error(exc) from None
        return {
            "values": [{"value": s.value, "count": s.count} for s in stats],
            "missing": missing,
        }

    @app.get("/sessions/{sid}/rows")
    def get_rows(
        sid: str,
        filter: str | None = Query(default=None),
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=1, le=1000),
    ):
        entry = _entry(sid)
        dataset = entry.store.session.dataset
        rows = list(enumerate(dataset.rows))
        if filter:
            try:
                cond = engine.RowCondition.from_params(json.loads(filter))
                rows = [(i, r) for i, r in rows if engine.row_matches(dataset, r, cond)]
            except (json.JSONDecodeError, FacetprepError) as exc:
                raise HTTPException(422, f"bad filter: {exc}") from None
        page = rows[offset : offset + limit]
        return {
            "header": dataset.facet_names(),
            "rows": [{"index": i, "cells": list(r)} for i, r in page],
            "total": len(rows),
            "offset": offset,
        }

    @app.get("/sessions/{sid}/log")
    def get_log(sid: str):
        entry = _entry(sid)
        store = entry.store
        records = []
        for record, outcome in zip(store.records(), store.session.outcomes):
            records.append(
                {
                    "seq": record.seq,
                    "type": record.type,
                    "params": record.params,
                    "recorded_at": record.recorded_at,
                    "outcome": _outcome_payload(outcome),
                }
            )
        return {"records": records, "redo_depth": len(store.session.redo_stack)}

    @app.get("/sessions/{sid}/export")
    def export(sid: str, format: str = Query(...)):
        entry = _entry(sid)
        if format not in EXPORT_MEDIA_TYPES:
            raise HTTPException(422, f"unknown format {format!r}")
        dataset = entry.store.session.dataset
        try:
            if format == "ntriples":
                payload = export_rdf(dataset)[0]
            elif format == "turtle":
                payload = export_rdf(dataset)[1]
            else:
                payload = serialize_table(dataset, COMMA if format == "csv" else TAB)
        except FacetprepError as exc:
            raise _http_error(exc) from None
        suffix = {"ntriples": "nt", "turtle": "ttl", "csv": "csv", "tsv": "tsv"}[format]
        return Response(
            content=payload,
            media_type=EXPORT_MEDIA_TYPES[format],
            headers={
                "Content-Disposition": f'attachment; filename="{entry.store.project.name}.{suffix}"'
            },
        )

    # -- session mutations

    @app.post("/sessions/{sid}/transform")
    def transform(sid: str, body: TransformBody):
        entry = _entry(sid)
        with entry.lock:
            store = entry.store
            next_seq = len(store.session.applied) + 1
            if body.seq is not None and body.seq != next_seq:
                raise HTTPException(422, f"seq {body.seq} out of order, expected {next_seq}")
            try:
                t = engine.from_params(body.type, body.params)
                outcome = store.apply(t)
            except FacetprepError as exc:
                raise _http_error(exc) from None
            record = store.records()[-1]
            return {
                "outcome": _outcome_payload(outcome),
                "record": {
                    "seq": record.seq,
                    "type": record.type,
                    "params": record.params,
                    "recorded_at": record.recorded_at,
                },
                "facets": _facet_payload(store.session.dataset),
                "row_count": len(store.session.dataset.rows),
            }

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str):
        entry = _entry(sid)
        with entry.lock:
            try:
                entry.store.undo()
            except FacetprepError as exc:
                raise _http_error(exc) from None
            return {
                "facets": _facet_payload(entry.store.session.dataset),
                "row_count": len(entry.store.session.dataset.rows),
            }

    @app.post("/sessions/{sid}/redo")
    def redo(sid: str):
        entry = _entry(sid)
        with entry.lock:
            try:
                entry.store.redo()
            except FacetprepError as exc:
                raise _http_error(exc) from None
            return {
                "facets": _facet_payload(entry.store.session.dataset),
                "row_count": len(entry.store.session.dataset.rows),
            }

    @app.delete("/sessions/{sid}")
    def close_session(sid: str):
        with registry_lock:
            entry = sessions.pop(sid, None)
        if entry is None:
            raise HTTPException(404, "unknown session")
        entry.store.close()
        return {"closed": True}

    # -- favourites (workbench level, stored at the project root)

    def _favourites() -> list[Favourite]:
        return load_favourites_file(favourites_path)

    @app.get("/favourites")
    def get_favourites():
        return [
            {"label": f.label, "endpoint_url": f.source.endpoint_url, "query": f.source.query}
            for f in favourites_list(_favourites())
        ]

    @app.post("/favourites", status_code=201)
    def add_favourite(body: FavouriteBody):
        with favourites_lock:
            try:
                store = favourites_add(
                    _favourites(), Favourite(body.label, SparqlSource(body.endpoint_url, body.query))
                )
            except FacetprepError as exc:
                raise _http_error(exc) from None
            payload = [
                {"label": f.label, "endpoint_url": f.source.endpoint_url, "query": f.source.query}
                for f in store
            ]
            atomic_write(favourites_path, (json.dumps(payload, indent=2) + "\n").encode())
        return {"label": body.label}

    @app.delete("/favourites/{label}")
    def delete_favourite(label: str):
        with favourites_lock:
            try:
                store = favourites_remove(_favourites(), label)
            except FacetprepError as exc:
                raise _http_error(exc) from None
            payload = [
                {"label": f.label, "endpoint_url": f.source.endpoint_url, "query": f.source.query}
                for f in store
            ]
            atomic_write(favourites_path, (json.dumps(payload, indent=2) + "\n").encode())
        return {"removed": label}

    # -- dry runs backing the editor dialogs

    @app.post("/intervals/preview")
    def intervals_preview(body: dict = Body(...)):
        from .intervals import build_boundaries, intervals_from_boundaries, spec_from_params

        try:
            chain = [spec_from_params(s) for s in body.get("chain", [])]
            if not chain:
                raise HTTPException(422, "empty chain")
            levels = []
            for spec in chain:
                bounds = build_boundaries(spec)
                levels.append({"boundaries": bounds, "labels": intervals_from_boundaries(bounds)})
        except FacetprepError as exc:
            raise _http_error(exc) from None
        return {"levels": levels}

    @app.post("/expressions/check")
    def expressions_check(body: dict = Body(...)):
        from .expressions import parse_expression, pretty_print

        try:
            expr = parse_expression(str(body.get("expression", "")))
        except FacetprepError as exc:
            raise _http_error(exc) from None
        return {"ok": True, "canonical": pretty_print(expr)}

    # -- SPARQL preview

    @app.post("/sparql/preview")
    def sparql_preview(body: PreviewBody):
        try:
            table = execute_select(SparqlSource(body.endpoint_url, body.query), sparql_timeout)
        except FacetprepError as exc:
            raise _http_error(exc) from None
        return {
            "header": table.header,
            "rows": table.rows[: body.limit],
            "total": len(table.rows),
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
