"""On-disk projects: folder layout, JSON-Lines log, open/save/refresh.

A project folder holds exactly three files:

- ``project.json``: format version, name, kind, and the source descriptor
  (single-file path, multi-file folder plus object-id file name, or SPARQL
  endpoint plus query);
- ``transformations.jsonl``: one record per line, keys in the fixed order
  ``seq``, ``type``, ``params``, ``recorded_at``; appends are O(1) and a
  truncated tail loses at most one record;
- ``favourites.json``: saved endpoint+query pairs.

Sources are referenced, never copied: refreshing re-reads (or re-points) the
source and replays the whole log over it, skipping steps that no longer
apply. All writes go through a temp file and an atomic rename, and one lock
file per folder keeps out concurrent writers. ``recorded_at`` timestamps are
bookkeeping only: they are ignored by equality and replay.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from . import engine
from .errors import (
    CorruptLogLine,
    FacetprepError,
    FormatVersionUnsupported,
    MissingFile,
    ProjectIoError,
    ProjectLocked,
)
from .model import Dataset, build_dataset
from .sparql import Favourite, SparqlSource, execute_select
from .tabular import (
    DELIMITERS_BY_NAME,
    DELIMITER_NAMES,
    delimiter_for_path,
    load_multifile_folder,
    parse_hierarchy_config,
    read_table_file,
)

FORMAT_VERSION = 1

PROJECT_FILE = "project.json"
LOG_FILE = "transformations.jsonl"
FAVOURITES_FILE = "favourites.json"
LOCK_FILE = ".lock"

KINDS = ("single-file", "multi-file", "sparql")


@dataclass(frozen=True)
class LogRecord:
    seq: int
    type: str
    params: dict
    recorded_at: str | None = None

    def transformation(self) -> engine.Transformation:
        return engine.from_params(self.type, self.params)


@dataclass
class Project:
    name: str
    kind: str  # single-file | multi-file | sparql
    source: dict  # kind-shaped descriptor, see load_source
    log: list[LogRecord] = field(default_factory=list)
    favourites: list[Favourite] = field(default_factory=list)


def record_for(seq: int, t: engine.Transformation, recorded_at: str | None = None) -> LogRecord:
    return LogRecord(seq=seq, type=engine.type_name(t), params=engine.to_params(t), recorded_at=recorded_at)


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def dumps_record(record: LogRecord) -> str:
    payload = {"seq": record.seq, "type": record.type, "params": record.params}
    if record.recorded_at is not None:
        payload["recorded_at"] = record.recorded_at
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def parse_record(line: str, line_no: int) -> LogRecord:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLogLine(line_no, f"not JSON: {exc.msg}") from None
    if not isinstance(payload, dict):
        raise CorruptLogLine(line_no, "not an object")
    try:
        record = LogRecord(
            seq=int(payload["seq"]),
            type=str(payload["type"]),
            params=payload.get("params") or {},
            recorded_at=payload.get("recorded_at"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptLogLine(line_no, str(exc)) from None
    try:
        record.transformation()
    except FacetprepError as exc:
        raise CorruptLogLine(line_no, str(exc)) from None
    return record


def atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise ProjectIoError(str(exc)) from None


# ---------------------------------------------------------------------------
# Source loading


def normalize_source(kind: str, source: dict) -> dict:
    """Validate a descriptor's shape for its kind and fill defaults."""
    if kind == "single-file":
        path = source.get("path")
        if not path:
            raise ProjectIoError("single-file source needs a 'path'")
        delimiter = source.get("delimiter") or DELIMITER_NAMES[delimiter_for_path(path)]
        if delimiter not in DELIMITERS_BY_NAME:
            raise ProjectIoError(f"unknown delimiter name: {delimiter!r}")
        out = {"path": str(path), "delimiter": delimiter}
        if source.get("hierarchy_config"):
            out["hierarchy_config"] = str(source["hierarchy_config"])
        return out
    if kind == "multi-file":
        folder, id_file = source.get("folder"), source.get("object_id_file")
        if not folder or not id_file:
            raise ProjectIoError("multi-file source needs 'folder' and 'object_id_file'")
        return {"folder": str(folder), "object_id_file": str(id_file)}
    if kind == "sparql":
        endpoint, query = source.get("endpoint_url"), source.get("query")
        if not endpoint or not query:
            raise ProjectIoError("sparql source needs 'endpoint_url' and 'query'")
        return {"endpoint_url": str(endpoint), "query": str(query)}
    raise ProjectIoError(f"unknown project kind: {kind!r}")


def load_source(kind: str, source: dict, sparql_timeout: float = 30.0) -> Dataset:
    """Materialize the descriptor into a fresh dataset via the kind's
    loader. Internal slash paths are only meaningful in single-file mode."""
    if kind == "single-file":
        raw = read_table_file(source["path"], DELIMITERS_BY_NAME[source["delimiter"]])
        entries = []
        config_path = source.get("hierarchy_config")
        if config_path:
            entries = parse_hierarchy_config(Path(config_path).read_text("utf-8"))
        return build_dataset(raw, entries, internal_paths=True)
    if kind == "multi-file":
        raw, entries = load_multifile_folder(source["folder"], source["object_id_file"])
        return build_dataset(raw, entries, internal_paths=False)
    if kind == "sparql":
        raw = execute_select(SparqlSource(source["endpoint_url"], source["query"]), sparql_timeout)
        return build_dataset(raw, [], internal_paths=False)
    raise ProjectIoError(f"unknown project kind: {kind!r}")


# ---------------------------------------------------------------------------
# Folder persistence


def project_folder(root: Path | str, name: str) -> Path:
    return Path(root) / name


def save_project(project: Project, root: Path | str) -> Path:
    """Write the full folder layout; existing files are replaced atomically."""
    folder = project_folder(root, project.name)
    descriptor = {
        "format_version": FORMAT_VERSION,
        "name": project.name,
        "kind": project.kind,
        "source": normalize_source(project.kind, project.source),
    }
    atomic_write(
        folder / PROJECT_FILE,
        (json.dumps(descriptor, ensure_ascii=False, indent=2) + "\n").encode("utf-8"),
    )
    atomic_write(folder / LOG_FILE, _log_bytes(project.log))
    atomic_write(folder / FAVOURITES_FILE, _favourites_bytes(project.favourites))
    return folder


def _log_bytes(records: list[LogRecord]) -> bytes:
    return "".join(dumps_record(r) + "\n" for r in records).encode("utf-8")


def _favourites_bytes(favourites: list[Favourite]) -> bytes:
    payload = [
        {"label": f.label, "endpoint_url": f.source.endpoint_url, "query": f.source.query}
        for f in favourites
    ]
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def load_favourites_file(path: Path) -> list[Favourite]:
    if not path.is_file():
        return []
    payload = json.loads(path.read_text("utf-8"))
    return [
        Favourite(item["label"], SparqlSource(item["endpoint_url"], item["query"]))
        for item in payload
    ]


def read_project(folder: Path | str) -> Project:
    """Read the three files without materializing the source."""
    folder = Path(folder)
    descriptor_path = folder / PROJECT_FILE
    if not descriptor_path.is_file():
        raise MissingFile(PROJECT_FILE)
    descriptor = json.loads(descriptor_path.read_text("utf-8"))
    if descriptor.get("format_version") != FORMAT_VERSION:
        raise FormatVersionUnsupported(descriptor.get("format_version"))
    kind = descriptor.get("kind")
    source = normalize_source(kind, descriptor.get("source") or {})

    log_path = folder / LOG_FILE
    if not log_path.is_file():
        raise MissingFile(LOG_FILE)
    records: list[LogRecord] = []
    last_seq = 0
    for line_no, line in enumerate(log_path.read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        record = parse_record(line, line_no)
        if record.seq <= last_seq:
            raise CorruptLogLine(line_no, f"seq {record.seq} does not increase")
        last_seq = record.seq
        records.append(record)

    favourites = load_favourites_file(folder / FAVOURITES_FILE)
    return Project(
        name=descriptor.get("name") or folder.name,
        kind=kind,
        source=source,
        log=records,
        favourites=favourites,
    )


class FolderLock:
    """One writer per project folder. The lock file records the owner pid."""

    def __init__(self, folder: Path):
        self.path = Path(folder) / LOCK_FILE
        self._fd: int | None = None

    def acquire(self) -> None:
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            os.write(self._fd, f"{os.getpid()}\n".encode())
        except FileExistsError:
            raise ProjectLocked(str(self.path)) from None

    def release(self) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
            try:
                self.path.unlink()
            except FileNotFoundError:
                pass

    def __enter__(self) -> "FolderLock":
        self.acquire()
        return self

    def __exit__(self, *exc) -> None:
        self.release()


class StoreSession:
    """A live session bound to a project folder.

    Every mutation immediately lands in ``transformations.jsonl``: applies
    and redos append one line, an undo rewrites the file without the undone
    tail. Opening for writing takes the folder lock; read-only consumers
    (export, validate) skip it.
    """

    def __init__(
        self,
        folder: Path,
        project: Project,
        session: engine.Session,
        outcomes_on_open: list[engine.ApplyOutcome],
        lock: FolderLock | None,
        sparql_timeout: float = 30.0,
    ):
        self.folder = folder
        self.project = project
        self.session = session
        self.outcomes_on_open = outcomes_on_open
        self._lock = lock
        self._sparql_timeout = sparql_timeout
        self._recorded_at: list[str | None] = [r.recorded_at for r in project.log]
        self.dirty = False

    # -- lifecycle

    @classmethod
    def open(
        cls,
        folder: Path | str,
        write: bool = True,
        sparql_timeout: float = 30.0,
    ) -> "StoreSession":
        folder = Path(folder)
        project = read_project(folder)
        lock = None
        if write:
            lock = FolderLock(folder)
            lock.acquire()
        try:
            source = load_source(project.kind, project.source, sparql_timeout)
            transformations = [r.transformation() for r in project.log]
            dataset, outcomes = engine.replay(source, transformations)
            session = engine.Session(
                source=source,
                dataset=dataset,
                applied=transformations,
                outcomes=list(outcomes),
            )
        except BaseException:
            if lock is not None:
                lock.release()
            raise
        return cls(folder, project, session, list(outcomes), lock, sparql_timeout)

    def close(self) -> None:
        if self._lock is not None:
            self._lock.release()
            self._lock = None

    def __enter__(self) -> "StoreSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- log records

    def records(self) -> list[LogRecord]:
        return [
            replace(record_for(i + 1, t), recorded_at=self._recorded_at[i])
            for i, t in enumerate(self.session.applied)
        ]

    def _require_writable(self) -> None:
        if self._lock is None:
            raise ProjectLocked(f"{self.folder} was opened read-only")

    # -- mutations (each keeps the log file in sync)

    def apply(self, t: engine.Transformation) -> engine.ApplyOutcome:
        self._require_writable()
        outcome = self.session.apply(t)
        self._append_record(t)
        return outcome

    def apply_or_skip(self, t: engine.Transformation) -> engine.ApplyOutcome:
        """Replay semantics for one incoming record: a failure is logged as
        a skipped step instead of raising, so the record survives for a
        future refresh where it may apply."""
        self._require_writable()
        try:
            outcome = self.session.apply(t)
        except FacetprepError as exc:
            outcome = engine.ApplyOutcome("skipped", reason=str(exc))
            self.session.applied.append(t)
            self.session.outcomes.append(outcome)
            self.session.redo_stack.clear()
        self._append_record(t)
        return outcome

    def _append_record(self, t: engine.Transformation) -> None:
        stamp = now_utc()
        self._recorded_at.append(stamp)
        record = record_for(len(self.session.applied), t, stamp)
        try:
            with open(self.folder / LOG_FILE, "a", encoding="utf-8") as handle:
                handle.write(dumps_record(record) + "\n")
        except OSError as exc:
            raise ProjectIoError(str(exc)) from None
        self.dirty = True

    def undo(self) -> None:
        self._require_writable()
        self.session.undo()
        self._recorded_at = self._recorded_at[: len(self.session.applied)]
        atomic_write(self.folder / LOG_FILE, _log_bytes(self.records()))
        self.dirty = True

    def redo(self) -> None:
        self._require_writable()
        self.session.redo()
        self._append_record(self.session.applied[-1])

    def refresh(self, new_source: dict | None = None) -> list[engine.ApplyOutcome]:
        """Re-point (or re-read) the source and replay the whole log."""
        self._require_writable()
        if new_source is not None:
            self.project.source = normalize_source(self.project.kind, new_source)
        source = load_source(self.project.kind, self.project.source, self._sparql_timeout)
        outcomes = self.session.refresh(source)
        self.save()
        return outcomes

    def save(self) -> None:
        self.project.log = self.records()
        save_project(self.project, self.folder.parent)
        self.dirty = False
