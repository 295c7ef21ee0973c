"""Batch driver: create, apply, refresh, export, validate, serve.

The non-interactive path through the same engine the service uses; a log
applied here and the same records posted to the service export identical
bytes. Exit codes: 0 success, 1 a validation or apply failure, 2 usage
errors.

``apply`` mirrors refresh semantics: every record is appended to the project
log even when it cannot be applied to the current source (the step may apply
after a future refresh), but any skip or corrupt record exits 1 so scripts
notice.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .engine import ApplyOutcome
from .errors import CorruptLogLine, FacetprepError
from .model import validate
from .project import (
    Project,
    StoreSession,
    parse_record,
    project_folder,
    save_project,
)
from .rdf_export import export_rdf
from .tabular import COMMA, TAB, serialize_table


def _print_outcome(seq: int, outcome: ApplyOutcome) -> None:
    detail = outcome.reason or ""
    print(f"{seq}\t{outcome.status}\t{detail}")


def cmd_new(args: argparse.Namespace) -> int:
    if args.kind == "single":
        source = {"path": str(Path(args.source).resolve())}
        if args.hierarchy_config:
            source["hierarchy_config"] = str(Path(args.hierarchy_config).resolve())
        kind = "single-file"
    elif args.kind == "multi":
        if not args.object_id_file:
            print("--object-id-file is required for multi-file projects", file=sys.stderr)
            return 2
        source = {"folder": str(Path(args.source).resolve()), "object_id_file": args.object_id_file}
        kind = "multi-file"
    else:
        if not args.query_file:
            print("--query-file is required for sparql projects", file=sys.stderr)
            return 2
        source = {
            "endpoint_url": args.source,
            "query": Path(args.query_file).read_text("utf-8"),
        }
        kind = "sparql"
    folder = project_folder(args.root, args.name)
    if folder.exists():
        print(f"project folder already exists: {folder}", file=sys.stderr)
        return 1
    save_project(Project(name=args.name, kind=kind, source=source), args.root)
    print(folder)
    return 0


def cmd_apply(args: argparse.Namespace) -> int:
    try:
        lines = Path(args.log).read_text("utf-8").splitlines()
    except OSError as exc:
        print(f"cannot read log: {exc}", file=sys.stderr)
        return 1
    failed = False
    with StoreSession.open(args.project) as store:
        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                record = parse_record(line, line_no)
                t = record.transformation()
            except CorruptLogLine as exc:
                print(f"line {line_no}\tcorrupt\t{exc}", file=sys.stderr)
                return 1
            seq = len(store.session.applied) + 1
            outcome = store.apply_or_skip(t)
            if not outcome.applied:
                failed = True
            _print_outcome(seq, outcome)
        store.save()
    return 1 if failed else 0


def cmd_refresh(args: argparse.Namespace) -> int:
    new_source = None
    if args.source:
        project_kind = None
        with StoreSession.open(args.project, write=False) as probe:
            project_kind = probe.project.kind
        if project_kind == "single-file":
            new_source = {"path": str(Path(args.source).resolve())}
        elif project_kind == "multi-file":
            with StoreSession.open(args.project, write=False) as probe:
                id_file = probe.project.source["object_id_file"]
            new_source = {"folder": str(Path(args.source).resolve()), "object_id_file": id_file}
        else:
            print("use `new` to change a sparql source", file=sys.stderr)
            return 2
    with StoreSession.open(args.project) as store:
        outcomes = store.refresh(new_source)
        for seq, outcome in enumerate(outcomes, start=1):
            _print_outcome(seq, outcome)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    with StoreSession.open(args.project, write=False) as store:
        dataset = store.session.dataset
        try:
            if args.format == "ntriples":
                payload = export_rdf(dataset)[0]
            elif args.format == "turtle":
                payload = export_rdf(dataset)[1]
            elif args.format == "csv":
                payload = serialize_table(dataset, COMMA)
            else:
                payload = serialize_table(dataset, TAB)
        except FacetprepError as exc:
            print(f"export failed: {exc}", file=sys.stderr)
            return 1
    Path(args.out).write_bytes(payload)
    print(args.out)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    with StoreSession.open(args.project, write=False) as store:
        violations = validate(store.session.dataset)
    for violation in violations:
        print(violation)
    return 1 if violations else 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        root=args.root,
        sparql_timeout=args.sparql_timeout,
        session_idle_timeout=args.idle_timeout,
        ui_dir=args.ui_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facetprep",
        description="Prepare tabular/SPARQL data for faceted exploration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_new = sub.add_parser("new", help="create a project folder")
    p_new.add_argument("--kind", choices=["single", "multi", "sparql"], required=True)
    p_new.add_argument("--source", required=True, help="file path, folder, or endpoint URL")
    p_new.add_argument("--name", required=True)
    p_new.add_argument("--root", required=True, help="directory holding project folders")
    p_new.add_argument("--object-id-file", help="multi: object id file name inside the folder")
    p_new.add_argument("--query-file", help="sparql: file containing the SELECT query")
    p_new.add_argument("--hierarchy-config", help="single: optional hierarchy config file")
    p_new.set_defaults(func=cmd_new)

    p_apply = sub.add_parser("apply", help="append and apply a JSONL transformation log")
    p_apply.add_argument("--project", required=True, help="project folder")
    p_apply.add_argument("--log", required=True, help="JSONL file of log records")
    p_apply.set_defaults(func=cmd_apply)

    p_refresh = sub.add_parser("refresh", help="reload the source and replay the log")
    p_refresh.add_argument("--project", required=True)
    p_refresh.add_argument("--source", help="new source path/folder for the same kind")
    p_refresh.set_defaults(func=cmd_refresh)

    p_export = sub.add_parser("export", help="export the transformed dataset")
    p_export.add_argument("--project", required=True)
    p_export.add_argument("--format", choices=["ntriples", "turtle", "csv", "tsv"], required=True)
    p_export.add_argument("--out", required=True)
    p_export.set_defaults(func=cmd_export)

    p_validate = sub.add_parser("validate", help="report dataset invariant violations")
    p_validate.add_argument("--project", required=True)
    p_validate.set_defaults(func=cmd_validate)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--root", default=os.environ.get("FACETPREP_ROOT", "."))
    p_serve.add_argument("--host", default=os.environ.get("FACETPREP_HOST", "127.0.0.1"))
    p_serve.add_argument("--port", type=int, default=int(os.environ.get("FACETPREP_PORT", "8080")))
    p_serve.add_argument(
        "--sparql-timeout",
        type=float,
        default=float(os.environ.get("FACETPREP_SPARQL_TIMEOUT", "30")),
    )
    p_serve.add_argument(
        "--idle-timeout",
        type=float,
        default=float(os.environ.get("FACETPREP_IDLE_TIMEOUT", "3600")),
    )
    p_serve.add_argument("--ui-dir", default=os.environ.get("FACETPREP_UI_DIR"))
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FacetprepError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
