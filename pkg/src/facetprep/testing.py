"""A tiny in-process SPARQL endpoint for tests and demos.

The server holds a list of solution rows (dicts of variable name to value).
On a SELECT query it projects the requested variables, in query order, and
answers with a standard SPARQL JSON results document; ``SELECT *`` projects
every variable seen in the store, in first-appearance order. A row without
a value for a projected variable yields an unbound (absent) binding.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

_VAR_RE = re.compile(r"\?([A-Za-z_][A-Za-z0-9_]*)")
_SELECT_RE = re.compile(r"select\s+(.*?)\s*(where|\{|$)", re.IGNORECASE | re.DOTALL)


def projection_variables(query: str, store_rows: list[dict]) -> list[str]:
    match = _SELECT_RE.search(query)
    clause = match.group(1) if match else ""
    if "*" in clause:
        seen: list[str] = []
        for row in store_rows:
            for var in row:
                if var not in seen:
                    seen.append(var)
        return seen
    return _VAR_RE.findall(clause)


def results_document(query: str, store_rows: list[dict]) -> dict:
    variables = projection_variables(query, store_rows)
    bindings = []
    for row in store_rows:
        binding = {}
        for var in variables:
            value = row.get(var)
            if value is not None:
                binding[var] = {"type": "literal", "value": str(value)}
        bindings.append(binding)
    return {"head": {"vars": variables}, "results": {"bindings": bindings}}


class MockSparqlServer:
    """Context manager running a throwaway endpoint on an ephemeral port."""

    def __init__(self, rows: list[dict], status: int = 200, body_override: bytes | None = None):
        self.rows = rows
        self.status = status
        self.body_override = body_override
        self.requests_seen: list[str] = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def _answer(self, query: str) -> None:
                outer.requests_seen.append(query)
                if outer.body_override is not None:
                    payload = outer.body_override
                else:
                    payload = json.dumps(results_document(query, outer.rows)).encode("utf-8")
                self.send_response(outer.status)
                self.send_header("Content-Type", "application/sparql-results+json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def do_GET(self):  # noqa: N802 (http.server API)
                params = parse_qs(urlparse(self.path).query)
                self._answer(params.get("query", [""])[0])

            def do_POST(self):  # noqa: N802
                length = int(self.headers.get("Content-Length", "0"))
                params = parse_qs(self.rfile.read(length).decode("utf-8"))
                self._answer(params.get("query", [""])[0])

            def log_message(self, *args):  # keep test output quiet
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/sparql"

    def __enter__(self) -> "MockSparqlServer":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()
