"""SPARQL SELECT client and the favourites list.

Queries go over the standard protocol: GET with a ``query`` parameter, or an
urlencoded POST once the query exceeds a length threshold. Results must be
the SPARQL JSON results format; each solution becomes one table row, with
result variables as header columns in the order the document declares them
(which is projection order for explicit projections). An unbound variable is
an empty cell, the missing marker. Literals keep their lexical form only:
datatypes and language tags are dropped, IRIs are kept whole.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import requests

from .errors import (
    DuplicateLabel,
    HttpStatusError,
    MalformedResults,
    NetworkError,
    NotSelectQuery,
    QueryTimeout,
    UnknownLabel,
)
from .tabular import RawTable

RESULTS_JSON = "application/sparql-results+json"

# above this many characters the query is POSTed instead of sent as a GET
# parameter, mirroring common endpoint URL-length limits
POST_THRESHOLD = 2000

_COMMENT_RE = re.compile(r"#[^\n]*")
_PROLOGUE_RE = re.compile(
    r"^(\s*(BASE\s*<[^>]*>|PREFIX\s+\S+\s*<[^>]*>)\s*)*", re.IGNORECASE
)


@dataclass(frozen=True)
class SparqlSource:
    endpoint_url: str
    query: str


@dataclass(frozen=True)
class Favourite:
    label: str
    source: SparqlSource


def is_select_query(query: str) -> bool:
    """True when the first keyword after comments and the prologue is SELECT."""
    stripped = _COMMENT_RE.sub("", query)
    stripped = _PROLOGUE_RE.sub("", stripped, count=1)
    return stripped.lstrip().lower().startswith("select")


def execute_select(src: SparqlSource, timeout: float = 30.0) -> RawTable:
    """Run a SELECT query and shape the bindings into a RawTable."""
    if not is_select_query(src.query):
        raise NotSelectQuery()
    headers = {"Accept": RESULTS_JSON}
    try:
        if len(src.query) > POST_THRESHOLD:
            response = requests.post(
                src.endpoint_url, data={"query": src.query}, headers=headers, timeout=timeout
            )
        else:
            response = requests.get(
                src.endpoint_url, params={"query": src.query}, headers=headers, timeout=timeout
            )
    except requests.Timeout:
        raise QueryTimeout() from None
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from None
    if response.status_code != 200:
        raise HttpStatusError(response.status_code)
    try:
        document = response.json()
    except ValueError as exc:
        raise MalformedResults(f"not JSON: {exc}") from None
    return results_to_table(document)


def results_to_table(document: dict) -> RawTable:
    """Convert one SPARQL JSON results document into a RawTable."""
    try:
        variables = document["head"]["vars"]
        bindings = document["results"]["bindings"]
    except (KeyError, TypeError):
        raise MalformedResults("missing head.vars or results.bindings") from None
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise MalformedResults("head.vars is not a list of names")
    rows: list[list[str]] = []
    for binding in bindings:
        if not isinstance(binding, dict):
            raise MalformedResults("binding is not an object")
        row = []
        for var in variables:
            term = binding.get(var)
            if term is None:
                row.append("")  # unbound -> missing
                continue
            value = term.get("value")
            if value is None:
                raise MalformedResults(f"binding for ?{var} has no value")
            row.append(str(value).strip())
        rows.append(row)
    return RawTable(header=list(variables), rows=rows)


# ---------------------------------------------------------------------------
# Favourites: a label-keyed list of saved endpoint+query pairs.


def favourites_add(store: list[Favourite], favourite: Favourite) -> list[Favourite]:
    if any(f.label == favourite.label for f in store):
        raise DuplicateLabel(favourite.label)
    if not is_select_query(favourite.source.query):
        raise NotSelectQuery()
    return [*store, favourite]


def favourites_remove(store: list[Favourite], label: str) -> list[Favourite]:
    if not any(f.label == label for f in store):
        raise UnknownLabel(label)
    return [f for f in store if f.label != label]


def favourites_list(store: list[Favourite]) -> list[Favourite]:
    return sorted(store, key=lambda f: f.label)
