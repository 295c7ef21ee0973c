"""Canonical RDF export of a dataset.

The vocabulary (documented in the README, base namespace configurable):

- objects:      <B>obj/<slug>         one per row; the identifier facet's
                                      value names the object, else row<i>
- properties:   <B>prop/<facet-slug>  one data triple per present cell of a
                                      visible, non-identifier facet
- geo fields:   latitude/longitude facets use the W3C Basic Geo predicates
                instead of a prop resource
- terms:        <B>term/<facet-slug>/<term-slug>
- <B>broader:   child term -> parent term, one triple per hierarchy edge
- <B>inInterval: value term -> finest interval term, one per distinct value
                of an interval facet
- <B>order / <B>visible: annotations on each prop resource

Slugs are percent-encodings of names (space becomes %20), which keeps IRIs
readable and the encoding injective. The N-Triples output is canonical:
distinct triples, lexicographically sorted, LF-terminated, UTF-8. A term
label that denotes both a facet value and a grouping term maps to one IRI;
the degenerate self-edge that merge can produce is dropped.
"""

from __future__ import annotations

from urllib.parse import quote

from .errors import ValidationFailed
from .intervals import interval_assignment
from .model import Dataset, Facet, validate

DEFAULT_BASE = "http://facetprep.example/ns/"

GEO = "http://www.w3.org/2003/01/geo/wgs84_pos#"
XSD = "http://www.w3.org/2001/XMLSchema#"

_GEO_PREDICATES = {"latitude": GEO + "lat", "longitude": GEO + "long"}
_XSD_BY_TYPE = {
    "integer": XSD + "integer",
    "float": XSD + "decimal",
    "latitude": XSD + "decimal",
    "longitude": XSD + "decimal",
    "boolean": XSD + "boolean",
}


def slug(name: str) -> str:
    return quote(name, safe="")


def escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _exported_facets(dataset: Dataset) -> list[tuple[int, Facet]]:
    return [
        (i, f)
        for i, f in enumerate(dataset.facets)
        if f.visible and f.ftype != "identifier"
    ]


def _annotated_facets(dataset: Dataset) -> list[Facet]:
    return [f for _, f in _exported_facets(dataset) if f.ftype not in _GEO_PREDICATES]


def _subjects(dataset: Dataset, base: str) -> list[str]:
    if dataset.identifier_facet is not None:
        idx = dataset.facet_index(dataset.identifier_facet)
        return [f"{base}obj/{slug(row[idx])}" for row in dataset.rows]
    return [f"{base}obj/row{i}" for i in range(len(dataset.rows))]


Triple = tuple[str, str, tuple[str, str | None]]  # subject, predicate, (literal text, datatype) ...


def _triples(dataset: Dataset, base: str) -> set[tuple[str, str, object]]:
    """The triple set; objects are either ('iri', text) or ('lit', text,
    datatype-or-None)."""
    triples: set[tuple[str, str, object]] = set()
    subjects = _subjects(dataset, base)

    for idx, facet in _exported_facets(dataset):
        facet_slug = slug(facet.name)
        predicate = _GEO_PREDICATES.get(facet.ftype, f"{base}prop/{facet_slug}")
        datatype = _XSD_BY_TYPE.get(facet.ftype)
        for subject, row in zip(subjects, dataset.rows):
            cell = row[idx]
            if cell is None:
                continue
            triples.add((subject, predicate, ("lit", cell, datatype)))

        tree = facet.term_tree()
        for child, parent in tree.edges():
            triples.add(
                (
                    f"{base}term/{facet_slug}/{slug(child)}",
                    f"{base}broader",
                    ("iri", f"{base}term/{facet_slug}/{slug(parent)}"),
                )
            )

        if facet.intervals is not None:
            for value, label in interval_assignment(dataset, facet.name).items():
                triples.add(
                    (
                        f"{base}term/{facet_slug}/{slug(value)}",
                        f"{base}inInterval",
                        ("iri", f"{base}term/{facet_slug}/{slug(label)}"),
                    )
                )

    for facet in _annotated_facets(dataset):
        prop = f"{base}prop/{slug(facet.name)}"
        triples.add((prop, f"{base}order", ("lit", str(facet.order_index), XSD + "integer")))
        triples.add((prop, f"{base}visible", ("lit", "true", XSD + "boolean")))
    return triples


def _nt_object(obj) -> str:
    if obj[0] == "iri":
        return f"<{obj[1]}>"
    _, text, datatype = obj
    literal = f'"{escape_literal(text)}"'
    return literal if datatype is None else f"{literal}^^<{datatype}>"


def _ttl_object(obj) -> str:
    if obj[0] == "iri":
        return f"<{obj[1]}>"
    _, text, datatype = obj
    literal = f'"{escape_literal(text)}"'
    if datatype is None:
        return literal
    return f"{literal}^^xsd:{datatype.removeprefix(XSD)}"


def _ttl_predicate(predicate: str) -> str:
    if predicate.startswith(GEO):
        return f"geo:{predicate.removeprefix(GEO)}"
    return f"<{predicate}>"


def export_rdf(dataset: Dataset, base: str = DEFAULT_BASE) -> tuple[bytes, bytes]:
    """Export as (canonical N-Triples, Turtle); both UTF-8, LF, deterministic.

    Raises :class:`ValidationFailed` when the dataset has invariant
    violations; exports of invalid datasets would be ambiguous.
    """
    violations = validate(dataset)
    if violations:
        raise ValidationFailed(violations)

    rendered = {
        f"<{s}> <{p}> {_nt_object(o)} .": (s, p, o) for s, p, o in _triples(dataset, base)
    }
    nt_lines = sorted(rendered)
    nt = "".join(line + "\n" for line in nt_lines).encode("utf-8")

    ttl_lines = [
        f"@prefix geo: <{GEO}> .",
        f"@prefix xsd: <{XSD}> .",
        "",
    ]
    for line in nt_lines:
        s, p, o = rendered[line]
        ttl_lines.append(f"<{s}> {_ttl_predicate(p)} {_ttl_object(o)} .")
    ttl = "".join(line + "\n" for line in ttl_lines).encode("utf-8")
    return nt, ttl


def count_expected_triples(dataset: Dataset) -> int:
    """Closed-form line count of the canonical export, computed from the
    dataset structure without rendering; the test suites cross-check the
    real export against it."""
    data = 0
    edges = 0
    memberships = 0
    for idx, facet in _exported_facets(dataset):
        data += sum(1 for row in dataset.rows if row[idx] is not None)
        edges += len(facet.term_tree().edges())
        if facet.intervals is not None:
            memberships += len({row[idx] for row in dataset.rows if row[idx] is not None})
    annotations = 2 * len(_annotated_facets(dataset))
    return data + edges + memberships + annotations
