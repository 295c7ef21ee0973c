"""RDF export: schema shape, canonical form, counting oracle."""

from __future__ import annotations

import pytest

from facetprep import build_dataset, parse_table
from facetprep.engine import (
    AddParent,
    AddRow,
    DefineIntervals,
    SetFacetType,
    SetVisibility,
    apply,
)
from facetprep.errors import ValidationFailed
from facetprep.intervals import LinearSpec
from facetprep.model import Dataset
from facetprep.rdf_export import DEFAULT_BASE, count_expected_triples, export_rdf, slug
from tests.ntriples_check import parse_line


def nt_lines(dataset) -> list[str]:
    nt, _ = export_rdf(dataset)
    return nt.decode("utf-8").splitlines()


class TestExportShape:
    def test_single_cell_dataset(self):
        d = build_dataset(parse_table(b"A\nx\n"))
        lines = nt_lines(d)
        # 1 data triple + 2 annotation triples
        assert len(lines) == 3
        data = [l for l in lines if "prop/A" in l and "obj/row0" in l]
        assert data == [f'<{DEFAULT_BASE}obj/row0> <{DEFAULT_BASE}prop/A> "x" .']

    def test_data_triple_count_rule(self, hotel_dataset):
        lines = nt_lines(hotel_dataset)
        data_lines = [l for l in lines if "obj/" in l.split(" ")[0]]
        assert len(data_lines) == 9 * 10  # rows x visible facets, all cells present

    def test_broader_edge(self, hotel_dataset):
        d, _ = apply(hotel_dataset, AddParent("Location", ("Chania",), "Crete"))
        lines = nt_lines(d)
        edge = (
            f"<{DEFAULT_BASE}term/Location/Chania> <{DEFAULT_BASE}broader>"
            f" <{DEFAULT_BASE}term/Location/Crete> ."
        )
        assert edge in lines

    def test_hidden_facet_emits_nothing(self, hotel_dataset):
        d, _ = apply(hotel_dataset, SetVisibility("Rooms", False))
        assert not any("Rooms" in line for line in nt_lines(d))

    def test_identifier_names_subjects_and_is_not_a_facet(self, hotel_dataset):
        d, _ = apply(hotel_dataset, SetFacetType("Name", "identifier"))
        lines = nt_lines(d)
        assert any(f"obj/{slug('Samaria Hotel')}" in line for line in lines)
        assert not any("prop/Name" in line for line in lines)

    def test_geo_facets_use_geo_predicates(self, hotel_dataset):
        d, _ = apply(hotel_dataset, SetFacetType("Latitude", "latitude"))
        d, _ = apply(d, SetFacetType("Longitude", "longitude"))
        lines = nt_lines(d)
        assert any("wgs84_pos#lat" in line for line in lines)
        assert any("wgs84_pos#long" in line for line in lines)
        assert not any("prop/Latitude" in line for line in lines)
        assert not any("prop/Longitude" in line for line in lines)

    def test_numeric_facets_are_typed_literals(self, hotel_dataset):
        d, _ = apply(hotel_dataset, SetFacetType("Rooms", "integer"))
        assert any(
            "prop/Rooms" in line and "XMLSchema#integer" in line for line in nt_lines(d)
        )

    def test_interval_membership(self, hotel_dataset):
        d, _ = apply(hotel_dataset, SetFacetType("Price", "integer"))
        d, _ = apply(d, DefineIntervals("Price", (LinearSpec(0, 600, 200),)))
        lines = nt_lines(d)
        member = (
            f"<{DEFAULT_BASE}term/Price/95> <{DEFAULT_BASE}inInterval>"
            f" <{DEFAULT_BASE}term/Price/{slug('[0,200)')}> ."
        )
        assert member in lines

    def test_validation_gate(self):
        d = Dataset(
            facets=(build_dataset(parse_table(b"A\nx\n")).facets[0],) * 2,
        )
        with pytest.raises(ValidationFailed):
            export_rdf(d)


class TestCanonicalForm:
    def test_deterministic_bytes(self, hotel_dataset):
        assert export_rdf(hotel_dataset) == export_rdf(hotel_dataset)

    def test_sorted_lines(self, hotel_dataset):
        lines = nt_lines(hotel_dataset)
        assert lines == sorted(lines)

    def test_every_line_parses_independently(self, hotel_dataset):
        d, _ = apply(hotel_dataset, AddParent("Location", ("Chania",), "Crete"))
        d, _ = apply(d, SetFacetType("Price", "integer"))
        d, _ = apply(d, DefineIntervals("Price", (LinearSpec(0, 600, 200),)))
        for line in nt_lines(d):
            parse_line(line)  # raises on any grammar violation

    def test_escaping_round_trips_through_independent_parser(self):
        d = build_dataset(parse_table(b'A\n"x""y\nz"\n'))
        lines = nt_lines(d)
        data_line = [l for l in lines if "obj/row0" in l][0]
        _, _, obj = parse_line(data_line)
        assert obj == ("lit", 'x"y\nz', None)

    def test_turtle_mirrors_triples(self, hotel_dataset):
        nt, ttl = export_rdf(hotel_dataset)
        ttl_text = ttl.decode("utf-8")
        assert ttl_text.startswith("@prefix geo:")
        assert ttl_text.count(" .\n") - 2 == len(nt.decode("utf-8").splitlines())


class TestCountOracle:
    def test_empty_dataset(self):
        d = Dataset()
        assert count_expected_triples(d) == 0
        assert nt_lines(d) == []

    def test_hotel_scenario_count(self, hotel_dataset):
        d, _ = apply(hotel_dataset, SetFacetType("Name", "identifier"))
        d, _ = apply(d, SetFacetType("Latitude", "latitude"))
        d, _ = apply(d, SetFacetType("Price", "integer"))
        d, _ = apply(d, DefineIntervals("Price", (LinearSpec(0, 600, 200),)))
        d, _ = apply(d, AddParent("Location", ("Chania",), "Crete"))
        d, _ = apply(d, SetVisibility("Rooms", False))
        assert len(nt_lines(d)) == count_expected_triples(d)

    def test_one_row_adds_facet_count_triples(self, hotel_dataset):
        before = len(nt_lines(hotel_dataset))
        cells = tuple(f"new{i}" for i in range(10))
        d, _ = apply(hotel_dataset, AddRow(cells))
        # all cells present, no identifier: one data triple per visible facet
        assert len(nt_lines(d)) == before + 10

    def test_count_matches_across_fixtures(self, hotel_dataset):
        assert len(nt_lines(hotel_dataset)) == count_expected_triples(hotel_dataset)
