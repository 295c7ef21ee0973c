"""Tabular parsing and serialization."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from facetprep.errors import (
    DuplicateHeader,
    DuplicateObjectId,
    EmptyHeaderName,
    EmptyInput,
    EmptyPathSegment,
    HierarchyCycle,
    InvalidUtf8,
    RaggedRow,
    TooFewSegments,
    UnserializableCell,
)
from facetprep.tabular import (
    COMMA,
    TAB,
    DimensionFile,
    RawTable,
    assemble_multifile,
    parse_hierarchy_config,
    parse_internal_path,
    parse_table,
    serialize_table,
)


class TestParseTable:
    def test_hotel_fixture_shape(self, hotel_raw):
        assert len(hotel_raw.header) == 10
        assert len(hotel_raw.rows) == 9
        assert hotel_raw.header[0] == "Name"

    def test_tab_delimiter(self):
        raw = parse_table(b"A\tB\n1\t2\n", TAB)
        assert raw.header == ["A", "B"]
        assert raw.rows == [["1", "2"]]

    def test_ragged_row(self):
        with pytest.raises(RaggedRow) as err:
            parse_table(b"A,B\n1\n")
        assert (err.value.line_no, err.value.expected, err.value.found) == (2, 2, 1)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            parse_table(b"")

    def test_invalid_utf8(self):
        with pytest.raises(InvalidUtf8) as err:
            parse_table(b"A,B\n\xff,2\n")
        assert err.value.offset == 4

    def test_duplicate_header(self):
        with pytest.raises(DuplicateHeader):
            parse_table(b"A,A\n1,2\n")

    def test_empty_header_name(self):
        with pytest.raises(EmptyHeaderName):
            parse_table(b"A, \n1,2\n")

    def test_quoted_fields_and_trim(self):
        raw = parse_table(b'A,B\n"a,b",  c  \n')
        assert raw.rows == [["a,b", "c"]]

    def test_quoted_newline_inside_cell(self):
        raw = parse_table(b'A\n"x\ny"\n')
        assert raw.rows == [["x\ny"]]

    def test_crlf_accepted(self):
        raw = parse_table(b"A,B\r\n1,2\r\n")
        assert raw.rows == [["1", "2"]]

    def test_tsv_quotes_are_literal(self):
        raw = parse_table(b'A\tB\n"x"\t2\n', TAB)
        assert raw.rows == [['"x"', "2"]]


class TestSerializeTable:
    def test_minimal_round_trip(self):
        raw = RawTable(header=["A"], rows=[["x"]])
        assert serialize_table(raw) == b"A\nx\n"

    def test_comma_forces_quotes(self):
        raw = RawTable(header=["A"], rows=[["a,b"]])
        assert serialize_table(raw) == b'A\n"a,b"\n'

    def test_tsv_rejects_tab_in_cell(self):
        raw = RawTable(header=["A"], rows=[["a\tb"]])
        with pytest.raises(UnserializableCell):
            serialize_table(raw, TAB)

    def test_hotel_round_trip(self, hotel_raw):
        again = parse_table(serialize_table(hotel_raw))
        assert again.header == hotel_raw.header
        assert again.rows == hotel_raw.rows


# Cells are stored trimmed, so the round-trip property quantifies over
# trimmed cell text.
_cell = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
    max_size=12,
).map(str.strip)
_name = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd")), min_size=1, max_size=8
)


@given(
    header=st.lists(_name, min_size=1, max_size=5, unique=True),
    data=st.data(),
)
def test_csv_round_trip_property(header, data):
    rows = data.draw(
        st.lists(
            st.lists(_cell, min_size=len(header), max_size=len(header)),
            max_size=6,
        )
    )
    table = RawTable(header=header, rows=rows)
    again = parse_table(serialize_table(table, COMMA), COMMA)
    assert again.header == table.header
    assert again.rows == table.rows


@given(
    header=st.lists(_name, min_size=1, max_size=5, unique=True),
    data=st.data(),
)
def test_tsv_round_trip_property(header, data):
    safe_cell = _cell.filter(lambda s: "\t" not in s and "\n" not in s and "\r" not in s)
    rows = data.draw(
        st.lists(
            st.lists(safe_cell, min_size=len(header), max_size=len(header)),
            max_size=6,
        )
    )
    table = RawTable(header=header, rows=rows, delimiter=TAB)
    again = parse_table(serialize_table(table, TAB), TAB)
    assert again.header == table.header
    assert again.rows == table.rows


class TestInternalPaths:
    def test_three_levels(self):
        assert parse_internal_path("Mazda/Japanese/Asian") == ["Mazda", "Japanese", "Asian"]

    def test_no_separator(self):
        assert parse_internal_path("Chania") == ["Chania"]

    def test_empty_segment(self):
        with pytest.raises(EmptyPathSegment) as err:
            parse_internal_path("a//b")
        assert err.value.position == 2


class TestHierarchyConfig:
    def test_manufacturer_line(self):
        entries = parse_hierarchy_config("Mazda/Japanese/Asian/Manufacturer")
        assert len(entries) == 1
        assert entries[0].facet_name == "Manufacturer"
        assert entries[0].path == ["Mazda", "Japanese", "Asian"]

    def test_two_segment_line(self):
        # recomputed by hand: split on "/", last segment is the facet
        entries = parse_hierarchy_config("Chania/Crete/Location")
        assert entries[0].facet_name == "Location"
        assert entries[0].path == ["Chania", "Crete"]

    def test_too_few_segments(self):
        with pytest.raises(TooFewSegments) as err:
            parse_hierarchy_config("Manufacturer")
        assert err.value.line_no == 1

    def test_blank_lines_ignored(self):
        entries = parse_hierarchy_config("\nChania/Crete/Location\n\n")
        assert len(entries) == 1

    def test_order_insensitive(self):
        lines = ["Chania/Crete/Location", "Mazda/Japanese/Manufacturer", "Athens/Attica/Location"]
        rng = random.Random(7)
        baseline = parse_hierarchy_config("\n".join(lines))
        key = lambda e: (e.facet_name, tuple(e.path))
        for _ in range(5):
            shuffled = lines[:]
            rng.shuffle(shuffled)
            permuted = parse_hierarchy_config("\n".join(shuffled))
            assert sorted(permuted, key=key) == sorted(baseline, key=key)


class TestAssembleMultifile:
    def _ids(self, *ids):
        return RawTable(header=["hotel"], rows=[[i] for i in ids])

    def test_value_and_edge_classification(self):
        dims = [DimensionFile("Location", [("h1", "Chania"), ("h2", "Iraklio"), ("Chania", "Crete")])]
        table, entries = assemble_multifile(self._ids("h1", "h2"), dims)
        assert table.header == ["hotel", "Location"]
        assert table.rows == [["h1", "Chania"], ["h2", "Iraklio"]]
        assert [(e.facet_name, e.path) for e in entries] == [("Location", ["Chania", "Crete"])]

    def test_all_firsts_are_ids(self):
        table, entries = assemble_multifile(self._ids("h1"), [DimensionFile("Price", [("h1", "5")])])
        assert table.rows == [["h1", "5"]]
        assert entries == []

    def test_two_cycle(self):
        with pytest.raises(HierarchyCycle):
            assemble_multifile(self._ids("h1"), [DimensionFile("X", [("a", "b"), ("b", "a")])])

    def test_transitive_chain(self):
        dims = [DimensionFile("Location", [("h1", "Chania"), ("Chania", "Crete"), ("Crete", "Greece")])]
        _, entries = assemble_multifile(self._ids("h1"), dims)
        assert [(e.facet_name, e.path) for e in entries] == [
            ("Location", ["Chania", "Crete", "Greece"])
        ]

    def test_missing_dimension_value(self):
        dims = [DimensionFile("Price", [("h1", "5")])]
        table, _ = assemble_multifile(self._ids("h1", "h2"), dims)
        assert table.rows == [["h1", "5"], ["h2", ""]]

    def test_duplicate_object_id(self):
        with pytest.raises(DuplicateObjectId):
            assemble_multifile(self._ids("h1", "h1"), [])

    def test_ambiguous_term_warns(self):
        dims = [DimensionFile("Location", [("h1", "Chania"), ("Chania", "h2")])]
        with pytest.warns(UserWarning, match="also an object id"):
            assemble_multifile(self._ids("h1", "h2"), dims)

    @given(
        st.lists(st.sampled_from(["h1", "h2", "h3", "a", "b", "c"]), max_size=8),
        st.lists(st.sampled_from(["x", "y", "h1"]), max_size=8),
    )
    def test_classification_is_total(self, firsts, seconds):
        # every pair is either a value assignment or a hierarchy edge
        ids = {"h1", "h2", "h3"}
        pairs = list(zip(firsts, seconds))
        values = [p for p in pairs if p[0] in ids]
        edges = [p for p in pairs if p[0] not in ids]
        assert len(values) + len(edges) == len(pairs)
