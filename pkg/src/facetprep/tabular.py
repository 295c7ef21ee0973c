"""Parsing and serialization of the supported tabular input formats.

Four formats come through here:

- single CSV/TSV files whose first record is the header row;
- hierarchy paths embedded in cells, slash-separated leaf to root
  ("Mazda/Japanese/Asian");
- external hierarchy configuration files, one slash-joined entry per line
  where the last segment names the facet ("Mazda/Japanese/Asian/Manufacturer");
- multi-file folders: one single-column object-id file plus one two-column
  file per dimension, where a pair whose first element is not a known object
  id is hierarchy information (child, parent).

Encoding is UTF-8 only. LF and CRLF are both accepted on input; output is
always LF. CSV uses RFC-4180 style double-quoting; TSV has no quoting and
forbids tabs and newlines inside cells. Cells are trimmed of leading and
trailing whitespace on parse (after unquoting), so a valid table always
holds trimmed cells and an empty cell is the canonical missing-value marker.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ConflictingHierarchy,
    ConflictingValue,
    DuplicateHeader,
    DuplicateObjectId,
    EmptyHeaderName,
    EmptyInput,
    EmptyPathSegment,
    HierarchyCycle,
    InvalidDimensionFile,
    InvalidObjectId,
    InvalidUtf8,
    ObjectIdNotSingleColumn,
    RaggedRow,
    TooFewSegments,
    UnserializableCell,
)

COMMA = ","
TAB = "\t"

DELIMITER_NAMES = {COMMA: "comma", TAB: "tab"}
DELIMITERS_BY_NAME = {"comma": COMMA, "tab": TAB}


class AmbiguousTermWarning(UserWarning):
    """A hierarchy term in a multi-file dimension equals an object id."""


class HierarchySourceWarning(UserWarning):
    """Config-file hierarchy information overrode an internal path."""


@dataclass
class RawTable:
    """An untyped parsed table: header names plus string cells.

    Invariants checked on construction: header names are unique and
    non-empty after trimming, and every row has exactly one cell per
    header column.
    """

    header: list[str]
    rows: list[list[str]]
    delimiter: str = COMMA

    def __post_init__(self) -> None:
        if self.delimiter not in (COMMA, TAB):
            raise ValueError(f"unsupported delimiter: {self.delimiter!r}")
        seen: set[str] = set()
        for position, name in enumerate(self.header, start=1):
            if not name.strip():
                raise EmptyHeaderName(position)
            if name in seen:
                raise DuplicateHeader(name)
            seen.add(name)
        arity = len(self.header)
        for i, row in enumerate(self.rows):
            if len(row) != arity:
                raise RaggedRow(i + 2, arity, len(row))


@dataclass
class HierarchyConfigEntry:
    """One external hierarchy statement: a leaf-to-root path within a facet."""

    facet_name: str
    path: list[str]


@dataclass
class DimensionFile:
    """A two-column dimension file of a multi-file project folder.

    ``facet_name`` comes from the file name with the extension stripped;
    each pair is (object id or child term, value or parent term).
    """

    facet_name: str
    pairs: list[tuple[str, str]] = field(default_factory=list)

    @classmethod
    def from_raw_table(cls, facet_name: str, raw: RawTable) -> "DimensionFile":
        if len(raw.header) != 2:
            raise InvalidDimensionFile(facet_name, len(raw.header))
        return cls(facet_name, [(row[0], row[1]) for row in raw.rows])


def parse_table(data: bytes, delimiter: str = COMMA) -> RawTable:
    """Parse CSV/TSV bytes; the first record is the header row.

    Quoted fields (RFC-4180) are honoured for the comma delimiter only;
    with tab, quote characters are ordinary cell content. Header names and
    cells are trimmed. Fully empty records (blank lines) are skipped.
    """
    if delimiter not in (COMMA, TAB):
        raise ValueError(f"unsupported delimiter: {delimiter!r}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidUtf8(exc.start) from None

    quoting = csv.QUOTE_MINIMAL if delimiter == COMMA else csv.QUOTE_NONE
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=delimiter, quoting=quoting)

    header: list[str] | None = None
    rows: list[list[str]] = []
    for record in reader:
        if not record:
            # A blank line is junk, except in a single-column table where it
            # is the only way to write a row with a missing value.
            if header is not None and len(header) == 1:
                rows.append([""])
            continue
        cells = [cell.strip() for cell in record]
        if header is None:
            header = cells
            seen: set[str] = set()
            for position, name in enumerate(header, start=1):
                if not name:
                    raise EmptyHeaderName(position)
                if name in seen:
                    raise DuplicateHeader(name)
                seen.add(name)
            continue
        if len(cells) != len(header):
            raise RaggedRow(reader.line_num, len(header), len(cells))
        rows.append(cells)
    if header is None:
        raise EmptyInput()
    return RawTable(header=header, rows=rows, delimiter=delimiter)


def serialize_table(table, delimiter: str = COMMA) -> bytes:
    """Serialize a RawTable (or anything exposing ``header``/``rows`` via
    :func:`to_raw_table`) back to bytes: header row, then data rows, LF line
    endings. CSV double-quotes fields containing the delimiter, a quote or a
    newline; TSV refuses such cells since it has no quoting."""
    if delimiter not in (COMMA, TAB):
        raise ValueError(f"unsupported delimiter: {delimiter!r}")
    if not isinstance(table, RawTable):
        table = to_raw_table(table)

    records = [table.header, *table.rows]
    if delimiter == TAB:
        for record in records:
            for cell in record:
                if TAB in cell or "\n" in cell or "\r" in cell:
                    raise UnserializableCell(
                        f"cell {cell!r} contains a tab or newline; TSV has no quoting"
                    )
        text = "".join(TAB.join(record) + "\n" for record in records)
        return text.encode("utf-8")

    single = len(table.header) == 1
    lines = []
    for record in records:
        lines.append(COMMA.join(_csv_field(cell, single) for cell in record))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _csv_field(cell: str, single_column: bool) -> str:
    """RFC-4180 quoting: delimiter, quote, or any newline character forces
    quotes; a lone empty field is quoted so the record is not a blank line."""
    if '"' in cell or COMMA in cell or "\n" in cell or "\r" in cell:
        return '"' + cell.replace('"', '""') + '"'
    if single_column and cell == "":
        return '""'
    return cell


def to_raw_table(dataset) -> RawTable:
    """Flatten a Dataset into a RawTable; Missing cells become empty strings."""
    header = [facet.name for facet in dataset.facets]
    rows = [["" if cell is None else cell for cell in row] for row in dataset.rows]
    return RawTable(header=header, rows=rows)


def parse_internal_path(cell: str) -> list[str]:
    """Split a slash-separated leaf-to-root path. There is no escaping, so a
    slash can never be part of a term in single-file mode; a cell without a
    slash is a single-element path."""
    segments = cell.split("/")
    for position, segment in enumerate(segments, start=1):
        if not segment.strip():
            raise EmptyPathSegment(position)
    return [segment.strip() for segment in segments]


def parse_hierarchy_config(text: str) -> list[HierarchyConfigEntry]:
    """Parse an external hierarchy configuration file.

    One entry per line; blank lines are ignored; line order does not matter.
    The last slash-separated segment is the facet name, the rest (in order)
    is the leaf-to-root path.
    """
    entries: list[HierarchyConfigEntry] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        segments = stripped.split("/")
        for position, segment in enumerate(segments, start=1):
            if not segment.strip():
                raise EmptyPathSegment(position, line_no=line_no)
        segments = [segment.strip() for segment in segments]
        if len(segments) < 2:
            raise TooFewSegments(line_no)
        entries.append(HierarchyConfigEntry(facet_name=segments[-1], path=segments[:-1]))
    return entries


def assemble_multifile(
    object_id_file: RawTable, dimension_files: list[DimensionFile]
) -> tuple[RawTable, list[HierarchyConfigEntry]]:
    """Join an object-id file and its dimension files into one table.

    A pair whose first element is a known object id assigns that object a
    value; any other pair is a (child, parent) hierarchy edge. Edges are
    chained transitively into leaf-to-root paths and returned as hierarchy
    entries. Objects without a pair in a dimension get an empty (missing)
    cell. A hierarchy term that coincides with an object id triggers
    :class:`AmbiguousTermWarning`, since the id interpretation wins.
    """
    if len(object_id_file.header) != 1:
        raise ObjectIdNotSingleColumn(len(object_id_file.header))
    ids: list[str] = []
    id_set: set[str] = set()
    for i, row in enumerate(object_id_file.rows):
        object_id = row[0]
        if not object_id:
            raise InvalidObjectId(i)
        if object_id in id_set:
            raise DuplicateObjectId(object_id)
        ids.append(object_id)
        id_set.add(object_id)

    header = [object_id_file.header[0]] + [dim.facet_name for dim in dimension_files]
    assignments: dict[str, dict[str, str]] = {dim.facet_name: {} for dim in dimension_files}
    entries: list[HierarchyConfigEntry] = []

    for dim in dimension_files:
        parent_of: dict[str, str] = {}
        for first, second in dim.pairs:
            if first in id_set:
                existing = assignments[dim.facet_name].get(first)
                if existing is not None and existing != second:
                    raise ConflictingValue(first, dim.facet_name)
                assignments[dim.facet_name][first] = second
            else:
                existing_parent = parent_of.get(first)
                if existing_parent is not None and existing_parent != second:
                    raise ConflictingHierarchy(dim.facet_name, first)
                parent_of[first] = second

        for term in sorted(set(parent_of) | set(parent_of.values())):
            if term in id_set:
                warnings.warn(
                    f"hierarchy term {term!r} in dimension {dim.facet_name!r}"
                    " is also an object id",
                    AmbiguousTermWarning,
                    stacklevel=2,
                )

        # Walk every child up to its root; revisiting a node on the way is a
        # cycle. Only maximal chains (starting at true leaves) become entries.
        parents = set(parent_of.values())
        for child in sorted(parent_of):
            path = [child]
            seen = {child}
            node = child
            while node in parent_of:
                node = parent_of[node]
                if node in seen:
                    raise HierarchyCycle(dim.facet_name, node)
                seen.add(node)
                path.append(node)
            if child not in parents:
                entries.append(HierarchyConfigEntry(dim.facet_name, path))
        if parent_of and not (set(parent_of) - parents):
            # every child is also a parent: the edge set has no leaf, so it
            # must contain a cycle (caught above, but guard anyway)
            raise HierarchyCycle(dim.facet_name, next(iter(parent_of)))

    rows = [
        [object_id] + [assignments[dim.facet_name].get(object_id, "") for dim in dimension_files]
        for object_id in ids
    ]
    return RawTable(header=header, rows=rows), entries


def delimiter_for_path(path: Path | str) -> str:
    return TAB if str(path).lower().endswith(".tsv") else COMMA


def read_table_file(path: Path | str, delimiter: str | None = None) -> RawTable:
    """Read and parse one table file, inferring the delimiter from the
    extension unless given explicitly."""
    path = Path(path)
    if delimiter is None:
        delimiter = delimiter_for_path(path)
    return parse_table(path.read_bytes(), delimiter)


def load_multifile_folder(
    folder: Path | str, object_id_file: str
) -> tuple[RawTable, list[HierarchyConfigEntry]]:
    """Load a multi-file project folder: the named object-id file plus every
    other .csv/.tsv file as a dimension (facet name = file name minus
    extension, scanned in name order)."""
    folder = Path(folder)
    id_path = folder / object_id_file
    if not id_path.is_file():
        raise FileNotFoundError(str(id_path))
    id_table = read_table_file(id_path)
    dimensions: list[DimensionFile] = []
    for path in sorted(folder.iterdir()):
        if path.name == object_id_file or path.suffix.lower() not in (".csv", ".tsv"):
            continue
        dimensions.append(DimensionFile.from_raw_table(path.stem, read_table_file(path)))
    return assemble_multifile(id_table, dimensions)
