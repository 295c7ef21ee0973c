"""The in-memory faceted dataset.

A Dataset is an immutable value: an ordered tuple of facets plus rows of
cells aligned with that order. A cell is either present text (str) or
missing (None); the empty string never appears as a cell, it is only the
on-disk marker for missing. Every editing operation returns a new Dataset,
so earlier snapshots stay valid and can be shared across threads.

Facet order has a single source of truth, the position in ``facets``;
``order_index`` mirrors it so views and exports can annotate facets without
recomputing positions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Iterable

from . import hierarchy as hy
from .errors import (
    BadPermutation,
    ConflictingHierarchy,
    DuplicateFacetName,
    DuplicateIdentifier,
    MissingIdentifier,
    TypeViolation,
    UnknownFacet,
    UnknownFacetInConfig,
)
from .intervals import (
    IntervalSpecChain,
    chain_boundaries,
    interval_tree,
)
from .tabular import (
    HierarchyConfigEntry,
    HierarchySourceWarning,
    RawTable,
    parse_internal_path,
)
from .values import FACET_TYPES, canonical_cell

Cell = str | None  # None is the missing state
Row = tuple[Cell, ...]


@dataclass(frozen=True)
class Facet:
    name: str
    ftype: str = "string"
    visible: bool = True
    order_index: int = 0
    hierarchy: hy.TermTree | None = None
    intervals: IntervalSpecChain | None = None
    derivation: str | None = None

    def term_tree(self) -> hy.TermTree:
        """The tree shown for this facet: the hand-built hierarchy, or the
        one induced by its interval chain."""
        if self.hierarchy is not None:
            return self.hierarchy
        if self.intervals is not None:
            return interval_tree(self.intervals)
        return hy.TermTree()


@dataclass(frozen=True)
class Dataset:
    facets: tuple[Facet, ...] = ()
    rows: tuple[Row, ...] = ()
    identifier_facet: str | None = None

    def facet_index(self, name: str) -> int:
        for i, facet in enumerate(self.facets):
            if facet.name == name:
                return i
        raise UnknownFacet(name)

    def facet(self, name: str) -> Facet:
        return self.facets[self.facet_index(name)]

    def facet_names(self) -> list[str]:
        return [facet.name for facet in self.facets]

    def column(self, name: str) -> list[Cell]:
        idx = self.facet_index(name)
        return [row[idx] for row in self.rows]

    def present_values(self, name: str) -> list[str]:
        return [cell for cell in self.column(name) if cell is not None]


@dataclass
class ValueStats:
    value: str
    count: int


def _renumber(facets: Iterable[Facet]) -> tuple[Facet, ...]:
    return tuple(replace(f, order_index=i) for i, f in enumerate(facets))


def replace_facet(dataset: Dataset, idx: int, **changes) -> Dataset:
    facets = list(dataset.facets)
    facets[idx] = replace(facets[idx], **changes)
    return replace(dataset, facets=tuple(facets))


def _merge_path(
    tree: hy.TermTree,
    facet: str,
    path: list[str],
    claimed_by: dict[hy.NodeKey, str],
    source: str,
) -> hy.TermTree:
    """Merge one leaf-to-root path into a tree.

    The leaf becomes a data term, ancestors become grouping terms. A path
    claims parent(path[i]) = path[i+1] for every inner link; the topmost
    term's parent is left open so longer paths can extend above it later.
    Conflicting claims from the same source are errors; a config-file claim
    silently wins over an internal-path claim, with a warning.
    """
    nodes = dict(tree.nodes)
    for i, label in enumerate(path):
        cls = hy.VALUE if i == 0 else hy.GROUP
        kind = hy.DATA_TERM if i == 0 else hy.GROUP_TERM
        key = (cls, label)
        if i + 1 < len(path):
            parent_key = (hy.GROUP, path[i + 1])
        else:
            existing = nodes.get(key)
            parent_key = existing.parent if existing else None
        existing = nodes.get(key)
        if existing is not None and existing.parent is not None and i + 1 < len(path):
            if existing.parent != parent_key:
                previous_source = claimed_by.get(key, "internal")
                if source == "config" and previous_source == "internal":
                    warnings.warn(
                        f"config hierarchy for term {label!r} in facet {facet!r}"
                        " overrides an internal path",
                        HierarchySourceWarning,
                        stacklevel=3,
                    )
                else:
                    raise ConflictingHierarchy(facet, label)
        nodes[key] = hy.TermNode(label=label, kind=kind, parent=parent_key)
        if i + 1 < len(path):
            claimed_by[key] = source
    return hy.TermTree(nodes)


def build_dataset(
    raw: RawTable,
    config: list[HierarchyConfigEntry] = (),
    internal_paths: bool = True,
) -> Dataset:
    """Build a fresh dataset from a parsed table: one visible string facet
    per header column in file order. With *internal_paths* on (single-file
    sources) a cell containing "/" is a leaf-to-root hierarchy path: the
    leaf becomes the cell value and the rest merges into the facet's tree.
    Config entries merge the same way and win over internal paths.
    """
    trees: list[hy.TermTree] = [hy.TermTree() for _ in raw.header]
    claims: list[dict] = [{} for _ in raw.header]
    rows: list[Row] = []
    for raw_row in raw.rows:
        cells: list[Cell] = []
        for col, text in enumerate(raw_row):
            if text == "":
                cells.append(None)
            elif internal_paths and "/" in text:
                path = parse_internal_path(text)
                trees[col] = _merge_path(trees[col], raw.header[col], path, claims[col], "internal")
                cells.append(path[0])
            else:
                cells.append(text)
        rows.append(tuple(cells))

    name_to_col = {name: i for i, name in enumerate(raw.header)}
    for entry in config:
        col = name_to_col.get(entry.facet_name)
        if col is None:
            raise UnknownFacetInConfig(entry.facet_name)
        trees[col] = _merge_path(trees[col], entry.facet_name, entry.path, claims[col], "config")

    facets = tuple(
        Facet(name=name, order_index=i, hierarchy=trees[i] if trees[i] else None)
        for i, name in enumerate(raw.header)
    )
    return Dataset(facets=facets, rows=tuple(rows))


def set_facet_type(dataset: Dataset, facet: str, ftype: str) -> Dataset:
    """Declare a facet's type, checking every present cell and rewriting it
    to the canonical surface form. Identifier additionally requires all
    cells present and pairwise distinct, marks the facet as the dataset's
    identifier, and demotes any previous identifier facet to string."""
    if ftype not in FACET_TYPES:
        raise ValueError(f"unknown facet type: {ftype!r}")
    idx = dataset.facet_index(facet)

    new_rows: list[Row] = []
    if ftype == "identifier":
        seen: dict[str, int] = {}
        for row_index, row in enumerate(dataset.rows):
            cell = row[idx]
            if cell is None:
                raise MissingIdentifier(row_index)
            if cell in seen:
                raise DuplicateIdentifier(cell, seen[cell], row_index)
            seen[cell] = row_index
        new_rows = list(dataset.rows)
    else:
        for row_index, row in enumerate(dataset.rows):
            cell = row[idx]
            if cell is None:
                new_rows.append(row)
                continue
            try:
                canonical = canonical_cell(ftype, cell)
            except ValueError:
                raise TypeViolation(facet, row_index, cell) from None
            cells = list(row)
            cells[idx] = canonical
            new_rows.append(tuple(cells))

    facets = list(dataset.facets)
    identifier = dataset.identifier_facet
    if ftype == "identifier":
        if identifier is not None and identifier != facet:
            old_idx = dataset.facet_index(identifier)
            facets[old_idx] = replace(facets[old_idx], ftype="string")
        identifier = facet
    elif identifier == facet:
        identifier = None
    facets[idx] = replace(facets[idx], ftype=ftype)
    return Dataset(facets=tuple(facets), rows=tuple(new_rows), identifier_facet=identifier)


def distinct_values(dataset: Dataset, facet: str) -> tuple[list[ValueStats], int]:
    """Distinct present values with their frequencies, sorted
    lexicographically, plus the missing-cell count reported separately."""
    idx = dataset.facet_index(facet)
    counts: dict[str, int] = {}
    missing = 0
    for row in dataset.rows:
        cell = row[idx]
        if cell is None:
            missing += 1
        else:
            counts[cell] = counts.get(cell, 0) + 1
    stats = [ValueStats(value, counts[value]) for value in sorted(counts)]
    return stats, missing


def validate(dataset: Dataset) -> list[str]:
    """Check every dataset invariant; an empty list means exportable."""
    violations: list[str] = []

    seen: set[str] = set()
    for facet in dataset.facets:
        if facet.name in seen:
            violations.append(f"DuplicateFacetName: {facet.name}")
        seen.add(facet.name)

    arity = len(dataset.facets)
    for i, row in enumerate(dataset.rows):
        if len(row) != arity:
            violations.append(f"RowArity: row {i} has {len(row)} cells, expected {arity}")

    order = sorted(facet.order_index for facet in dataset.facets)
    if order != list(range(arity)):
        violations.append("FacetOrder: order_index values are not a permutation of 0..n-1")

    identifier_typed = [f.name for f in dataset.facets if f.ftype == "identifier"]
    if len(identifier_typed) > 1:
        violations.append(f"MultipleIdentifiers: {', '.join(identifier_typed)}")
    if dataset.identifier_facet is not None:
        if dataset.identifier_facet not in seen:
            violations.append(f"UnknownIdentifierFacet: {dataset.identifier_facet}")
        elif identifier_typed != [dataset.identifier_facet]:
            violations.append("IdentifierMismatch: identifier_facet and facet types disagree")
    elif identifier_typed:
        violations.append("IdentifierMismatch: identifier-typed facet not registered")

    for idx, facet in enumerate(dataset.facets):
        if facet.hierarchy is not None and facet.intervals is not None:
            violations.append(f"HierarchyAndIntervals: {facet.name}")
        if facet.hierarchy is not None:
            try:
                for key in facet.hierarchy.nodes:
                    facet.hierarchy.ancestors(key)
            except AssertionError:
                violations.append(f"HierarchyCycle: {facet.name}")
        column = [(i, row[idx]) for i, row in enumerate(dataset.rows)]
        if facet.ftype != "string":
            check_type = "string" if facet.ftype == "identifier" else facet.ftype
            for i, cell in column:
                if cell is None:
                    continue
                try:
                    canonical_cell(check_type, cell)
                except ValueError:
                    violations.append(f"TypeViolation: {facet.name} row {i}: {cell!r}")
        if facet.ftype == "identifier":
            ids: dict[str, int] = {}
            for i, cell in column:
                if cell is None:
                    violations.append(f"MissingIdentifier: row {i}")
                elif cell in ids:
                    violations.append(f"DuplicateIdentifier: {cell!r} rows {ids[cell]} and {i}")
                else:
                    ids[cell] = i
        if facet.intervals is not None:
            try:
                finest = chain_boundaries(facet.intervals)[-1]
            except Exception as exc:
                violations.append(f"BadIntervalChain: {facet.name}: {exc}")
                continue
            for i, cell in column:
                if cell is None:
                    continue
                try:
                    number = float(cell)
                except ValueError:
                    violations.append(f"TypeViolation: {facet.name} row {i}: {cell!r}")
                    continue
                if not finest[0] <= number <= finest[-1]:
                    violations.append(f"ValueOutOfRange: {facet.name} row {i}: {cell!r}")
    return violations


def rename_facet(dataset: Dataset, old: str, new: str) -> Dataset:
    idx = dataset.facet_index(old)
    if new != old and any(f.name == new for f in dataset.facets):
        raise DuplicateFacetName(new)
    dataset = replace_facet(dataset, idx, name=new)
    if dataset.identifier_facet == old:
        dataset = replace(dataset, identifier_facet=new)
    return dataset


def delete_facet(dataset: Dataset, name: str) -> Dataset:
    idx = dataset.facet_index(name)
    facets = _renumber(f for i, f in enumerate(dataset.facets) if i != idx)
    rows = tuple(tuple(c for i, c in enumerate(row) if i != idx) for row in dataset.rows)
    identifier = None if dataset.identifier_facet == name else dataset.identifier_facet
    return Dataset(facets=facets, rows=rows, identifier_facet=identifier)


def reorder_facets(dataset: Dataset, order: list[int]) -> Dataset:
    """Apply a full permutation: new position i shows the facet previously
    at position order[i]."""
    n = len(dataset.facets)
    if sorted(order) != list(range(n)):
        raise BadPermutation(f"not a permutation of 0..{n - 1}: {order!r}")
    facets = _renumber(dataset.facets[j] for j in order)
    rows = tuple(tuple(row[j] for j in order) for row in dataset.rows)
    return replace(dataset, facets=facets, rows=rows)


def move_facet(dataset: Dataset, name: str, new_index: int) -> Dataset:
    idx = dataset.facet_index(name)
    n = len(dataset.facets)
    if not 0 <= new_index < n:
        raise BadPermutation(f"new_index {new_index} out of range 0..{n - 1}")
    order = list(range(n))
    order.pop(idx)
    order.insert(new_index, idx)
    return reorder_facets(dataset, order)
