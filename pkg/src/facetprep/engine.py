"""The single mutation path: transformations, apply, undo/redo, replay.

Every edit is a serializable tagged record. Interactive use applies records
one at a time and raises on failure; replay folds a whole log over a source
dataset and converts failures into skip-with-warning outcomes, which is what
makes project refreshing safe when the source data changed underneath the
log.

Undo is prefix replay from the pristine source snapshot rather than per-kind
inverses: correct by construction, and cheap at the dataset sizes this tool
works on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dataclass_fields

from . import expressions, hierarchy, intervals, model
from .errors import (
    BadTransformationParams,
    FacetprepError,
    InvalidCondition,
    InvalidOperation,
    MissingIdentifier,
    NothingToRedo,
    NothingToUndo,
    OldValueAbsent,
    RowKeyNotFound,
    TypeViolation,
    DuplicateIdentifier,
    UnknownTransformationType,
)
from .values import NUMERIC_TYPES, canonical_cell

# ---------------------------------------------------------------------------
# Row conditions

CONDITION_OPS = ("=", "!=", "<", "<=", ">", ">=", "contains", "startsWith", "isMissing")
_ORDERING_OPS = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class Conjunct:
    facet: str
    op: str
    literal: str | None = None


@dataclass(frozen=True)
class RowCondition:
    conjuncts: tuple[Conjunct, ...]

    def to_params(self) -> dict:
        return {
            "conjuncts": [
                {"facet": c.facet, "op": c.op, "literal": c.literal} for c in self.conjuncts
            ]
        }

    @classmethod
    def from_params(cls, params: dict) -> "RowCondition":
        raw = params.get("conjuncts")
        if not raw:
            raise InvalidCondition("a condition needs at least one conjunct")
        conjuncts = []
        for item in raw:
            op = item.get("op")
            if op not in CONDITION_OPS:
                raise InvalidCondition(f"unknown condition operator: {op!r}")
            literal = item.get("literal")
            conjuncts.append(
                Conjunct(
                    facet=str(item["facet"]),
                    op=op,
                    literal=None if literal is None else str(literal),
                )
            )
        return cls(tuple(conjuncts))


def row_matches(dataset: model.Dataset, row: model.Row, cond: RowCondition) -> bool:
    for c in cond.conjuncts:
        idx = dataset.facet_index(c.facet)
        cell = row[idx]
        if c.op == "isMissing":
            if cell is not None:
                return False
            continue
        if cell is None:
            return False  # a missing cell satisfies only isMissing
        if c.op in _ORDERING_OPS:
            ftype = dataset.facets[idx].ftype
            if ftype not in NUMERIC_TYPES:
                raise InvalidCondition(
                    f"ordering comparison needs a numeric facet, {c.facet!r} is {ftype}"
                )
            try:
                a, b = float(cell), float(c.literal)
            except (TypeError, ValueError):
                raise InvalidCondition(f"non-numeric literal {c.literal!r}") from None
            ok = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[c.op]
        elif c.op == "=":
            ok = cell == c.literal
        elif c.op == "!=":
            ok = cell != c.literal
        elif c.op == "contains":
            ok = c.literal is not None and c.literal in cell
        else:  # startsWith
            ok = c.literal is not None and cell.startswith(c.literal)
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# Transformation vocabulary


@dataclass(frozen=True)
class DeleteRows:
    cond: RowCondition


@dataclass(frozen=True)
class AddRow:
    cells: tuple[str, ...]


@dataclass(frozen=True)
class EditCell:
    row_key: str | int
    facet: str
    new_value: str


@dataclass(frozen=True)
class ReplaceValue:
    facet: str
    old: str
    new: str


@dataclass(frozen=True)
class RenameFacet:
    old: str
    new: str


@dataclass(frozen=True)
class SetFacetType:
    facet: str
    ftype: str


@dataclass(frozen=True)
class SetVisibility:
    facet: str
    visible: bool


@dataclass(frozen=True)
class ReorderFacets:
    permutation: tuple[int, ...]


@dataclass(frozen=True)
class DeleteFacet:
    facet: str


@dataclass(frozen=True)
class MoveFacet:
    facet: str
    new_index: int


@dataclass(frozen=True)
class AddParent:
    facet: str
    children: tuple[str, ...]
    parent: str


@dataclass(frozen=True)
class MoveTerm:
    facet: str
    term: str
    new_parent: str | None


@dataclass(frozen=True)
class GroupByPrefix:
    facet: str
    prefix: str


@dataclass(frozen=True)
class GroupByLetterRange:
    facet: str
    from_letter: str
    to_letter: str


@dataclass(frozen=True)
class DefineIntervals:
    facet: str
    chain: intervals.IntervalSpecChain


@dataclass(frozen=True)
class DeriveFacet:
    name: str
    expression: str


@dataclass(frozen=True)
class RemoveEmptyRows:
    pass


@dataclass(frozen=True)
class DeleteRowsWithMissing:
    facet: str | None = None


Transformation = (
    DeleteRows
    | AddRow
    | EditCell
    | ReplaceValue
    | RenameFacet
    | SetFacetType
    | SetVisibility
    | ReorderFacets
    | DeleteFacet
    | MoveFacet
    | AddParent
    | MoveTerm
    | GroupByPrefix
    | GroupByLetterRange
    | DefineIntervals
    | DeriveFacet
    | RemoveEmptyRows
    | DeleteRowsWithMissing
)

TRANSFORMATION_TYPES: dict[str, type] = {
    "DeleteRows": DeleteRows,
    "AddRow": AddRow,
    "EditCell": EditCell,
    "ReplaceValue": ReplaceValue,
    "RenameFacet": RenameFacet,
    "SetFacetType": SetFacetType,
    "SetVisibility": SetVisibility,
    "ReorderFacets": ReorderFacets,
    "DeleteFacet": DeleteFacet,
    "MoveFacet": MoveFacet,
    "AddParent": AddParent,
    "MoveTerm": MoveTerm,
    "GroupByPrefix": GroupByPrefix,
    "GroupByLetterRange": GroupByLetterRange,
    "DefineIntervals": DefineIntervals,
    "DeriveFacet": DeriveFacet,
    "RemoveEmptyRows": RemoveEmptyRows,
    "DeleteRowsWithMissing": DeleteRowsWithMissing,
}

_TYPE_NAMES = {cls: name for name, cls in TRANSFORMATION_TYPES.items()}

# JSON key names; dataclass fields map 1:1 except "from"/"to", which are
# Python keywords.
_PARAM_KEYS = {"from_letter": "from", "to_letter": "to"}
_FIELD_NAMES = {v: k for k, v in _PARAM_KEYS.items()}


def type_name(t: Transformation) -> str:
    return _TYPE_NAMES[type(t)]


def to_params(t: Transformation) -> dict:
    """The wire/log parameter object of a transformation, with a fixed key
    order (dataclass field order)."""
    params: dict = {}
    for f in dataclass_fields(t):
        value = getattr(t, f.name)
        key = _PARAM_KEYS.get(f.name, f.name)
        if isinstance(t, DeleteRows) and f.name == "cond":
            params[key] = value.to_params()
        elif isinstance(t, DefineIntervals) and f.name == "chain":
            params[key] = [intervals.spec_to_params(s) for s in value]
        elif isinstance(value, tuple):
            params[key] = list(value)
        else:
            params[key] = value
    return params


def from_params(name: str, params: dict) -> Transformation:
    cls = TRANSFORMATION_TYPES.get(name)
    if cls is None:
        raise UnknownTransformationType(name)
    params = dict(params or {})
    kwargs = {}
    try:
        for f in dataclass_fields(cls):
            key = _PARAM_KEYS.get(f.name, f.name)
            if key not in params:
                optional = (cls is MoveTerm and f.name == "new_parent") or (
                    cls is DeleteRowsWithMissing and f.name == "facet"
                )
                if optional:
                    kwargs[f.name] = None
                    continue
                raise BadTransformationParams(name, f"missing parameter {key!r}")
            value = params.pop(key)
            if cls is DeleteRows and f.name == "cond":
                kwargs[f.name] = RowCondition.from_params(value)
            elif cls is DefineIntervals and f.name == "chain":
                kwargs[f.name] = tuple(intervals.spec_from_params(s) for s in value)
            elif cls is AddRow and f.name == "cells":
                kwargs[f.name] = tuple(str(c) for c in value)
            elif cls is AddParent and f.name == "children":
                kwargs[f.name] = tuple(str(c) for c in value)
            elif cls is ReorderFacets and f.name == "permutation":
                kwargs[f.name] = tuple(int(i) for i in value)
            else:
                kwargs[f.name] = value
        if params:
            raise BadTransformationParams(name, f"unexpected parameter(s) {sorted(params)}")
        return cls(**kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadTransformationParams(name, str(exc)) from None


# ---------------------------------------------------------------------------
# Apply


@dataclass(frozen=True)
class ApplyOutcome:
    status: str  # "applied" | "skipped"
    reason: str | None = None

    @property
    def applied(self) -> bool:
        return self.status == "applied"


APPLIED = ApplyOutcome("applied")


def _typed_cell(dataset: model.Dataset, idx: int, text: str, row_index: int) -> str | None:
    """Canonicalize incoming cell text under the facet's declared type; the
    empty string is the missing marker."""
    if text == "":
        return None
    facet = dataset.facets[idx]
    check = "string" if facet.ftype == "identifier" else facet.ftype
    try:
        return canonical_cell(check, text)
    except ValueError:
        raise TypeViolation(facet.name, row_index, text) from None


def _check_identifier(dataset: model.Dataset) -> None:
    if dataset.identifier_facet is None:
        return
    idx = dataset.facet_index(dataset.identifier_facet)
    seen: dict[str, int] = {}
    for i, row in enumerate(dataset.rows):
        cell = row[idx]
        if cell is None:
            raise MissingIdentifier(i)
        if cell in seen:
            raise DuplicateIdentifier(cell, seen[cell], i)
        seen[cell] = i


def _hierarchy_target(dataset: model.Dataset, facet: str) -> tuple[int, hierarchy.TermTree]:
    idx = dataset.facet_index(facet)
    f = dataset.facets[idx]
    if f.intervals is not None:
        raise InvalidOperation(
            f"facet {facet!r} has intervals; hierarchy operations do not apply"
        )
    return idx, f.hierarchy or hierarchy.TermTree()


def _locate_row(dataset: model.Dataset, row_key: str | int) -> int:
    if dataset.identifier_facet is not None and isinstance(row_key, str):
        idx = dataset.facet_index(dataset.identifier_facet)
        for i, row in enumerate(dataset.rows):
            if row[idx] == row_key:
                return i
        raise RowKeyNotFound(row_key)
    if isinstance(row_key, bool) or not isinstance(row_key, int):
        raise RowKeyNotFound(row_key)
    if not 0 <= row_key < len(dataset.rows):
        raise RowKeyNotFound(row_key)
    return row_key


def apply(dataset: model.Dataset, t: Transformation) -> tuple[model.Dataset, ApplyOutcome]:
    """Apply one transformation, returning the new dataset. Failures raise;
    the replay path turns them into skip outcomes."""
    if isinstance(t, DeleteRows):
        kept = tuple(row for row in dataset.rows if not row_matches(dataset, row, t.cond))
        return model.Dataset(dataset.facets, kept, dataset.identifier_facet), APPLIED

    if isinstance(t, AddRow):
        if len(t.cells) != len(dataset.facets):
            raise BadTransformationParams(
                "AddRow", f"expected {len(dataset.facets)} cells, got {len(t.cells)}"
            )
        row_index = len(dataset.rows)
        row = tuple(
            _typed_cell(dataset, i, text, row_index) for i, text in enumerate(t.cells)
        )
        out = model.Dataset(dataset.facets, dataset.rows + (row,), dataset.identifier_facet)
        _check_identifier(out)
        return out, APPLIED

    if isinstance(t, EditCell):
        idx = dataset.facet_index(t.facet)
        row_index = _locate_row(dataset, t.row_key)
        cell = _typed_cell(dataset, idx, t.new_value, row_index)
        rows = list(dataset.rows)
        cells = list(rows[row_index])
        cells[idx] = cell
        rows[row_index] = tuple(cells)
        out = model.Dataset(dataset.facets, tuple(rows), dataset.identifier_facet)
        _check_identifier(out)
        return out, APPLIED

    if isinstance(t, ReplaceValue):
        idx = dataset.facet_index(t.facet)
        hits = [i for i, row in enumerate(dataset.rows) if row[idx] == t.old]
        if not hits:
            raise OldValueAbsent(t.facet, t.old)
        new_cell = _typed_cell(dataset, idx, t.new, hits[0])
        rows = list(dataset.rows)
        for i in hits:
            cells = list(rows[i])
            cells[idx] = new_cell
            rows[i] = tuple(cells)
        out = model.Dataset(dataset.facets, tuple(rows), dataset.identifier_facet)
        _check_identifier(out)
        return out, APPLIED

    if isinstance(t, RenameFacet):
        return model.rename_facet(dataset, t.old, t.new), APPLIED

    if isinstance(t, SetFacetType):
        return model.set_facet_type(dataset, t.facet, t.ftype), APPLIED

    if isinstance(t, SetVisibility):
        idx = dataset.facet_index(t.facet)
        return model.replace_facet(dataset, idx, visible=bool(t.visible)), APPLIED

    if isinstance(t, ReorderFacets):
        return model.reorder_facets(dataset, list(t.permutation)), APPLIED

    if isinstance(t, DeleteFacet):
        return model.delete_facet(dataset, t.facet), APPLIED

    if isinstance(t, MoveFacet):
        return model.move_facet(dataset, t.facet, t.new_index), APPLIED

    if isinstance(t, AddParent):
        idx, tree = _hierarchy_target(dataset, t.facet)
        values = tuple(sorted(set(dataset.present_values(t.facet))))
        tree = hierarchy.add_parent(tree, list(t.children), t.parent, facet_values=values)
        return model.replace_facet(dataset, idx, hierarchy=tree), APPLIED

    if isinstance(t, MoveTerm):
        idx, tree = _hierarchy_target(dataset, t.facet)
        tree = hierarchy.move_term(tree, t.term, t.new_parent)
        return model.replace_facet(dataset, idx, hierarchy=tree), APPLIED

    if isinstance(t, GroupByPrefix):
        idx, tree = _hierarchy_target(dataset, t.facet)
        values = sorted(set(dataset.present_values(t.facet)))
        tree = hierarchy.group_by_prefix(tree, values, t.prefix)
        return model.replace_facet(dataset, idx, hierarchy=tree), APPLIED

    if isinstance(t, GroupByLetterRange):
        idx, tree = _hierarchy_target(dataset, t.facet)
        values = sorted(set(dataset.present_values(t.facet)))
        tree = hierarchy.group_by_letter_range(tree, values, t.from_letter, t.to_letter)
        return model.replace_facet(dataset, idx, hierarchy=tree), APPLIED

    if isinstance(t, DefineIntervals):
        return intervals.apply_intervals(dataset, t.facet, t.chain), APPLIED

    if isinstance(t, DeriveFacet):
        return expressions.derive_facet(dataset, t.name, t.expression), APPLIED

    if isinstance(t, RemoveEmptyRows):
        kept = tuple(row for row in dataset.rows if any(cell is not None for cell in row))
        return model.Dataset(dataset.facets, kept, dataset.identifier_facet), APPLIED

    if isinstance(t, DeleteRowsWithMissing):
        if t.facet is None:
            kept = tuple(row for row in dataset.rows if all(cell is not None for cell in row))
        else:
            idx = dataset.facet_index(t.facet)
            kept = tuple(row for row in dataset.rows if row[idx] is not None)
        return model.Dataset(dataset.facets, kept, dataset.identifier_facet), APPLIED

    raise UnknownTransformationType(type(t).__name__)


def replay(
    source: model.Dataset, log: list[Transformation]
) -> tuple[model.Dataset, list[ApplyOutcome]]:
    """Fold the log over a source dataset. A failing step is reported as a
    skip and leaves the dataset untouched; the fold never aborts."""
    dataset = source
    outcomes: list[ApplyOutcome] = []
    for t in log:
        try:
            dataset, outcome = apply(dataset, t)
        except FacetprepError as exc:
            outcome = ApplyOutcome("skipped", reason=str(exc))
        outcomes.append(outcome)
    return dataset, outcomes


# ---------------------------------------------------------------------------
# Session: current state + history


@dataclass
class Session:
    """A live editing session: the pristine source snapshot, the applied
    log, and the redo stack. The dataset always equals the replay of the
    applied log over the source."""

    source: model.Dataset
    dataset: model.Dataset = None  # type: ignore[assignment]
    applied: list[Transformation] = field(default_factory=list)
    outcomes: list[ApplyOutcome] = field(default_factory=list)
    redo_stack: list[Transformation] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.dataset is None:
            self.dataset = self.source

    def apply(self, t: Transformation) -> ApplyOutcome:
        """Interactive apply: raises on failure, clears the redo branch on
        success."""
        self.dataset, outcome = apply(self.dataset, t)
        self.applied.append(t)
        self.outcomes.append(outcome)
        self.redo_stack.clear()
        return outcome

    def undo(self) -> None:
        if not self.applied:
            raise NothingToUndo()
        last = self.applied.pop()
        self.outcomes.pop()
        self.redo_stack.append(last)
        self.dataset, self.outcomes = replay(self.source, self.applied)

    def redo(self) -> None:
        if not self.redo_stack:
            raise NothingToRedo()
        t = self.redo_stack.pop()
        self.dataset, outcome = apply(self.dataset, t)
        self.applied.append(t)
        self.outcomes.append(outcome)

    def refresh(self, new_source: model.Dataset) -> list[ApplyOutcome]:
        """Re-point the session at a new source and replay the whole applied
        log over it; the redo branch is discarded."""
        self.source = new_source
        self.dataset, self.outcomes = replay(new_source, self.applied)
        self.redo_stack.clear()
        return list(self.outcomes)
