"""Exception hierarchy for the whole package.

Every error raised on purpose derives from :class:`FacetprepError`, so the
replay path can convert any failed transformation into a skip-with-warning
outcome without swallowing genuine bugs (which surface as ordinary
exceptions).
"""

from __future__ import annotations


class FacetprepError(Exception):
    """Base class for all errors this package raises deliberately."""


# ---------------------------------------------------------------------------
# Tabular parsing / serialization


class TableError(FacetprepError):
    pass


class EmptyInput(TableError):
    def __init__(self) -> None:
        super().__init__("input contains no records")


class InvalidUtf8(TableError):
    def __init__(self, offset: int) -> None:
        self.offset = offset
        super().__init__(f"input is not valid UTF-8 (byte offset {offset})")


class DuplicateHeader(TableError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"duplicate header name: {name!r}")


class EmptyHeaderName(TableError):
    def __init__(self, position: int) -> None:
        self.position = position
        super().__init__(f"header column {position} is empty after trimming")


class RaggedRow(TableError):
    def __init__(self, line_no: int, expected: int, found: int) -> None:
        self.line_no = line_no
        self.expected = expected
        self.found = found
        super().__init__(
            f"line {line_no}: expected {expected} cells, found {found}"
        )


class UnserializableCell(TableError):
    """A cell cannot be written in the requested delimiter format (tab or
    newline inside a TSV cell); quoting is only defined for CSV."""

    def __init__(self, detail: str) -> None:
        super().__init__(detail)


class EmptyPathSegment(TableError):
    def __init__(self, position: int, line_no: int | None = None) -> None:
        self.position = position
        self.line_no = line_no
        where = f" on line {line_no}" if line_no is not None else ""
        super().__init__(f"empty path segment at position {position}{where}")


class TooFewSegments(TableError):
    def __init__(self, line_no: int) -> None:
        self.line_no = line_no
        super().__init__(
            f"line {line_no}: a hierarchy entry needs at least a term and a facet name"
        )


class ObjectIdNotSingleColumn(TableError):
    def __init__(self, found: int) -> None:
        self.found = found
        super().__init__(f"object id file must have exactly 1 column, found {found}")


class DuplicateObjectId(TableError):
    def __init__(self, object_id: str) -> None:
        self.object_id = object_id
        super().__init__(f"duplicate object id: {object_id!r}")


class InvalidObjectId(TableError):
    def __init__(self, row_index: int) -> None:
        self.row_index = row_index
        super().__init__(f"object id in row {row_index} is empty")


class InvalidDimensionFile(TableError):
    def __init__(self, facet_name: str, found: int) -> None:
        self.facet_name = facet_name
        self.found = found
        super().__init__(
            f"dimension file for {facet_name!r} must have 2 columns, found {found}"
        )


class ConflictingValue(TableError):
    def __init__(self, object_id: str, facet: str) -> None:
        self.object_id = object_id
        self.facet = facet
        super().__init__(
            f"object {object_id!r} is given two different values for {facet!r}"
        )


class HierarchyCycle(TableError):
    def __init__(self, facet: str, term: str) -> None:
        self.facet = facet
        self.term = term
        super().__init__(f"hierarchy cycle in facet {facet!r} through term {term!r}")


# ---------------------------------------------------------------------------
# Dataset model


class ModelError(FacetprepError):
    pass


class UnknownFacet(ModelError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown facet: {name!r}")


class DuplicateFacetName(ModelError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"facet name already in use: {name!r}")


class UnknownFacetInConfig(ModelError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"hierarchy config references unknown facet: {name!r}")


class ConflictingHierarchy(ModelError):
    def __init__(self, facet: str, term: str) -> None:
        self.facet = facet
        self.term = term
        super().__init__(
            f"term {term!r} in facet {facet!r} is given two different parents"
        )


class TypeViolation(ModelError):
    def __init__(self, facet: str, row_index: int, value: str) -> None:
        self.facet = facet
        self.row_index = row_index
        self.value = value
        super().__init__(
            f"value {value!r} in facet {facet!r} (row {row_index}) does not parse"
            " under the requested type"
        )


class DuplicateIdentifier(ModelError):
    def __init__(self, value: str, row_a: int, row_b: int) -> None:
        self.value = value
        self.row_a = row_a
        self.row_b = row_b
        super().__init__(
            f"identifier value {value!r} appears in rows {row_a} and {row_b}"
        )


class MissingIdentifier(ModelError):
    def __init__(self, row_index: int) -> None:
        self.row_index = row_index
        super().__init__(f"row {row_index} has no identifier value")


# ---------------------------------------------------------------------------
# Hierarchy operations


class TreeError(FacetprepError):
    pass


class CycleWouldForm(TreeError):
    def __init__(self, child: str, parent: str) -> None:
        self.child = child
        self.parent = parent
        super().__init__(
            f"making {parent!r} the parent of {child!r} would form a cycle"
        )


class UnknownChild(TreeError):
    def __init__(self, label: str) -> None:
        self.label = label
        super().__init__(f"unknown child term: {label!r}")


class UnknownTerm(TreeError):
    def __init__(self, label: str) -> None:
        self.label = label
        super().__init__(f"unknown term: {label!r}")


class NoMatch(TreeError):
    def __init__(self, pattern: str) -> None:
        self.pattern = pattern
        super().__init__(f"no facet value matches {pattern!r}")


class LabelCollision(TreeError):
    def __init__(self, label: str) -> None:
        self.label = label
        super().__init__(f"label {label!r} already denotes a different kind of term")


# ---------------------------------------------------------------------------
# Intervals


class IntervalError(FacetprepError):
    pass


class DegenerateSpec(IntervalError):
    def __init__(self, detail: str) -> None:
        super().__init__(detail)


class NotNumericFacet(IntervalError):
    def __init__(self, facet: str, ftype: str) -> None:
        self.facet = facet
        self.ftype = ftype
        super().__init__(
            f"facet {facet!r} has type {ftype!r}; intervals need integer or float"
        )


class ValueOutOfRange(IntervalError):
    def __init__(self, offenders: list[tuple[int, str]]) -> None:
        self.offenders = offenders
        self.row, self.value = offenders[0]
        listing = ", ".join(f"row {r}: {v!r}" for r, v in offenders)
        super().__init__(f"values outside the interval range: {listing}")


class BrokenNesting(IntervalError):
    def __init__(self, level: int, boundary: float) -> None:
        self.level = level
        self.boundary = boundary
        super().__init__(
            f"boundary {boundary} of level {level} is not a boundary of the next"
            " finer level"
        )


# ---------------------------------------------------------------------------
# Expressions


class ExpressionError(FacetprepError):
    pass


class ExprSyntaxError(ExpressionError):
    def __init__(self, position: int, expected: str) -> None:
        self.position = position
        self.expected = expected
        super().__init__(f"syntax error at position {position}: expected {expected}")


class UnknownFacetRef(ExpressionError):
    def __init__(self, name: str, row: int | None = None) -> None:
        self.name = name
        self.row = row
        super().__init__(f"expression references unknown facet: {name!r}")


class TypeMismatch(ExpressionError):
    def __init__(self, op: str, got: str, row: int | None = None) -> None:
        self.op = op
        self.got = got
        self.row = row
        super().__init__(f"operator {op!r} cannot be applied to {got}")


class DivisionByZero(ExpressionError):
    def __init__(self, row: int | None = None) -> None:
        self.row = row
        where = f" (row {row})" if row is not None else ""
        super().__init__(f"division by zero{where}")


# ---------------------------------------------------------------------------
# Transformation engine


class EngineError(FacetprepError):
    pass


class BadPermutation(EngineError):
    def __init__(self, detail: str) -> None:
        super().__init__(detail)


class RowKeyNotFound(EngineError):
    def __init__(self, row_key: object) -> None:
        self.row_key = row_key
        super().__init__(f"no row addressed by {row_key!r}")


class OldValueAbsent(EngineError):
    def __init__(self, facet: str, old: str) -> None:
        self.facet = facet
        self.old = old
        super().__init__(f"facet {facet!r} contains no cell equal to {old!r}")


class InvalidCondition(EngineError):
    def __init__(self, detail: str) -> None:
        super().__init__(detail)


class InvalidOperation(EngineError):
    def __init__(self, detail: str) -> None:
        super().__init__(detail)


class UnknownTransformationType(EngineError):
    def __init__(self, type_name: str) -> None:
        self.type_name = type_name
        super().__init__(f"unknown transformation type: {type_name!r}")


class BadTransformationParams(EngineError):
    def __init__(self, type_name: str, detail: str) -> None:
        self.type_name = type_name
        super().__init__(f"bad parameters for {type_name}: {detail}")


class NothingToUndo(EngineError):
    def __init__(self) -> None:
        super().__init__("nothing to undo")


class NothingToRedo(EngineError):
    def __init__(self) -> None:
        super().__init__("nothing to redo")


# ---------------------------------------------------------------------------
# SPARQL client


class SparqlError(FacetprepError):
    pass


class NotSelectQuery(SparqlError):
    def __init__(self) -> None:
        super().__init__("only SELECT queries are supported")


class NetworkError(SparqlError):
    def __init__(self, detail: str) -> None:
        super().__init__(f"network error: {detail}")


class HttpStatusError(SparqlError):
    def __init__(self, code: int) -> None:
        self.code = code
        super().__init__(f"endpoint answered HTTP {code}")


class QueryTimeout(SparqlError):
    def __init__(self) -> None:
        super().__init__("query timed out")


class MalformedResults(SparqlError):
    def __init__(self, detail: str) -> None:
        super().__init__(f"malformed results document: {detail}")


class DuplicateLabel(SparqlError):
    def __init__(self, label: str) -> None:
        self.label = label
        super().__init__(f"favourite label already in use: {label!r}")


class UnknownLabel(SparqlError):
    def __init__(self, label: str) -> None:
        self.label = label
        super().__init__(f"no favourite labelled {label!r}")


# ---------------------------------------------------------------------------
# RDF export


class ValidationFailed(FacetprepError):
    def __init__(self, violations: list[str]) -> None:
        self.violations = violations
        super().__init__(
            "dataset does not validate: " + "; ".join(violations)
        )


# ---------------------------------------------------------------------------
# Project persistence


class ProjectError(FacetprepError):
    pass


class ProjectIoError(ProjectError):
    def __init__(self, detail: str) -> None:
        super().__init__(detail)


class MissingFile(ProjectError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"missing project file: {name}")


class FormatVersionUnsupported(ProjectError):
    def __init__(self, version: object) -> None:
        self.version = version
        super().__init__(f"unsupported project format version: {version!r}")


class CorruptLogLine(ProjectError):
    def __init__(self, line_no: int, detail: str) -> None:
        self.line_no = line_no
        self.detail = detail
        super().__init__(f"corrupt log line {line_no}: {detail}")


class ProjectLocked(ProjectError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"project is locked by another writer: {path}")
