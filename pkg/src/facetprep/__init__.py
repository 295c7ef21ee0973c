"""facetprep: prepare tabular and SPARQL-sourced data for faceted exploration.

The pipeline: parse a source into a :class:`~facetprep.model.Dataset`, edit
it through logged :mod:`~facetprep.engine` transformations (types, value
fixes, term hierarchies, interval buckets, derived facets), persist the log
as a project, and export the result as canonical RDF for a faceted-search
consumer. An HTTP service and a CLI drive the same engine.
"""

from .engine import ApplyOutcome, RowCondition, Session, Transformation, apply, replay
from .model import Dataset, Facet, ValueStats, build_dataset, distinct_values, set_facet_type, validate
from .tabular import RawTable, parse_table, serialize_table

__all__ = [
    "ApplyOutcome",
    "Dataset",
    "Facet",
    "RawTable",
    "RowCondition",
    "Session",
    "Transformation",
    "ValueStats",
    "apply",
    "build_dataset",
    "distinct_values",
    "parse_table",
    "replay",
    "serialize_table",
    "set_facet_type",
    "validate",
]
