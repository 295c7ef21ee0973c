"""Seeded random tables and transformations for the randomized suites.

The generator is type-aware: once a facet is numeric or carries intervals it
only proposes values that keep the dataset exportable, so determinism checks
can compare canonical RDF instead of special-casing invalid states. Failures
are still plentiful (unknown terms, absent old values, bad groupings), which
is what the skip paths are for.
"""

from __future__ import annotations

import random

from facetprep.engine import (
    AddParent,
    AddRow,
    DefineIntervals,
    DeleteFacet,
    DeleteRows,
    DeleteRowsWithMissing,
    DeriveFacet,
    EditCell,
    GroupByLetterRange,
    GroupByPrefix,
    MoveFacet,
    MoveTerm,
    RemoveEmptyRows,
    RenameFacet,
    ReorderFacets,
    ReplaceValue,
    RowCondition,
    Conjunct,
    SetFacetType,
    SetVisibility,
    Transformation,
)
from facetprep.intervals import LinearSpec
from facetprep.model import Dataset, build_dataset
from facetprep.tabular import RawTable

_WORDS = ["alpha", "beta", "Gamma", "delta", "Epsilon", "zeta", "Chania", "Heraklion"]
_TRICKY = ['a,b', 'say "hi"', 'line\nbreak', '  padded', "semi;colon"]

INTERVAL_CHAIN = (LinearSpec(0, 100, 50), LinearSpec(0, 100, 25))


def random_table(rng: random.Random, tricky_cells: bool = False) -> RawTable:
    n_cols = rng.randint(2, 5)
    header = [f"F{i}" for i in range(n_cols)]
    vocab = list(_WORDS)
    if tricky_cells:
        vocab += [t.strip() for t in _TRICKY]
    rows = []
    for _ in range(rng.randint(2, 8)):
        row = []
        for col in range(n_cols):
            kind = rng.random()
            if kind < 0.15:
                row.append("")
            elif kind < 0.45:
                row.append(str(rng.randint(0, 100)))
            else:
                row.append(rng.choice(vocab))
        rows.append(row)
    return RawTable(header=header, rows=rows)


def random_dataset(rng: random.Random) -> Dataset:
    return build_dataset(random_table(rng), internal_paths=False)


def _value_for(rng: random.Random, dataset: Dataset, facet_name: str) -> str:
    facet = dataset.facet(facet_name)
    if facet.intervals is not None or facet.ftype == "integer":
        return str(rng.randint(0, 100))
    if facet.ftype == "float":
        return f"{rng.randint(0, 100)}.{rng.randint(0, 9)}"
    if facet.ftype == "boolean":
        return rng.choice(["true", "false"])
    if facet.ftype in ("latitude", "longitude"):
        return f"{rng.randint(-89, 89)}.5"
    return rng.choice([*_WORDS, ""])


def random_transformation(rng: random.Random, dataset: Dataset) -> Transformation:
    names = dataset.facet_names()
    if not names:
        return RemoveEmptyRows()
    facet = rng.choice(names)
    present = dataset.present_values(facet)
    kind = rng.randrange(16)
    if kind == 0 and present:
        return DeleteRows(RowCondition((Conjunct(facet, "=", rng.choice(present)),)))
    if kind == 1:
        return AddRow(tuple(_value_for(rng, dataset, n) for n in names))
    if kind == 2 and dataset.rows:
        return EditCell(rng.randrange(len(dataset.rows)), facet, _value_for(rng, dataset, facet))
    if kind == 3 and present:
        return ReplaceValue(facet, rng.choice(present), _value_for(rng, dataset, facet))
    if kind == 4:
        return SetVisibility(facet, rng.random() < 0.5)
    if kind == 5:
        perm = list(range(len(names)))
        rng.shuffle(perm)
        return ReorderFacets(tuple(perm))
    if kind == 6:
        return MoveFacet(facet, rng.randrange(len(names)))
    if kind == 7 and present:
        return AddParent(facet, (rng.choice(present),), f"G{rng.randrange(6)}")
    if kind == 8 and present:
        return GroupByPrefix(facet, rng.choice(present)[:1])
    if kind == 9:
        return GroupByLetterRange(facet, "a", rng.choice("dhz"))
    if kind == 10 and present:
        return MoveTerm(facet, rng.choice(present), None)
    if kind == 11:
        return SetFacetType(facet, rng.choice(["string", "integer"]))
    if kind == 12:
        return DefineIntervals(facet, INTERVAL_CHAIN)
    if kind == 13:
        return DeriveFacet(f"D{rng.randrange(1000)}", "{%s} ++ \"!\"" % facet)
    if kind == 14 and len(names) > 2:
        return DeleteFacet(facet)
    if kind == 15:
        return DeleteRowsWithMissing(facet if rng.random() < 0.5 else None)
    return RenameFacet(facet, f"{facet}x{rng.randrange(100)}")


def perturb_table(rng: random.Random, table: RawTable) -> RawTable:
    """A plausibly refreshed source: drop a row, add a row, rewrite a cell."""
    rows = [list(r) for r in table.rows]
    if rows and rng.random() < 0.7:
        rows.pop(rng.randrange(len(rows)))
    if rng.random() < 0.7:
        rows.append([rng.choice([*_WORDS, str(rng.randint(0, 100)), ""]) for _ in table.header])
    if rows and rng.random() < 0.7:
        row = rng.choice(rows)
        row[rng.randrange(len(row))] = rng.choice([*_WORDS, str(rng.randint(0, 100)), ""])
    return RawTable(header=list(table.header), rows=rows)
