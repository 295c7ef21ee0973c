"""Interval structures over numeric facets.

Three spec kinds produce a strictly increasing boundary list:

- linear{min, max, width}: min, min+width, ... up to the first boundary at or
  above max, clamped to max on overshoot;
- logarithmic{min, max, base}: min*base^k until at or above max, clamped;
- explicit{bounds}: taken verbatim.

Boundaries b0..bn define n intervals labelled "[lo,hi)" except the last,
which is closed ("[lo,hi]") so max belongs to exactly one bucket. A chain of
specs, coarse to fine, builds a nested interval hierarchy: every coarse
boundary must reappear in the next finer level and the endpoints must agree,
so each fine interval has exactly one containing coarse interval. When a
fine interval coincides with its coarse container (same label), the two are
one term.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import (
    BrokenNesting,
    DegenerateSpec,
    NotNumericFacet,
    ValueOutOfRange,
)
from .hierarchy import GROUP, INTERVAL_TERM, TermNode, TermTree
from .values import render_number

if TYPE_CHECKING:  # pragma: no cover
    from .model import Dataset


@dataclass(frozen=True)
class LinearSpec:
    min: float
    max: float
    width: float
    kind = "linear"


@dataclass(frozen=True)
class LogarithmicSpec:
    min: float
    max: float
    base: float
    kind = "logarithmic"


@dataclass(frozen=True)
class ExplicitSpec:
    bounds: tuple[float, ...]
    kind = "explicit"


IntervalSpec = LinearSpec | LogarithmicSpec | ExplicitSpec

# a chain is a tuple of specs ordered coarse -> fine
IntervalSpecChain = tuple[IntervalSpec, ...]


def spec_to_params(spec: IntervalSpec) -> dict:
    if isinstance(spec, LinearSpec):
        return {"kind": "linear", "min": spec.min, "max": spec.max, "width": spec.width}
    if isinstance(spec, LogarithmicSpec):
        return {"kind": "logarithmic", "min": spec.min, "max": spec.max, "base": spec.base}
    return {"kind": "explicit", "bounds": list(spec.bounds)}


def spec_from_params(params: dict) -> IntervalSpec:
    kind = params.get("kind")
    if kind == "linear":
        return LinearSpec(float(params["min"]), float(params["max"]), float(params["width"]))
    if kind == "logarithmic":
        return LogarithmicSpec(float(params["min"]), float(params["max"]), float(params["base"]))
    if kind == "explicit":
        return ExplicitSpec(tuple(float(b) for b in params["bounds"]))
    raise DegenerateSpec(f"unknown interval spec kind: {kind!r}")


def build_boundaries(spec: IntervalSpec) -> list[float]:
    """Materialize a spec into its strictly increasing boundary list."""
    if isinstance(spec, LinearSpec):
        if not spec.min < spec.max:
            raise DegenerateSpec("linear spec needs min < max")
        if not spec.width > 0:
            raise DegenerateSpec("linear spec needs a positive width")
        bounds = [float(spec.min)]
        k = 1
        while bounds[-1] < spec.max:
            nxt = spec.min + k * spec.width
            bounds.append(float(min(nxt, spec.max)))
            k += 1
        return bounds
    if isinstance(spec, LogarithmicSpec):
        if not spec.min > 0:
            raise DegenerateSpec("logarithmic spec needs min > 0")
        if not spec.min < spec.max:
            raise DegenerateSpec("logarithmic spec needs min < max")
        if not spec.base > 1:
            raise DegenerateSpec("logarithmic spec needs base > 1")
        bounds = [float(spec.min)]
        k = 1
        while bounds[-1] < spec.max:
            nxt = spec.min * spec.base**k
            bounds.append(float(min(nxt, spec.max)))
            k += 1
        return bounds
    if isinstance(spec, ExplicitSpec):
        bounds = [float(b) for b in spec.bounds]
        if len(bounds) < 2:
            raise DegenerateSpec("explicit spec needs at least 2 bounds")
        if any(a >= b for a, b in zip(bounds, bounds[1:])):
            raise DegenerateSpec("explicit bounds must be strictly increasing")
        return bounds
    raise DegenerateSpec(f"unknown spec: {spec!r}")


def interval_label(lo: float, hi: float, closed: bool) -> str:
    right = "]" if closed else ")"
    return f"[{render_number(lo)},{render_number(hi)}{right}"


def intervals_from_boundaries(bounds: list[float]) -> list[str]:
    """Labels of the n-1 intervals defined by n boundaries; the last interval
    is closed, the others half-open."""
    if len(bounds) < 2:
        raise DegenerateSpec("need at least 2 boundaries")
    labels = []
    for i in range(len(bounds) - 1):
        labels.append(interval_label(bounds[i], bounds[i + 1], closed=i == len(bounds) - 2))
    return labels


def finest_index(bounds: list[float], value: float) -> int:
    """Index of the interval containing *value*; the shared max belongs to
    the last (closed) interval. Raises IndexError out of range."""
    if value < bounds[0] or value > bounds[-1]:
        raise IndexError(value)
    if value == bounds[-1]:
        return len(bounds) - 2
    return bisect.bisect_right(bounds, value) - 1


def chain_boundaries(chain: IntervalSpecChain) -> list[list[float]]:
    """Boundary lists per level, validated for proper nesting: shared
    endpoints and every coarse boundary present in the next finer level."""
    if not chain:
        raise DegenerateSpec("empty interval chain")
    levels = [build_boundaries(spec) for spec in chain]
    for level in range(len(levels) - 1):
        coarse, fine = levels[level], levels[level + 1]
        if coarse[0] != fine[0]:
            raise BrokenNesting(level, coarse[0])
        if coarse[-1] != fine[-1]:
            raise BrokenNesting(level, coarse[-1])
        fine_set = set(fine)
        for boundary in coarse:
            if boundary not in fine_set:
                raise BrokenNesting(level, boundary)
    return levels


def interval_tree(chain: IntervalSpecChain) -> TermTree:
    """The term tree a chain induces: one interval term per bucket per level,
    finer terms parented by their containing coarser term. A fine bucket
    whose label equals its container's is the same unrefined interval and
    collapses into one node."""
    levels = chain_boundaries(chain)
    nodes: dict = {}
    previous: list[tuple[float, float, str]] | None = None
    for bounds in levels:
        segments = []
        for i in range(len(bounds) - 1):
            closed = i == len(bounds) - 2
            label = interval_label(bounds[i], bounds[i + 1], closed)
            segments.append((bounds[i], bounds[i + 1], label))
            parent = None
            if previous is not None:
                for plo, phi, plabel in previous:
                    if plo <= bounds[i] and bounds[i + 1] <= phi:
                        parent = plabel
                        break
            if parent == label:
                continue  # unrefined segment, already a node at the coarser level
            key = (GROUP, label)
            parent_key = None if parent is None else (GROUP, parent)
            nodes[key] = TermNode(label=label, kind=INTERVAL_TERM, parent=parent_key)
        previous = segments
    return TermTree(nodes)


def assignment_for_values(chain: IntervalSpecChain, values: list[str]) -> dict[str, str]:
    """Map each distinct value text to its finest interval label."""
    finest = chain_boundaries(chain)[-1]
    labels = intervals_from_boundaries(finest)
    mapping: dict[str, str] = {}
    for text in values:
        if text in mapping:
            continue
        mapping[text] = labels[finest_index(finest, float(text))]
    return mapping


def apply_intervals(dataset: "Dataset", facet: str, chain: IntervalSpecChain) -> "Dataset":
    """Attach an interval chain to a numeric facet, replacing any term
    hierarchy. Cell values stay untouched; every present value must fall
    inside the finest level's range."""
    from .model import replace_facet

    idx = dataset.facet_index(facet)
    f = dataset.facets[idx]
    if f.ftype not in ("integer", "float"):
        raise NotNumericFacet(facet, f.ftype)
    finest = chain_boundaries(chain)[-1]
    offenders = [
        (row_index, row[idx])
        for row_index, row in enumerate(dataset.rows)
        if row[idx] is not None and not finest[0] <= float(row[idx]) <= finest[-1]
    ]
    if offenders:
        raise ValueOutOfRange(offenders)
    return replace_facet(dataset, idx, hierarchy=None, intervals=tuple(chain))


def interval_assignment(dataset: "Dataset", facet: str) -> dict[str, str]:
    """The recorded value-to-finest-interval mapping of an interval facet."""
    idx = dataset.facet_index(facet)
    f = dataset.facets[idx]
    if f.intervals is None:
        raise ValueError(f"facet {facet!r} has no intervals")
    present = [row[idx] for row in dataset.rows if row[idx] is not None]
    return assignment_for_values(f.intervals, present)
