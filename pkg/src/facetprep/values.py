"""Cell typing and canonical text rendering.

Cells live as text. A facet's declared type constrains which texts are
accepted and rewrites accepted texts into one canonical surface form so that
exports are deterministic:

- integer: no leading zeros, no "+" sign ("007" becomes "7")
- float: shortest round-trip decimal (Python ``repr``)
- boolean: lower-case "true"/"false"
- latitude/longitude: float form, range-checked
- string/identifier: kept verbatim
"""

from __future__ import annotations

import re

FACET_TYPES = (
    "string",
    "integer",
    "float",
    "boolean",
    "identifier",
    "latitude",
    "longitude",
)

NUMERIC_TYPES = ("integer", "float", "latitude", "longitude")

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def is_integer_text(text: str) -> bool:
    return _INT_RE.match(text) is not None


def is_float_text(text: str) -> bool:
    return _FLOAT_RE.match(text) is not None


def render_number(x: float) -> str:
    """Render a number for labels and computed values: integral floats drop
    the trailing ".0" so interval labels read "[0,200)" rather than
    "[0.0,200.0)"."""
    if isinstance(x, int):
        return str(x)
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def canonical_cell(ftype: str, text: str) -> str:
    """Return the canonical surface form of *text* under *ftype*.

    Raises ValueError when the text does not parse under the type; callers
    wrap that into their own error vocabulary.
    """
    if ftype in ("string", "identifier"):
        return text
    if ftype == "integer":
        if not is_integer_text(text):
            raise ValueError(f"not an integer literal: {text!r}")
        return str(int(text))
    if ftype == "float":
        if not is_float_text(text):
            raise ValueError(f"not a float literal: {text!r}")
        return repr(float(text))
    if ftype == "boolean":
        lowered = text.lower()
        if lowered not in ("true", "false"):
            raise ValueError(f"not a boolean literal: {text!r}")
        return lowered
    if ftype == "latitude":
        if not is_float_text(text):
            raise ValueError(f"not a latitude: {text!r}")
        value = float(text)
        if not -90.0 <= value <= 90.0:
            raise ValueError(f"latitude out of range: {text!r}")
        return repr(value)
    if ftype == "longitude":
        if not is_float_text(text):
            raise ValueError(f"not a longitude: {text!r}")
        value = float(text)
        if not -180.0 <= value <= 180.0:
            raise ValueError(f"longitude out of range: {text!r}")
        return repr(value)
    raise ValueError(f"unknown facet type: {ftype!r}")
