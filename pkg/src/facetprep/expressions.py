"""A small expression language for derived facets.

Concrete syntax:

- facet references in braces: ``{Pets allowed}`` (a facet name must not
  contain ``}``);
- double-quoted string literals with backslash escapes (\\" \\\\ \\n \\t \\r);
- numbers (decimal or scientific), ``true``/``false``;
- ``++`` concatenates, ``+ - * /`` compute, ``= != < <= > >=`` compare;
- functions: ``upper(e)``, ``lower(e)``, ``trim(e)``, ``substr(e, start, len)``,
  ``round(e)`` and the conditional ``if(cond, then, else)``.

Precedence, tightest first: unary minus, ``* /``, ``+ -``, ``++``,
comparisons. Evaluation is strict about missing data: a reference to a
missing cell makes the whole result missing (the conditional only evaluates
the branch it takes, so an untaken branch cannot poison the result).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import (
    DivisionByZero,
    DuplicateFacetName,
    ExpressionError,
    ExprSyntaxError,
    TypeMismatch,
    UnknownFacetRef,
)
from .values import is_float_text, render_number

if TYPE_CHECKING:  # pragma: no cover
    from .model import Dataset, Row


@dataclass(frozen=True)
class StringLit:
    value: str


@dataclass(frozen=True)
class NumberLit:
    value: float


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class FacetRef:
    name: str


@dataclass(frozen=True)
class Concat:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Arith:
    op: str  # + - * /
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Compare:
    op: str  # = != < <= > >=
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class If:
    cond: "Expression"
    then: "Expression"
    otherwise: "Expression"


@dataclass(frozen=True)
class Call:
    fn: str  # upper | lower | trim | substr | round
    args: tuple["Expression", ...]


Expression = StringLit | NumberLit | BoolLit | FacetRef | Concat | Arith | Compare | If | Call

_FUNCTIONS = {"upper": 1, "lower": 1, "trim": 1, "substr": 3, "round": 1}

_MISSING = object()


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass
class _Token:
    kind: str
    text: str
    position: int


_TWO_CHAR = ("++", "!=", "<=", ">=")
_ONE_CHAR = "+-*/=<>(),"


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text[i : i + 2] in _TWO_CHAR:
            tokens.append(_Token("op", text[i : i + 2], i))
            i += 2
            continue
        if ch == "{":
            end = text.find("}", i + 1)
            if end == -1:
                raise ExprSyntaxError(i, "closing '}' for facet reference")
            name = text[i + 1 : end].strip()
            if not name:
                raise ExprSyntaxError(i, "facet name inside braces")
            tokens.append(_Token("facet", name, i))
            i = end + 1
            continue
        if ch == '"':
            out = []
            j = i + 1
            while True:
                if j >= n:
                    raise ExprSyntaxError(i, "closing quote")
                c = text[j]
                if c == "\\":
                    if j + 1 >= n:
                        raise ExprSyntaxError(j, "escape character")
                    esc = text[j + 1]
                    mapped = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}.get(esc)
                    if mapped is None:
                        raise ExprSyntaxError(j, "valid escape (\\\" \\\\ \\n \\t \\r)")
                    out.append(mapped)
                    j += 2
                    continue
                if c == '"':
                    break
                out.append(c)
                j += 1
            tokens.append(_Token("string", "".join(out), i))
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] in ".eE" or (
                text[j] in "+-" and j > i and text[j - 1] in "eE"
            )):
                j += 1
            literal = text[i:j]
            if not is_float_text(literal):
                raise ExprSyntaxError(i, "number")
            tokens.append(_Token("number", literal, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch in _ONE_CHAR:
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise ExprSyntaxError(i, "a token")
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect_op(self, text: str) -> None:
        token = self.peek()
        if token.kind != "op" or token.text != text:
            raise ExprSyntaxError(token.position, repr(text))
        self.advance()

    def parse(self) -> Expression:
        expr = self.comparison()
        token = self.peek()
        if token.kind != "end":
            raise ExprSyntaxError(token.position, "end of expression")
        return expr

    def comparison(self) -> Expression:
        left = self.concat()
        while self.peek().kind == "op" and self.peek().text in ("=", "!=", "<", "<=", ">", ">="):
            op = self.advance().text
            left = Compare(op, left, self.concat())
        return left

    def concat(self) -> Expression:
        left = self.additive()
        while self.peek().kind == "op" and self.peek().text == "++":
            self.advance()
            left = Concat(left, self.additive())
        return left

    def additive(self) -> Expression:
        left = self.multiplicative()
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            op = self.advance().text
            left = Arith(op, left, self.multiplicative())
        return left

    def multiplicative(self) -> Expression:
        left = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            op = self.advance().text
            left = Arith(op, left, self.unary())
        return left

    def unary(self) -> Expression:
        token = self.peek()
        if token.kind == "op" and token.text == "-":
            self.advance()
            operand = self.unary()
            if isinstance(operand, NumberLit):
                return NumberLit(-operand.value)
            return Arith("-", NumberLit(0.0), operand)
        return self.primary()

    def primary(self) -> Expression:
        token = self.advance()
        if token.kind == "number":
            return NumberLit(float(token.text))
        if token.kind == "string":
            return StringLit(token.text)
        if token.kind == "facet":
            return FacetRef(token.text)
        if token.kind == "ident":
            if token.text == "true":
                return BoolLit(True)
            if token.text == "false":
                return BoolLit(False)
            if token.text == "if":
                self.expect_op("(")
                cond = self.comparison()
                self.expect_op(",")
                then = self.comparison()
                self.expect_op(",")
                otherwise = self.comparison()
                self.expect_op(")")
                return If(cond, then, otherwise)
            if token.text in _FUNCTIONS:
                self.expect_op("(")
                args = [self.comparison()]
                while self.peek().kind == "op" and self.peek().text == ",":
                    self.advance()
                    args.append(self.comparison())
                self.expect_op(")")
                if len(args) != _FUNCTIONS[token.text]:
                    raise ExprSyntaxError(
                        token.position, f"{_FUNCTIONS[token.text]} argument(s) to {token.text}"
                    )
                return Call(token.text, tuple(args))
            raise ExprSyntaxError(token.position, "a known function or literal")
        if token.kind == "op" and token.text == "(":
            expr = self.comparison()
            self.expect_op(")")
            return expr
        raise ExprSyntaxError(token.position, "an expression")


def parse_expression(text: str) -> Expression:
    return _Parser(_tokenize(text)).parse()


# ---------------------------------------------------------------------------
# Pretty printer

_PREC = {Compare: 1, Concat: 2, Arith: 3, Call: 6}


def _prec(e: Expression) -> int:
    if isinstance(e, Arith):
        return 3 if e.op in ("+", "-") else 4
    return _PREC.get(type(e), 6)


def _escape(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    return out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")


def pretty_print(e: Expression) -> str:
    """Render an expression back to parseable text; reparsing yields an
    equal tree."""

    def wrap(child: Expression, parent_prec: int, right_side: bool) -> str:
        text = pretty_print(child)
        child_prec = _prec(child)
        if child_prec < parent_prec or (right_side and child_prec == parent_prec):
            return f"({text})"
        return text

    if isinstance(e, StringLit):
        return f'"{_escape(e.value)}"'
    if isinstance(e, NumberLit):
        return render_number(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, FacetRef):
        return "{" + e.name + "}"
    if isinstance(e, Concat):
        return f"{wrap(e.left, 2, False)} ++ {wrap(e.right, 2, True)}"
    if isinstance(e, Arith):
        p = _prec(e)
        return f"{wrap(e.left, p, False)} {e.op} {wrap(e.right, p, True)}"
    if isinstance(e, Compare):
        return f"{wrap(e.left, 1, False)} {e.op} {wrap(e.right, 1, True)}"
    if isinstance(e, If):
        parts = ", ".join(pretty_print(x) for x in (e.cond, e.then, e.otherwise))
        return f"if({parts})"
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(pretty_print(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation


def _coerce_number(value, op: str) -> float:
    if isinstance(value, bool):
        raise TypeMismatch(op, "boolean")
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            raise TypeMismatch(op, f"non-numeric string {value!r}") from None
    raise TypeMismatch(op, type(value).__name__)


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return render_number(value)
    return value


def _eval(e: Expression, row: "Row", dataset: "Dataset"):
    if isinstance(e, StringLit):
        return e.value
    if isinstance(e, NumberLit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, FacetRef):
        try:
            idx = dataset.facet_index(e.name)
        except Exception:
            raise UnknownFacetRef(e.name) from None
        cell = row[idx]
        return _MISSING if cell is None else cell
    if isinstance(e, Concat):
        left = _eval(e.left, row, dataset)
        if left is _MISSING:
            return _MISSING
        right = _eval(e.right, row, dataset)
        if right is _MISSING:
            return _MISSING
        return _render(left) + _render(right)
    if isinstance(e, Arith):
        left = _eval(e.left, row, dataset)
        if left is _MISSING:
            return _MISSING
        right = _eval(e.right, row, dataset)
        if right is _MISSING:
            return _MISSING
        a = _coerce_number(left, e.op)
        b = _coerce_number(right, e.op)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise DivisionByZero()
        return a / b
    if isinstance(e, Compare):
        left = _eval(e.left, row, dataset)
        if left is _MISSING:
            return _MISSING
        right = _eval(e.right, row, dataset)
        if right is _MISSING:
            return _MISSING
        if e.op in ("<", "<=", ">", ">="):
            a = _coerce_number(left, e.op)
            b = _coerce_number(right, e.op)
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[e.op]
        numeric = True
        try:
            a, b = _coerce_number(left, e.op), _coerce_number(right, e.op)
        except TypeMismatch:
            numeric = False
        if numeric:
            equal = a == b
        elif isinstance(left, bool) and isinstance(right, bool):
            equal = left == right
        else:
            equal = _render(left) == _render(right)
        return equal if e.op == "=" else not equal
    if isinstance(e, If):
        cond = _eval(e.cond, row, dataset)
        if cond is _MISSING:
            return _MISSING
        if not isinstance(cond, bool):
            raise TypeMismatch("if", type(cond).__name__)
        return _eval(e.then if cond else e.otherwise, row, dataset)
    if isinstance(e, Call):
        args = []
        for arg in e.args:
            value = _eval(arg, row, dataset)
            if value is _MISSING:
                return _MISSING
            args.append(value)
        if e.fn in ("upper", "lower", "trim"):
            (text,) = args
            if not isinstance(text, str):
                raise TypeMismatch(e.fn, type(text).__name__)
            return {"upper": text.upper(), "lower": text.lower(), "trim": text.strip()}[e.fn]
        if e.fn == "round":
            return float(round(_coerce_number(args[0], "round")))
        if e.fn == "substr":
            text = args[0]
            if not isinstance(text, str):
                raise TypeMismatch("substr", type(text).__name__)
            start = int(_coerce_number(args[1], "substr"))
            length = int(_coerce_number(args[2], "substr"))
            start = max(start, 0)
            return text[start : start + max(length, 0)]
        raise TypeMismatch(e.fn, "unknown function")
    raise TypeError(f"not an expression: {e!r}")


def evaluate(e: Expression, row: "Row", dataset: "Dataset") -> str | None:
    """Evaluate against one row; the result is canonical cell text, or None
    when a referenced cell is missing."""
    value = _eval(e, row, dataset)
    return None if value is _MISSING else _render(value)


def derive_facet(dataset: "Dataset", new_name: str, expression: "Expression | str") -> "Dataset":
    """Append a visible string facet computed per row by *expression*; the
    expression source is stored on the facet so replay re-derives it."""
    from .model import Dataset, Facet

    if isinstance(expression, str):
        source = expression
        expr = parse_expression(expression)
    else:
        expr = expression
        source = pretty_print(expression)
    if any(f.name == new_name for f in dataset.facets):
        raise DuplicateFacetName(new_name)

    cells: list[str | None] = []
    for row_index, row in enumerate(dataset.rows):
        try:
            cells.append(evaluate(expr, row, dataset))
        except ExpressionError as exc:
            exc.row = row_index
            exc.args = (f"{exc.args[0]} (row {row_index})",)
            raise
    facet = Facet(name=new_name, order_index=len(dataset.facets), derivation=source)
    rows = tuple(row + (cell,) for row, cell in zip(dataset.rows, cells))
    return Dataset(
        facets=dataset.facets + (facet,),
        rows=rows,
        identifier_facet=dataset.identifier_facet,
    )
