"""Parsers and serializers with round-trip guarantees.

Five value kinds travel through text: lattices and maps use line-oriented
formats, formulas and sequents an infix grammar, and derivations a nested
s-expression format.  All files are ASCII with ``#`` comments to end of line;
parse errors carry a source span pointing inside the offending token plus the
set of expected tokens.

The multiplicative conjunction ``*`` is non-associative and the grammar makes
that unavoidable: a second ``*`` at the same level is a parse error, so
nesting always needs explicit parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import singledispatch

from omlogic.kernel import AxiomApp, Derivation, RULE_ARITY, RuleApp
from omlogic.lattice import FiniteOrthoLattice, LatticeError
from omlogic.propagation import PowersetMap, perfect_measurement_map
from omlogic.syntax import (
    Actual,
    Const,
    Constraint,
    Forall,
    Formula,
    Induced,
    Lolli,
    Measurement,
    OrthoTerm,
    Plus,
    Reachable,
    Sequent,
    Tensor,
    Term,
    Var,
    ascii_formula,
    ascii_sequent,
    ascii_term,
    normalize_formula,
)

__all__ = [
    "SourceSpan",
    "ParseError",
    "parse_lattice",
    "parse_map",
    "parse_formula",
    "parse_sequent",
    "parse_derivation",
    "serialize",
]


@dataclass(frozen=True)
class SourceSpan:
    line: int  # 1-based
    column: int  # 1-based
    length: int


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected: frozenset[str] = frozenset()):
        self.span = span
        self.expected = expected
        hint = f" (expected {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{span.line}:{span.column}: {message}{hint}")


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


# -- line-oriented formats -------------------------------------------------------


def _line_tokens(text: str):
    """Yield (line_number, [(column, token), ...]) for nonempty lines."""
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if toks:
            yield ln, toks


def _line_error(msg, ln, col, tok, expected=frozenset()):
    raise ParseError(msg, SourceSpan(ln, col, max(1, len(tok))), frozenset(expected))


def parse_lattice(text: str) -> FiniteOrthoLattice:
    """Parse the lattice format:

        lattice <name>
        elements <id> ...     # must include 0 and 1
        leq <x> <y>           # generating pair, closed reflexively/transitively
        ortho <x> <y>         # symmetric; the pair 0 1 is implied
        end
    """
    name = None
    elements: list[str] = []
    leq: list[tuple[str, str]] = []
    ortho: list[tuple[str, str]] = []
    ended = False
    for ln, toks in _line_tokens(text):
        col, head = toks[0]
        if ended:
            _line_error("content after 'end'", ln, col, head)
        if head == "lattice":
            if name is not None or len(toks) != 2:
                _line_error("malformed 'lattice' line", ln, col, head, {"lattice <name>"})
            name = toks[1][1]
        elif name is None:
            _line_error("file must start with 'lattice <name>'", ln, col, head, {"lattice"})
        elif head == "elements":
            if len(toks) < 2:
                _line_error("'elements' needs at least one name", ln, col, head)
            for c, t in toks[1:]:
                if t in elements:
                    _line_error(f"duplicate element name {t!r}", ln, c, t)
                elements.append(t)
        elif head in ("leq", "ortho"):
            if len(toks) != 3:
                _line_error(f"'{head}' takes two element names", ln, col, head)
            x, y = toks[1][1], toks[2][1]
            for c, t in toks[1:]:
                if t not in elements:
                    _line_error(f"unknown element {t!r}", ln, c, t)
            (leq if head == "leq" else ortho).append((x, y))
        elif head == "end":
            ended = True
        else:
            _line_error(
                f"unknown directive {head!r}", ln, col, head,
                {"elements", "leq", "ortho", "end"},
            )
    if name is None:
        raise ParseError("empty lattice file", SourceSpan(1, 1, 1), frozenset({"lattice"}))
    if not ended:
        raise ParseError("missing 'end'", SourceSpan(text.count("\n") + 1, 1, 1), frozenset({"end"}))
    try:
        return FiniteOrthoLattice(name, elements, leq, ortho)
    except LatticeError as err:
        raise ParseError(str(err), SourceSpan(1, 1, max(1, len(name)))) from err


def parse_map(text: str, lat: FiniteOrthoLattice) -> PowersetMap:
    """Parse the map format:

        map <name> over <lattice>
        on <element> -> {e1, e2, ...}   # one line per nonzero element
        end

    A perfect-measurement map may instead be written as a single line
    ``measure <a>``, expanded on load.
    """
    name = None
    measured = None
    action: dict[str, set[str]] = {}
    ended = False
    for ln, toks in _line_tokens(text):
        col, head = toks[0]
        if ended:
            _line_error("content after 'end'", ln, col, head)
        if head == "map":
            words = [t for _, t in toks]
            if name is not None or len(words) != 4 or words[2] != "over":
                _line_error("malformed 'map' line", ln, col, head, {"map <name> over <lattice>"})
            name = words[1]
            if words[3] != lat.name:
                _line_error(
                    f"map is over lattice {words[3]!r}, not {lat.name!r}",
                    ln, toks[3][0], words[3],
                )
        elif name is None:
            _line_error("file must start with 'map <name> over <lattice>'", ln, col, head, {"map"})
        elif head == "measure":
            if len(toks) != 2:
                _line_error("'measure' takes one element", ln, col, head)
            c, el = toks[1]
            if el not in lat:
                _line_error(f"unknown element {el!r}", ln, c, el)
            measured = el
        elif head == "on":
            rest = " ".join(t for _, t in toks)
            m = re.fullmatch(r"on\s+(\S+)\s+->\s*\{([^{}]*)\}", rest)
            if not m:
                _line_error("malformed 'on' line", ln, col, head, {"on <element> -> {…}"})
            el = m.group(1)
            if el not in lat:
                _line_error(f"unknown element {el!r}", ln, toks[1][0], el)
            if el in action:
                _line_error(f"duplicate 'on' line for {el!r}", ln, toks[1][0], el)
            values = [v.strip() for v in m.group(2).split(",") if v.strip()]
            for v in values:
                if v not in lat:
                    _line_error(f"unknown element {v!r}", ln, col, v)
            action[el] = set(values)
        elif head == "end":
            ended = True
        else:
            _line_error(
                f"unknown directive {head!r}", ln, col, head, {"on", "measure", "end"}
            )
    if name is None:
        raise ParseError("empty map file", SourceSpan(1, 1, 1), frozenset({"map"}))
    if not ended:
        raise ParseError("missing 'end'", SourceSpan(text.count("\n") + 1, 1, 1), frozenset({"end"}))
    if measured is not None:
        if action:
            raise ParseError(
                "'measure' and 'on' lines cannot be mixed", SourceSpan(1, 1, 1)
            )
        f = perfect_measurement_map(lat, measured)
        return PowersetMap(lat, dict(f.items()), kind="measurement", label=name, measured=measured)
    missing = [e for e in lat.nonzero() if e not in action]
    if missing:
        raise ParseError(
            f"missing 'on' line for {missing[0]!r}", SourceSpan(1, 1, 1), frozenset({"on"})
        )
    try:
        return PowersetMap(lat, action, label=name)
    except ValueError as err:
        raise ParseError(str(err), SourceSpan(1, 1, 1)) from err


# -- formula and sequent grammar ---------------------------------------------------


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<lolli>-o)
  | (?P<turnstile>\|-)
  | (?P<nleq>!<=)
  | (?P<notin>!in)
  | (?P<leq><=)
  | (?P<name>[A-Za-z0-9_][A-Za-z0-9_']*)
  | (?P<punct>[()*+,.{}])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Token]:
    out = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                SourceSpan(line, pos - line_start + 1, 1),
            )
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            out.append(
                _Token(
                    "punct" if kind == "punct" else kind,
                    tok,
                    SourceSpan(line, pos - line_start + 1, len(tok)),
                )
            )
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(_Token("eof", "", SourceSpan(line, len(text) - line_start + 1, 1)))
    return out


_ATOM_HEADS = ("In", "R", "M", "IND")


class _FormulaParser:
    def __init__(self, text: str, lat: FiniteOrthoLattice):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.lat = lat
        self.bound: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, expected=frozenset(), token: _Token | None = None):
        tok = token or self.peek()
        raise ParseError(message, tok.span, frozenset(expected))

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", {text})
        return self.advance()

    # grammar: formula := lolli; lolli := sum [-o lolli];
    # sum := product (+ product)*; product := unit [* unit];
    # unit := atom | ( formula ) | forall

    def parse_formula_text(self) -> Formula:
        f = self.formula()
        if self.peek().kind != "eof":
            self.error(f"trailing input {self.peek().text!r}", {"end of input"})
        return normalize_formula(f, self.lat)

    def parse_sequent_text(self) -> Sequent:
        ctx: list[Formula] = []
        if self.peek().kind != "turnstile":
            ctx.append(self.formula())
            while self.peek().text == ",":
                self.advance()
                ctx.append(self.formula())
        if self.peek().kind != "turnstile":
            self.error("expected '|-'", {"|-", ","})
        self.advance()
        rhs = self.formula()
        if self.peek().kind != "eof":
            self.error(f"trailing input {self.peek().text!r}", {"end of input"})
        return Sequent(
            tuple(normalize_formula(f, self.lat) for f in ctx),
            normalize_formula(rhs, self.lat),
        )

    def formula(self) -> Formula:
        left = self.sum()
        if self.peek().kind == "lolli":
            self.advance()
            return Lolli(left, self.formula())
        return left

    def sum(self) -> Formula:
        out = self.product()
        while self.peek().text == "+":
            self.advance()
            out = Plus(out, self.product())
        return out

    def product(self) -> Formula:
        left = self.unit()
        if self.peek().text != "*":
            return left
        self.advance()
        right = self.unit()
        if self.peek().text == "*":
            self.error(
                "'*' is non-associative; parenthesize nested conjunctions",
                {"+", "-o", ")", ",", "|-", "end of input"},
            )
        return Tensor(left, right)

    def unit(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if tok.text == "forall":
            return self.forall()
        if tok.kind == "name" and tok.text in _ATOM_HEADS:
            return self.atom()
        self.error(
            f"expected a formula, found {tok.text or 'end of input'!r}",
            {"In", "R", "M", "IND", "(", "forall"},
        )

    def atom(self) -> Formula:
        head = self.advance()
        self.expect("(")
        if head.text == "IND":
            name = self.peek()
            if name.kind != "name":
                self.error("expected a map name", {"<name>"})
            self.advance()
            self.expect(")")
            return Induced(name.text)
        term = self.term()
        self.expect(")")
        ctor = {"In": Actual, "R": Reachable, "M": Measurement}[head.text]
        self._check_const(term, head)
        return ctor(term)

    def _check_const(self, term: Term, head: _Token) -> None:
        if isinstance(term, Const) and head.text in ("In", "R") and term.name == "0":
            self.error(f"{head.text} cannot hold the absurd property 0", token=head)

    def term(self) -> Term:
        tok = self.peek()
        if tok.text == "ortho":
            self.advance()
            self.expect("(")
            inner = self.term()
            self.expect(")")
            return OrthoTerm(inner)
        if tok.kind != "name":
            self.error("expected a term", {"<name>", "ortho"})
        self.advance()
        if tok.text in self.bound:
            return Var(tok.text)
        if tok.text in self.lat:
            return Const(tok.text)
        return Var(tok.text)

    def forall(self) -> Formula:
        self.expect("forall")
        var = self.peek()
        if var.kind != "name":
            self.error("expected a variable name", {"<name>"})
        self.advance()
        guard: list[Constraint] = []
        if self.peek().text == "{":
            self.advance()
            if self.peek().text != "}":
                guard.append(self.constraint())
                while self.peek().text == ",":
                    self.advance()
                    guard.append(self.constraint())
            self.expect("}")
        self.expect(".")
        self.bound.append(var.text)
        try:
            body = self.formula()
        finally:
            self.bound.pop()
        return Forall(var.text, tuple(guard), body)

    def constraint(self) -> Constraint:
        tok = self.peek()
        if tok.kind == "leq":
            self.advance()
            return Constraint("<=", self.term())
        if tok.kind == "nleq":
            self.advance()
            return Constraint("!<=", self.term())
        if tok.kind == "notin":
            self.advance()
            self.expect("K")
            self.expect("(")
            name = self.peek()
            if name.kind != "name":
                self.error("expected a map name", {"<name>"})
            self.advance()
            self.expect(")")
            return Constraint("!inK", name.text)
        self.error("expected a guard constraint", {"<=", "!<=", "!in"})


def parse_formula(text: str, lat: FiniteOrthoLattice) -> Formula:
    return _FormulaParser(text, lat).parse_formula_text()


def parse_sequent(text: str, lat: FiniteOrthoLattice) -> Sequent:
    return _FormulaParser(text, lat).parse_sequent_text()


# -- derivation s-expressions -------------------------------------------------------


_SEXPR_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<string>"[^"\n]*")
  | (?P<eq>=)
  | (?P<name>[A-Za-z0-9_'-][A-Za-z0-9_'-]*)
    """,
    re.VERBOSE,
)


class _DerivationParser:
    def __init__(self, text: str, lat: FiniteOrthoLattice):
        self.lat = lat
        self.tokens: list[_Token] = []
        line, line_start, pos = 1, 0, 0
        while pos < len(text):
            m = _SEXPR_RE.match(text, pos)
            if not m:
                raise ParseError(
                    f"unexpected character {text[pos]!r}",
                    SourceSpan(line, pos - line_start + 1, 1),
                )
            kind, tok = m.lastgroup, m.group()
            if kind not in ("ws", "comment"):
                self.tokens.append(
                    _Token(kind, tok, SourceSpan(line, pos - line_start + 1, len(tok)))
                )
            if "\n" in tok:
                line += tok.count("\n")
                line_start = pos + tok.rindex("\n") + 1
            pos = m.end()
        self.tokens.append(_Token("eof", "", SourceSpan(line, len(text) - line_start + 1, 1)))
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, expected=frozenset(), token=None):
        raise ParseError(message, (token or self.peek()).span, frozenset(expected))

    def expect_open(self, *heads: str) -> str:
        if self.peek().kind != "open":
            self.error("expected '('", {"("})
        self.advance()
        head = self.peek()
        if head.kind != "name" or (heads and head.text not in heads):
            self.error(f"unexpected node head {head.text!r}", set(heads))
        self.advance()
        return head.text

    def expect_close(self):
        if self.peek().kind != "close":
            self.error("expected ')'", {")"})
        self.advance()

    def parse(self) -> Derivation:
        node = self.node()
        if self.peek().kind != "eof":
            self.error("trailing input after derivation", {"end of input"})
        return node

    def node(self) -> Derivation:
        head = self.expect_open("rule", "axiom")
        if head == "rule":
            return self.rule_node()
        return self.axiom_node()

    def rule_node(self) -> RuleApp:
        name_tok = self.peek()
        if name_tok.kind != "name" or name_tok.text not in RULE_ARITY:
            self.error(f"unknown rule {name_tok.text!r}", set(RULE_ARITY))
        self.advance()
        seq = self.seq_field()
        witness = None
        if self.peek().kind == "open" and self.tokens[self.pos + 1].text == "witness":
            self.advance()
            self.advance()
            witness = self.witness_term()
            self.expect_close()
        children = []
        while self.peek().kind == "open":
            children.append(self.node())
        self.expect_close()
        return RuleApp(name_tok.text, seq, tuple(children), witness)

    def axiom_node(self) -> AxiomApp:
        name_tok = self.peek()
        if name_tok.kind != "name":
            self.error("expected a schema name", {"<schema>"})
        self.advance()
        self.expect_open("bind")
        bindings = []
        while self.peek().kind == "name":
            var = self.advance()
            if self.peek().kind != "eq":
                self.error("expected '=' in binding", {"="})
            self.advance()
            val = self.peek()
            if val.kind != "name":
                self.error("expected a binding value", {"<name>"})
            self.advance()
            bindings.append((var.text, val.text))
        self.expect_close()
        seq = self.seq_field()
        self.expect_close()
        return AxiomApp(name_tok.text, tuple(sorted(bindings)), seq)

    def seq_field(self) -> Sequent:
        self.expect_open("seq")
        tok = self.peek()
        if tok.kind != "string":
            self.error("expected a quoted sequent", {'"<sequent>"'})
        self.advance()
        try:
            seq = parse_sequent(tok.text[1:-1], self.lat)
        except ParseError as err:
            raise ParseError(
                f"in sequent string: {err}", tok.span, err.expected
            ) from err
        self.expect_close()
        return seq

    def witness_term(self) -> Term:
        # witness terms share the formula term grammar: name | ortho(name)
        tok = self.peek()
        if tok.kind != "name":
            self.error("expected a witness term", {"<name>", "ortho"})
        self.advance()
        if tok.text == "ortho":
            if self.peek().kind != "open":
                self.error("expected '('", {"("})
            self.advance()
            inner = self.witness_term()
            self.expect_close()
            return OrthoTerm(inner)
        if tok.text in self.lat:
            return Const(tok.text)
        return Var(tok.text)


def parse_derivation(text: str, lat: FiniteOrthoLattice) -> Derivation:
    return _DerivationParser(text, lat).parse()


# -- serialization -------------------------------------------------------------------


@singledispatch
def serialize(value) -> str:
    raise TypeError(f"cannot serialize {type(value).__name__}")


@serialize.register
def _(lat: FiniteOrthoLattice) -> str:
    lines = [f"lattice {lat.name}", "elements " + " ".join(lat.elements)]
    for x, y in lat.covers():
        lines.append(f"leq {x} {y}")
    for x, y in lat.ortho_pairs():
        lines.append(f"ortho {x} {y}")
    lines.append("end")
    return "\n".join(lines) + "\n"


@serialize.register
def _(f: PowersetMap) -> str:
    lat = f.lattice
    lines = [f"map {f.label or 'unnamed'} over {lat.name}"]
    if f.kind == "measurement" and f.measured is not None:
        lines.append(f"measure {f.measured}")
    else:
        for el, img in f.items():
            inner = ", ".join(sorted(img, key=lat.index))
            lines.append(f"on {el} -> {{{inner}}}")
    lines.append("end")
    return "\n".join(lines) + "\n"


@serialize.register(Actual)
@serialize.register(Reachable)
@serialize.register(Measurement)
@serialize.register(Induced)
@serialize.register(Tensor)
@serialize.register(Plus)
@serialize.register(Lolli)
@serialize.register(Forall)
def _(f) -> str:
    return ascii_formula(f)


@serialize.register
def _(s: Sequent) -> str:
    return ascii_sequent(s)


def _derivation_lines(d: Derivation, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(d, AxiomApp):
        binds = " ".join(f"{k}={v}" for k, v in d.bindings)
        return [
            f'{pad}(axiom {d.schema} (bind {binds}) (seq "{ascii_sequent(d.conclusion)}"))'
        ]
    head = f'{pad}(rule {d.rule} (seq "{ascii_sequent(d.conclusion)}")'
    if d.witness is not None:
        head += f" (witness {ascii_term(d.witness)})"
    if not d.children:
        return [head + ")"]
    lines = [head]
    for child in d.children:
        lines.extend(_derivation_lines(child, indent + 1))
    lines.append(pad + ")")
    return lines


@serialize.register(RuleApp)
@serialize.register(AxiomApp)
def _(d) -> str:
    return "\n".join(_derivation_lines(d, 0)) + "\n"
