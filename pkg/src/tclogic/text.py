"""Textual KB format: tokenizer, recursive-descent parser, canonical serializer.

One statement per line.  `#` starts a comment.  Grammar sketch:

    rigid    :=  concept "<=" concept
    typical  :=  NUMBER "::" "T" "(" concept ")" "<=" concept
    cassert  :=  primary "(" IDENT ")"
    rassert  :=  IDENT "(" IDENT "," IDENT ")"
    concept  :=  conj ("or" conj)*
    conj     :=  unary ("and" unary)*
    unary    :=  "not" unary | "some" IDENT "." unary | "all" IDENT "." unary | primary
    primary  :=  "top" | "bot" | IDENT | "(" concept ")"

Numbers are exact decimals (no exponents); identifiers are case-sensitive
`[A-Za-z_][A-Za-z0-9_]*` minus the keywords.  Individual names in the reserved
witness namespace (`_fresh0`, ...) are rejected in user input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .concepts import (
    And, Atom, BOT, Bottom, Concept, Exists, Forall, Not, Or, TOP, Top,
)
from .kb import (
    ConceptAssertion, Degree, DegreeError, FRESH_PREFIX, KnowledgeBase,
    RigidInclusion, RoleAssertion, TypicalityInclusion, validate,
)

KEYWORDS = {"and", "or", "not", "some", "all", "top", "bot"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym><=|::|\(|\)|\.|,)
    """,
    re.VERBOSE,
)


@dataclass
class ParseError(Exception):
    line: int
    column: int
    message: str
    snippet: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}\n  {self.snippet}"


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "keyword" | "sym" | "eol"
    text: str
    column: int


def _tokenize(line: str, lineno: int) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise ParseError(lineno, pos + 1, f"unexpected character {line[pos]!r}", line)
        pos = m.end()
        if m.lastgroup in ("ws", "comment"):
            continue
        kind = m.lastgroup
        text = m.group()
        if kind == "ident" and text in KEYWORDS:
            kind = "keyword"
        tokens.append(_Token(kind, text, m.start() + 1))
    tokens.append(_Token("eol", "", len(line) + 1))
    return tokens


def parse_decimal(text: str) -> Fraction:
    """Exact rational value of a decimal literal."""
    if "." in text:
        whole, frac = text.split(".")
        return Fraction(int(whole + frac), 10 ** len(frac))
    return Fraction(int(text))


class _LineParser:
    def __init__(self, tokens: List[_Token], lineno: int, source_line: str):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno
        self.line = source_line

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(self.lineno, tok.column, message, self.line)

    def expect_sym(self, sym: str) -> _Token:
        tok = self.next()
        if tok.kind != "sym" or tok.text != sym:
            raise self.error(f"expected {sym!r}", tok)
        return tok

    def expect_ident(self, what: str = "identifier") -> _Token:
        tok = self.next()
        if tok.kind != "ident":
            raise self.error(f"expected {what}", tok)
        return tok

    def expect_individual(self) -> str:
        tok = self.expect_ident("individual name")
        if tok.text.startswith(FRESH_PREFIX):
            raise self.error(
                f"individual names starting with {FRESH_PREFIX!r} are reserved", tok
            )
        return tok.text

    def expect_eol(self) -> None:
        tok = self.next()
        if tok.kind != "eol":
            raise self.error("unexpected trailing input", tok)

    # concept := conj ("or" conj)*
    def concept(self) -> Concept:
        c = self.conj()
        while self.peek().kind == "keyword" and self.peek().text == "or":
            self.next()
            c = Or(c, self.conj())
        return c

    def conj(self) -> Concept:
        c = self.unary()
        while self.peek().kind == "keyword" and self.peek().text == "and":
            self.next()
            c = And(c, self.unary())
        return c

    def unary(self) -> Concept:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text == "not":
            self.next()
            return Not(self.unary())
        if tok.kind == "keyword" and tok.text in ("some", "all"):
            self.next()
            role = self.expect_ident("role name").text
            self.expect_sym(".")
            filler = self.unary()
            return Exists(role, filler) if tok.text == "some" else Forall(role, filler)
        return self.primary()

    def primary(self) -> Concept:
        tok = self.next()
        if tok.kind == "keyword" and tok.text == "top":
            return TOP
        if tok.kind == "keyword" and tok.text == "bot":
            return BOT
        if tok.kind == "ident":
            return Atom(tok.text)
        if tok.kind == "sym" and tok.text == "(":
            c = self.concept()
            self.expect_sym(")")
            return c
        raise self.error("expected a concept", tok)


def _parse_statement(parser: _LineParser):
    tok = parser.peek()
    if tok.kind == "number":
        # typicality inclusion
        number = parser.next()
        parser.expect_sym("::")
        t = parser.expect_ident()
        if t.text != "T":
            raise parser.error("expected 'T(' after '::'", t)
        parser.expect_sym("(")
        subject = parser.concept()
        parser.expect_sym(")")
        parser.expect_sym("<=")
        predicate = parser.concept()
        parser.expect_eol()
        try:
            degree = Degree(parse_decimal(number.text))
        except DegreeError as exc:
            raise parser.error(str(exc), number) from None
        return ("typical", degree, subject, predicate)

    # role assertion: IDENT "(" IDENT "," IDENT ")"
    toks = parser.tokens
    if (
        len(toks) == 7
        and toks[0].kind == "ident"
        and toks[1] == _Token("sym", "(", toks[1].column)
        and toks[2].kind == "ident"
        and toks[3].text == ","
    ):
        role = parser.expect_ident().text
        parser.expect_sym("(")
        subject = parser.expect_individual()
        parser.expect_sym(",")
        obj = parser.expect_individual()
        parser.expect_sym(")")
        parser.expect_eol()
        return ("rassert", RoleAssertion(role, subject, obj))

    # Try "primary ( IDENT )" first; otherwise re-parse as a rigid inclusion.
    start = parser.pos
    try:
        concept = parser.primary()
        opens = parser.peek()
    except ParseError:
        opens = None
    if opens is not None and opens.kind == "sym" and opens.text == "(":
        parser.next()
        individual = parser.expect_individual()
        parser.expect_sym(")")
        parser.expect_eol()
        return ("cassert", ConceptAssertion(concept, individual))

    parser.pos = start
    lhs = parser.concept()
    parser.expect_sym("<=")
    rhs = parser.concept()
    parser.expect_eol()
    return ("rigid", RigidInclusion(lhs, rhs))


def parse_kb(source: str) -> KnowledgeBase:
    rigid, typical, abox = [], [], []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        tokens = _tokenize(raw, lineno)
        if tokens[0].kind == "eol":
            continue
        parser = _LineParser(tokens, lineno, raw)
        stmt = _parse_statement(parser)
        if stmt[0] == "rigid":
            rigid.append(stmt[1])
        elif stmt[0] == "typical":
            _, degree, subject, predicate = stmt
            typical.append(TypicalityInclusion(len(typical), degree, subject, predicate))
        else:
            abox.append(stmt[1])
    kb = KnowledgeBase.build(rigid, typical, abox)
    report = validate(kb)
    if not report:
        details = "; ".join(issue.message for issue in report.issues)
        raise ParseError(0, 0, f"invalid knowledge base: {details}", "")
    return kb


def parse_concept(source: str) -> Concept:
    parser = _LineParser(_tokenize(source, 1), 1, source)
    c = parser.concept()
    parser.expect_eol()
    return c


def parse_concept_assertion(source: str) -> ConceptAssertion:
    """`<primary>(<individual>)`, as used by CLI/service query flags."""
    parser = _LineParser(_tokenize(source, 1), 1, source)
    concept = parser.primary()
    parser.expect_sym("(")
    individual = parser.expect_ident("individual name").text
    parser.expect_sym(")")
    parser.expect_eol()
    return ConceptAssertion(concept, individual)


def parse_typicality_query(source: str) -> Tuple[Concept, Concept]:
    """`T(<concept>) <= <concept>` for entailment queries."""
    parser = _LineParser(_tokenize(source, 1), 1, source)
    t = parser.expect_ident()
    if t.text != "T":
        raise parser.error("query must have the form 'T(<concept>) <= <concept>'", t)
    parser.expect_sym("(")
    subject = parser.concept()
    parser.expect_sym(")")
    parser.expect_sym("<=")
    predicate = parser.concept()
    parser.expect_eol()
    return subject, predicate


def format_decimal(value: Fraction) -> str:
    """Exact decimal rendering; rejects rationals with no finite expansion."""
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise ValueError(f"{value} has no finite decimal expansion")
    places = max(twos, fives)
    if places == 0:
        return str(value.numerator)
    scaled = value.numerator * 10 ** places // value.denominator
    text = str(scaled).rjust(places + 1, "0")
    return f"{text[:-places]}.{text[-places:]}"


# Precedence levels used when rendering: or=0, and=1, unary=2, primary=3.
def _level(c: Concept) -> int:
    if isinstance(c, Or):
        return 0
    if isinstance(c, And):
        return 1
    if isinstance(c, (Not, Exists, Forall)):
        return 2
    return 3


def concept_text(c: Concept, min_level: int = 0) -> str:
    if isinstance(c, Top):
        text = "top"
    elif isinstance(c, Bottom):
        text = "bot"
    elif isinstance(c, Atom):
        text = c.name
    elif isinstance(c, Not):
        text = f"not {concept_text(c.arg, 2)}"
    elif isinstance(c, Exists):
        text = f"some {c.role} . {concept_text(c.filler, 2)}"
    elif isinstance(c, Forall):
        text = f"all {c.role} . {concept_text(c.filler, 2)}"
    elif isinstance(c, And):
        # left-associated: a right-nested conjunction needs parentheses
        text = f"{concept_text(c.left, 1)} and {concept_text(c.right, 2)}"
    elif isinstance(c, Or):
        text = f"{concept_text(c.left, 0)} or {concept_text(c.right, 1)}"
    else:
        raise TypeError(f"not a concept: {c!r}")
    if _level(c) < min_level:
        return f"({text})"
    return text


def _assertion_text(a) -> str:
    if isinstance(a, RoleAssertion):
        return f"{a.role}({a.subject}, {a.object})"
    if isinstance(a.concept, (Atom, Top, Bottom)):
        return f"{concept_text(a.concept)}({a.individual})"
    return f"({concept_text(a.concept)})({a.individual})"


def serialize_kb(kb: KnowledgeBase) -> str:
    lines = []
    for r in kb.rigid:
        lines.append(f"{concept_text(r.lhs)} <= {concept_text(r.rhs)}")
    for t in kb.typical:
        lines.append(
            f"{format_decimal(t.degree.value)} :: "
            f"T({concept_text(t.subject)}) <= {concept_text(t.predicate)}"
        )
    for a in kb.abox:
        lines.append(_assertion_text(a))
    return "\n".join(lines) + ("\n" if lines else "")
