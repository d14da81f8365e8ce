"""Reader for the ASCII formula syntax used by theory files.

    formula  := quant | iff
    quant    := ("all" | "exists") VAR+ ["."] formula
    iff      := imp ["<->" imp]
    imp      := disj ["->" imp]
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "-" unary | quant | "(" formula ")" | term ("=" | "!=") term | atom
    atom     := NAME ["(" term ("," term)* ")"]
    term     := "?" NAME | NAME ["(" term ("," term)* ")"]

A name is a variable when an enclosing quantifier binds it; free variables
must be written with a leading ``?``.  Everything else is a constant,
function or predicate symbol.  Quantifier scope extends as far right as
possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (
    And,
    Application,
    Atom,
    Constant,
    Equality,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Variable,
    format_formula,
)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class ArityError(FormulaSyntaxError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, QVAR, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\n)
  | (?P<comment>%[^\n]*)
  | (?P<qvar>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*|[0-9]+)
  | (?P<op><->|->|!=|[-&|=().,\\<>])
    """,
    re.VERBOSE,
)


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "qvar":
            tokens.append(Token("QVAR", value[1:], line, col))
        elif kind == "name":
            tokens.append(Token("NAME", value, line, col))
        elif kind == "op":
            tokens.append(Token("OP", value, line, col))
        if "\n" in value:
            line += value.count("\n")
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


@dataclass
class Signature:
    """Symbol arities seen so far; shared across formulas of one theory."""

    predicates: dict[str, int] = field(default_factory=dict)
    functions: dict[str, int] = field(default_factory=dict)

    def check(self, table: dict[str, int], name: str, arity: int, tok: Token, what: str):
        known = table.setdefault(name, arity)
        if known != arity:
            raise ArityError(
                f"{what} {name} used with arity {arity}, previously {known}", tok.line, tok.col
            )


class FormulaParser:
    def __init__(self, tokens: list[Token], signature: Signature | None = None):
        self.tokens = tokens
        self.pos = 0
        self.sig = signature if signature is not None else Signature()

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("OP", "NAME") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.tok.line, self.tok.col)

    # -- grammar
    def formula(self, bound: frozenset[str]) -> Formula:
        if self.at("all") or self.at("exists"):
            return self.quantified(bound)
        return self.iff(bound)

    def quantified(self, bound: frozenset[str]) -> Formula:
        word = self.advance().text
        # a run of names; unless a '.' follows, the last one starts the body
        end = self.pos
        while self.tokens[end].kind == "NAME" and self.tokens[end].text not in ("all", "exists"):
            end += 1
        count = end - self.pos
        dotted = self.tokens[end].kind == "OP" and self.tokens[end].text == "."
        if not dotted and count >= 2:
            last, nxt = self.tokens[end - 1], self.tokens[end]
            applied = (
                nxt.text == "(" and nxt.line == last.line and nxt.col == last.col + len(last.text)
            )
            if applied or (nxt.kind != "NAME" and nxt.text != "("):
                count -= 1
        if count < 1:
            self.error("quantifier without variable")
        names = [self.advance().text for _ in range(count)]
        if dotted:
            self.advance()
        body = self.formula(bound | set(names))
        cls = ForAll if word == "all" else Exists
        for name in reversed(names):
            body = cls(name, body)
        return body

    def iff(self, bound):
        left = self.imp(bound)
        if self.at("<->"):
            self.advance()
            left = Iff(left, self.imp(bound))
            if self.at("<->"):
                self.error("chained '<->' needs parentheses")
        return left

    def imp(self, bound):
        left = self.disj(bound)
        if self.at("->"):
            self.advance()
            return Implies(left, self.imp(bound))
        return left

    def disj(self, bound):
        left = self.conj(bound)
        while self.at("|"):
            self.advance()
            left = Or(left, self.conj(bound))
        return left

    def conj(self, bound):
        left = self.unary(bound)
        while self.at("&"):
            self.advance()
            left = And(left, self.unary(bound))
        return left

    def unary(self, bound) -> Formula:
        if self.at("-"):
            self.advance()
            return Not(self.unary(bound))
        if self.at("all") or self.at("exists"):
            return self.quantified(bound)
        if self.at("("):
            self.advance()
            f = self.formula(bound)
            self.expect(")")
            return f
        start = self.tok
        if start.kind == "QVAR":
            left = self.term(bound)
            return self.equality(left, bound)
        if start.kind != "NAME":
            self.error(f"expected a formula, found {start.text or 'end of input'!r}")
        name = self.advance().text
        args = self.arguments(bound) if self.at("(") else ()
        if self.at("=") or self.at("!="):
            return self.equality(self.make_term(name, args, bound, start), bound)
        self.sig.check(self.sig.predicates, name, len(args), start, "predicate")
        return Atom(name, args)

    def equality(self, left: Term, bound) -> Formula:
        if self.at("="):
            self.advance()
            return Equality(left, self.term(bound))
        if self.at("!="):
            self.advance()
            return Not(Equality(left, self.term(bound)))
        self.error("expected '=' or '!=' after term")

    def arguments(self, bound) -> tuple[Term, ...]:
        self.expect("(")
        args = [self.term(bound)]
        while self.at(","):
            self.advance()
            args.append(self.term(bound))
        self.expect(")")
        return tuple(args)

    def term(self, bound) -> Term:
        tok = self.tok
        if tok.kind == "QVAR":
            self.advance()
            return Variable(tok.text)
        if tok.kind != "NAME":
            self.error(f"expected a term, found {tok.text or 'end of input'!r}")
        self.advance()
        args = self.arguments(bound) if self.at("(") else ()
        return self.make_term(tok.text, args, bound, tok)

    def make_term(self, name, args, bound, tok) -> Term:
        if args:
            self.sig.check(self.sig.functions, name, len(args), tok, "function")
            return Application(name, args)
        if name in bound:
            return Variable(name)
        return Constant(name)


def parse_formula(text: str, signature: Signature | None = None) -> Formula:
    """Parse one formula; a single trailing period is optional."""
    tokens = tokenize(text)
    p = FormulaParser(tokens, signature)
    f = p.formula(frozenset())
    if p.at("."):
        p.advance()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r} after formula")
    return f


def print_formula(f: Formula) -> str:
    return format_formula(f) + "."


# -- theory files -----------------------------------------------------------


@dataclass
class Theory:
    assumptions: list[Formula] = field(default_factory=list)
    goals: list[Formula] = field(default_factory=list)


_SECTIONS = {"assumptions": "assumptions", "goals": "goals", "sos": "assumptions"}


def parse_theory(text: str) -> Theory:
    """Read a theory file.

    Formulas outside any ``formulas(...)`` block are assumptions.
    """
    tokens = tokenize(text)
    sig = Signature()
    p = FormulaParser(tokens, sig)
    theory = Theory()
    section = "assumptions"
    while p.tok.kind != "EOF":
        if p.at("formulas") and p.tokens[p.pos + 1].text == "(":
            p.advance()
            p.expect("(")
            name_tok = p.advance()
            if name_tok.text not in _SECTIONS:
                raise FormulaSyntaxError(
                    f"unknown section {name_tok.text!r}", name_tok.line, name_tok.col
                )
            section = _SECTIONS[name_tok.text]
            p.expect(")")
            p.expect(".")
            continue
        if p.at("end_of_list"):
            p.advance()
            p.expect(".")
            section = "assumptions"
            continue
        f = p.formula(frozenset())
        p.expect(".")
        getattr(theory, section).append(f)
    return theory


def print_theory(theory: Theory) -> str:
    lines = ["formulas(assumptions)."]
    lines += [print_formula(f) for f in theory.assumptions]
    lines.append("end_of_list.")
    if theory.goals:
        lines.append("")
        lines.append("formulas(goals).")
        lines += [print_formula(f) for f in theory.goals]
        lines.append("end_of_list.")
    return "\n".join(lines) + "\n"
