"""First-order terms and formulas.

All node types are frozen dataclasses, so formulas are hashable values and
can be shared freely between the parser, the clausifier and both engines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Application:
    function: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.function}({','.join(map(str, self.args))})"


Term = Union[Variable, Constant, Application]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Equality:
    left: Term
    right: Term

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Not:
    body: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class ForAll:
    var: str
    body: Formula

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: Formula

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Atom, Equality, Not, And, Or, Implies, Iff, ForAll, Exists]
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (ForAll, Exists)


def conjoin(formulas) -> Formula:
    """Left-nested conjunction of a non-empty sequence."""
    formulas = list(formulas)
    result = formulas[0]
    for f in formulas[1:]:
        result = And(result, f)
    return result


def disjoin(formulas) -> Formula:
    formulas = list(formulas)
    result = formulas[0]
    for f in formulas[1:]:
        result = Or(result, f)
    return result


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Application):
        for a in t.args:
            yield from subterms(a)


def term_variables(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Variable)}


def atoms(f: Formula) -> Iterator[Atom | Equality]:
    """Atomic subformulas in left-to-right order (with repetition)."""
    if isinstance(f, (Atom, Equality)):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.body)
    elif isinstance(f, BINARY):
        yield from atoms(f.left)
        yield from atoms(f.right)
    else:
        yield from atoms(f.body)


def _atom_terms(a: Atom | Equality) -> tuple[Term, ...]:
    return a.args if isinstance(a, Atom) else (a.left, a.right)


def free_variables(f: Formula) -> set[str]:
    if isinstance(f, (Atom, Equality)):
        out: set[str] = set()
        for t in _atom_terms(f):
            out |= term_variables(t)
        return out
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, BINARY):
        return free_variables(f.left) | free_variables(f.right)
    return free_variables(f.body) - {f.var}


def constants(f: Formula) -> list[str]:
    """Constant symbols in first-occurrence order."""
    seen: dict[str, None] = {}
    for a in atoms(f):
        for t in _atom_terms(a):
            for s in subterms(t):
                if isinstance(s, Constant):
                    seen.setdefault(s.name, None)
    return list(seen)


def predicates(f: Formula) -> dict[str, int]:
    """Predicate symbol -> arity, in first-occurrence order."""
    out: dict[str, int] = {}
    for a in atoms(f):
        if isinstance(a, Atom):
            out.setdefault(a.predicate, len(a.args))
    return out


def functions(f: Formula) -> dict[str, int]:
    out: dict[str, int] = {}
    for a in atoms(f):
        for t in _atom_terms(a):
            for s in subterms(t):
                if isinstance(s, Application):
                    out.setdefault(s.function, len(s.args))
    return out


# -- printing ---------------------------------------------------------------

# binding strength; higher binds tighter
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def format_term(t: Term, bound: frozenset[str] = frozenset()) -> str:
    if isinstance(t, Variable):
        # free variables carry an explicit marker so they survive a re-parse
        return t.name if t.name in bound else "?" + t.name
    if isinstance(t, Constant):
        return t.name
    return f"{t.function}({','.join(format_term(a, bound) for a in t.args)})"


def format_formula(f: Formula, bound: frozenset[str] = frozenset()) -> str:
    """Render in the ASCII theory-file syntax (without the final period)."""
    return _fmt(f, bound, 0)


def _fmt(f: Formula, bound: frozenset[str], ctx: int) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({','.join(format_term(a, bound) for a in f.args)})"
    if isinstance(f, Equality):
        return f"{format_term(f.left, bound)} = {format_term(f.right, bound)}"
    if isinstance(f, Not):
        if isinstance(f.body, Equality):
            e = f.body
            return f"{format_term(e.left, bound)} != {format_term(e.right, bound)}"
        return "-" + _fmt(f.body, bound, 5)
    if isinstance(f, QUANTIFIERS):
        word = "all" if isinstance(f, ForAll) else "exists"
        inner = 5 if isinstance(f.body, BINARY) else 0
        text = f"{word} {f.var} {_fmt(f.body, bound | {f.var}, inner)}"
        return f"({text})" if ctx > 0 else text
    prec = _PREC[type(f)]
    op = _OPS[type(f)]
    if isinstance(f, (And, Or)):
        # left-associative
        left, right = _fmt(f.left, bound, prec), _fmt(f.right, bound, prec + 1)
    elif isinstance(f, Implies):
        # right-associative
        left, right = _fmt(f.left, bound, prec + 1), _fmt(f.right, bound, prec)
    else:
        left, right = _fmt(f.left, bound, prec + 1), _fmt(f.right, bound, prec + 1)
    text = f"{left} {op} {right}"
    return f"({text})" if ctx > prec else text
