"""Domain background knowledge."""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from ..fol.parser import parse_formula
from ..fol.syntax import (
    And,
    Atom,
    Constant,
    Equality,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Variable,
    conjoin,
)

KK_AXIOMS = (
    "all x (inhabitant(x) -> knight(x) | knave(x))",
    "all x ((knight(x) -> -knave(x)) & (knave(x) -> -knight(x)))",
    "all x (knave(x) | knight(x))",
    "all x (truth(x) -> knight(x))",
    "all x (lie(x) -> knave(x))",
    "all x all y (same(x,y) <-> knight(x) & knight(y) | knave(x) & knave(y))",
    "all x all y (different(x,y) <-> -same(x,y))",
)


def distinctness(persons: Sequence[str]) -> list[Formula]:
    """Pairwise inequality of person constants (unique names)."""
    return [
        Not(Equality(Constant(a), Constant(b))) for a, b in itertools.combinations(persons, 2)
    ]


def speech_bridges(speech_atoms: Iterable[tuple[str, str]]) -> list[Formula]:
    """knight(s) -> p(s) and knave(s) -> -p(s) for each speech atom p(s)."""
    out = []
    for pred, person in speech_atoms:
        s = Constant(person)
        out.append(Implies(Atom("knight", (s,)), Atom(pred, (s,))))
        out.append(Implies(Atom("knave", (s,)), Not(Atom(pred, (s,)))))
    return out


def knights_knaves_background(
    persons: Sequence[str], speech_atoms: Iterable[tuple[str, str]] = ()
) -> list[tuple[str, Formula]]:
    """Tagged background formulas: domain rules, bridges, distinctness."""
    out = [("background", parse_formula(a)) for a in KK_AXIOMS]
    out += [("bridge", f) for f in speech_bridges(speech_atoms)]
    out += [("distinctness", f) for f in distinctness(persons)]
    return out


def comparatives_background(persons: Sequence[str], **_) -> list[tuple[str, Formula]]:
    """Strict order axioms for taller/shorter and bounded superlatives.

    The superlatives quantify over the named persons only, which keeps the
    clause set free of Skolem functions.
    """
    out = [
        ("background", parse_formula(a))
        for a in (
            "all x all y all z (taller(x,y) & taller(y,z) -> taller(x,z))",
            "all x -taller(x,x)",
            "all x all y (taller(x,y) -> -taller(y,x))",
            "all x all y (shorter(x,y) <-> taller(y,x))",
        )
    ]
    x = Variable("x")
    for sup, rel in (("tallest", "taller"), ("shortest", "shorter")):
        if persons:
            body = conjoin(
                Or(Equality(x, Constant(p)), Atom(rel, (x, Constant(p)))) for p in persons
            )
            out.append(("background", ForAll("x", Iff(Atom(sup, (x,)), body))))
    out += [("distinctness", f) for f in distinctness(persons)]
    return out


def speech_atoms_of(formulas: Iterable[Formula], persons: Sequence[str]) -> list[tuple[str, str]]:
    """Unary atoms p(s) that head a top-level biconditional p(s) <-> ... ."""
    people = set(persons)
    out: dict[tuple[str, str], None] = {}
    for f in formulas:
        for part in _conjuncts(f):
            if isinstance(part, Iff) and isinstance(part.left, Atom):
                a = part.left
                if len(a.args) == 1 and isinstance(a.args[0], Constant) and a.args[0].name in people:
                    out.setdefault((a.predicate, a.args[0].name), None)
    return list(out)


def _conjuncts(f: Formula):
    if isinstance(f, And):
        yield from _conjuncts(f.left)
        yield from _conjuncts(f.right)
    else:
        yield f
