"""Literals, clauses and conversion of formulas to clause normal form."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

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
    constants,
    free_variables,
)
from .unify import Substitution, apply_atom, fresh_name


@dataclass(frozen=True)
class Literal:
    sign: bool
    atom: Atom | Equality

    def __post_init__(self):
        if not isinstance(self.atom, (Atom, Equality)):
            raise TypeError(f"a literal needs an atom or equality, not {type(self.atom).__name__}")

    def negate(self) -> Literal:
        return Literal(not self.sign, self.atom)

    def substitute(self, s: Substitution) -> Literal:
        return Literal(self.sign, apply_atom(self.atom, s)) if s else self

    def variables(self) -> set[str]:
        return set(self._vars)

    @cached_property
    def _vars(self) -> frozenset[str]:
        out: set[str] = set()
        for t in _atom_args(self.atom):
            out |= _term_vars(t)
        return frozenset(out)

    @property
    def is_ground(self) -> bool:
        return not self._vars

    @cached_property
    def key(self) -> tuple:
        """Predicate key used to find complementary candidates."""
        if isinstance(self.atom, Equality):
            return ("=", 2)
        return (self.atom.predicate, len(self.atom.args))

    @cached_property
    def signed_key(self) -> tuple:
        return (self.sign,) + self.key

    def to_formula(self) -> Formula:
        return self.atom if self.sign else Not(self.atom)

    def __str__(self) -> str:
        if isinstance(self.atom, Equality):
            op = "=" if self.sign else "!="
            return f"{self.atom.left} {op} {self.atom.right}"
        return str(self.atom) if self.sign else f"-{self.atom}"


def _atom_args(a):
    return a.args if isinstance(a, Atom) else (a.left, a.right)


def _term_vars(t: Term) -> set[str]:
    if isinstance(t, Variable):
        return {t.name}
    if isinstance(t, Application):
        out: set[str] = set()
        for a in t.args:
            out |= _term_vars(a)
        return out
    return set()


def literal_sort_key(lit: Literal):
    a = lit.atom
    if isinstance(a, Equality):
        return ("=", str(a.left), str(a.right), not lit.sign)
    return (a.predicate, ",".join(map(str, a.args)), "", not lit.sign)


# provenance tags
INPUT = "input-axiom"
SYNONYMY = "synonymy"
NEGATED_GOAL = "negated-goal"
DERIVED = "derived"


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals with set semantics.

    Equality and hashing look at the literals only; ``id`` and
    ``provenance`` are bookkeeping.
    """

    literals: frozenset[Literal]
    id: int = field(default=0, compare=False)
    provenance: str = field(default=INPUT, compare=False)

    @classmethod
    def of(cls, literals: Iterable[Literal], id: int = 0, provenance: str = INPUT) -> Clause:
        return cls(frozenset(literals), id, provenance)

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self):
        return iter(self.sorted())

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def sorted(self) -> list[Literal]:
        return sorted(self.literals, key=literal_sort_key)

    def is_tautology(self) -> bool:
        return any(lit.negate() in self.literals for lit in self.literals)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for lit in self.literals:
            out |= lit._vars
        return out

    @cached_property
    def is_ground(self) -> bool:
        return all(lit.is_ground for lit in self.literals)

    @cached_property
    def keys(self) -> frozenset[tuple]:
        """Signed predicate keys of the literals."""
        return frozenset(lit.signed_key for lit in self.literals)

    def substitute(self, s: Substitution) -> Clause:
        return Clause(frozenset(l.substitute(s) for l in self.literals), self.id, self.provenance)

    def with_id(self, id: int, provenance: str | None = None) -> Clause:
        return Clause(self.literals, id, self.provenance if provenance is None else provenance)

    def to_formula(self) -> Formula:
        lits = self.sorted()
        if not lits:
            return Atom("$F")
        out = lits[0].to_formula()
        for lit in lits[1:]:
            out = Or(out, lit.to_formula())
        return out

    def __str__(self) -> str:
        if not self.literals:
            return "$F"
        return " | ".join(str(l) for l in self.sorted())


def is_skolem(name: str) -> bool:
    return name.startswith("sk") and name[2:].isdigit()


# -- clausification pipeline -----------------------------------------------


def _all_names(f: Formula, out: set[str]) -> set[str]:
    if isinstance(f, (Atom, Equality)):
        for t in _atom_args(f):
            out |= _term_vars(t)
        return out
    if isinstance(f, Not):
        return _all_names(f.body, out)
    if isinstance(f, (And, Or, Implies, Iff)):
        _all_names(f.left, out)
        return _all_names(f.right, out)
    out.add(f.var)
    return _all_names(f.body, out)


def rectify(f: Formula) -> Formula:
    """Rename bound variables apart from each other and from free ones."""
    used = set(free_variables(f))
    taken = _all_names(f, set())

    def go(g: Formula, ren: dict[str, str]) -> Formula:
        if isinstance(g, (Atom, Equality)):
            s = {k: Variable(v) for k, v in ren.items()}
            return apply_atom(g, s) if s else g
        if isinstance(g, Not):
            return Not(go(g.body, ren))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(go(g.left, ren), go(g.right, ren))
        name = g.var
        if name in used:
            name = fresh_name(name, used | taken)
        used.add(name)
        inner = dict(ren)
        inner[g.var] = name
        return type(g)(name, go(g.body, inner))

    return go(f, {})


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form over And/Or/ForAll/Exists and literals."""
    if isinstance(f, (Atom, Equality)):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return nnf(f.body, not positive)
    if isinstance(f, And):
        cls = And if positive else Or
        return cls(nnf(f.left, positive), nnf(f.right, positive))
    if isinstance(f, Or):
        cls = Or if positive else And
        return cls(nnf(f.left, positive), nnf(f.right, positive))
    if isinstance(f, Implies):
        if positive:
            return Or(nnf(f.left, False), nnf(f.right, True))
        return And(nnf(f.left, True), nnf(f.right, False))
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if positive:
            return And(Or(nnf(a, False), nnf(b, True)), Or(nnf(a, True), nnf(b, False)))
        return And(Or(nnf(a, True), nnf(b, True)), Or(nnf(a, False), nnf(b, False)))
    if isinstance(f, ForAll):
        cls = ForAll if positive else Exists
        return cls(f.var, nnf(f.body, positive))
    cls = Exists if positive else ForAll
    return cls(f.var, nnf(f.body, positive))


def prenex(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    """Split a rectified NNF formula into a quantifier prefix and a matrix."""
    if isinstance(f, ForAll):
        prefix, matrix = prenex(f.body)
        return [("all", f.var)] + prefix, matrix
    if isinstance(f, Exists):
        prefix, matrix = prenex(f.body)
        return [("exists", f.var)] + prefix, matrix
    if isinstance(f, (And, Or)):
        lp, lm = prenex(f.left)
        rp, rm = prenex(f.right)
        return lp + rp, type(f)(lm, rm)
    return [], f


class Clausifier:
    """Clause normal form conversion with a shared Skolem-symbol counter."""

    def __init__(self, start: int = 1, avoid: Iterable[str] = ()):
        self.counter = start
        self.avoid = set(avoid)

    def fresh_skolem(self) -> str:
        while f"sk{self.counter}" in self.avoid:
            self.counter += 1
        name = f"sk{self.counter}"
        self.counter += 1
        return name

    def skolemize(self, prefix, matrix: Formula) -> Formula:
        universals: list[str] = []
        s: dict[str, Term] = {}
        for kind, var in prefix:
            if kind == "all":
                universals.append(var)
            else:
                name = self.fresh_skolem()
                if universals:
                    s[var] = Application(name, tuple(Variable(u) for u in universals))
                else:
                    s[var] = Constant(name)
        return _subst_matrix(matrix, s) if s else matrix

    def clausify(self, f: Formula, provenance: str = INPUT) -> list[Clause]:
        free = sorted(free_variables(f))
        for v in reversed(free):
            f = ForAll(v, f)
        g = rectify(nnf(rectify(f)))
        prefix, matrix = prenex(g)
        matrix = self.skolemize(prefix, matrix)
        out: list[Clause] = []
        seen: set[frozenset] = set()
        for lits in _cnf(matrix):
            c = Clause(lits, 0, provenance)
            if c.is_tautology() or lits in seen:
                continue
            seen.add(lits)
            out.append(c)
        return out


def _subst_matrix(f: Formula, s) -> Formula:
    if isinstance(f, (Atom, Equality)):
        return apply_atom(f, s)
    if isinstance(f, Not):
        return Not(_subst_matrix(f.body, s))
    return type(f)(_subst_matrix(f.left, s), _subst_matrix(f.right, s))


def _cnf(f: Formula) -> list[frozenset[Literal]]:
    if isinstance(f, And):
        return _cnf(f.left) + _cnf(f.right)
    if isinstance(f, Or):
        left, right = _cnf(f.left), _cnf(f.right)
        out = []
        for a in left:
            for b in right:
                c = a | b
                if not any(l.negate() in c for l in c):
                    out.append(c)
        return out
    if isinstance(f, Not):
        return [frozenset([Literal(False, f.body)])]
    return [frozenset([Literal(True, f)])]


def clausify(f: Formula, provenance: str = INPUT) -> list[Clause]:
    """Clause set equisatisfiable with ``f``; Skolem symbols start at sk1."""
    return Clausifier().clausify(f, provenance)


def clausify_all(formulas: Iterable[Formula], provenance: str = INPUT) -> list[Clause]:
    formulas = list(formulas)
    avoid: set[str] = set()
    for f in formulas:
        avoid.update(constants(f))
    cl = Clausifier(avoid=avoid)
    out: list[Clause] = []
    for f in formulas:
        out.extend(cl.clausify(f, provenance))
    return out


def rename_apart(c: Clause, avoid: set[str], prefix: str = "v") -> tuple[Clause, dict]:
    """Rename the clause's variables to names outside ``avoid``."""
    s: dict[str, Term] = {}
    taken = set(avoid)
    for v in sorted(c.variables()):
        if v in taken:
            new = fresh_name(prefix, taken)
            taken.add(new)
            s[v] = Variable(new)
        else:
            taken.add(v)
    return (c.substitute(s) if s else c), s


def normalize_variables(c: Clause) -> Clause:
    """Canonical variable names (x1, x2, ...) in literal order."""
    order: list[str] = []
    for lit in c.sorted():
        for t in _atom_args(lit.atom):
            _collect_vars(t, order)
    s = {v: Variable(f"x{i + 1}") for i, v in enumerate(order)}
    return c.substitute(s) if s else c


def _collect_vars(t: Term, order: list[str]):
    if isinstance(t, Variable):
        if t.name not in order:
            order.append(t.name)
    elif isinstance(t, Application):
        for a in t.args:
            _collect_vars(a, order)


def ground_term(t: Term) -> bool:
    return not _term_vars(t)

