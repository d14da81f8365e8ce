"""Finite model finding by grounding and DPLL enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from ..fol.clauses import Clause, Literal, is_skolem
from ..fol.syntax import (
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
)


class UnsupportedTheory(ValueError):
    """The theory uses function symbols of nonzero arity."""


@dataclass(frozen=True)
class Interpretation:
    domain_size: int
    constant_map: Mapping[str, int]
    predicate_extensions: Mapping[str, frozenset]
    arities: Mapping[str, int] = field(default_factory=dict)

    def holds(self, predicate: str, *args) -> bool:
        """Truth of ``predicate(args)``; args are constant names or elements."""
        elems = tuple(self.constant_map[a] if isinstance(a, str) else a for a in args)
        return elems in self.predicate_extensions.get(predicate, frozenset())

    def key(self) -> tuple:
        return (
            self.domain_size,
            tuple(sorted(self.constant_map.items())),
            tuple(sorted((p, tuple(sorted(ext))) for p, ext in self.predicate_extensions.items())),
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other) -> bool:
        return isinstance(other, Interpretation) and self.key() == other.key()

    def describe(self) -> str:
        lines = [f"domain size {self.domain_size}"]
        for c, e in sorted(self.constant_map.items(), key=lambda kv: kv[1]):
            lines.append(f"  {c} = {e}")
        for p in sorted(self.predicate_extensions):
            ext = sorted(self.predicate_extensions[p])
            lines.append(f"  {p}: {', '.join('(' + ','.join(map(str, t)) + ')' for t in ext) or '-'}")
        return "\n".join(lines)


# -- grounding ---------------------------------------------------------------


@dataclass
class GroundTheory:
    """Propositional clauses over numbered atoms (DIMACS-style signed ints)."""

    domain_size: int
    constant_map: dict[str, int]
    atoms: list[tuple] = field(default_factory=list)  # index -> ("p", pred, elems) or ("sel", const, elem)
    index: dict[tuple, int] = field(default_factory=dict)
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    arities: dict[str, int] = field(default_factory=dict)
    free_constants: list[str] = field(default_factory=list)
    trivially_false: bool = False

    def var(self, key: tuple) -> int:
        v = self.index.get(key)
        if v is None:
            self.atoms.append(key)
            v = len(self.atoms)
            self.index[key] = v
        return v


def _signature(clauses: Sequence[Clause]) -> tuple[dict[str, int], list[str]]:
    preds: dict[str, int] = {}
    consts: dict[str, None] = {}

    def visit(t: Term):
        if isinstance(t, Application):
            raise UnsupportedTheory(f"function symbol {t.function}/{len(t.args)} is not supported")
        if isinstance(t, Constant):
            consts.setdefault(t.name, None)

    for c in clauses:
        for lit in c.sorted():
            a = lit.atom
            if isinstance(a, Atom):
                preds.setdefault(a.predicate, len(a.args))
                args = a.args
            else:
                args = (a.left, a.right)
            for t in args:
                visit(t)
    return preds, list(consts)


def default_constant_map(constants: Iterable[str], n: int) -> dict[str, int]:
    """Distinct elements for non-Skolem constants in first-mention order."""
    out: dict[str, int] = {}
    for c in constants:
        if not is_skolem(c) and len(out) < n:
            out[c] = len(out)
    return out


def ground(
    clauses: Sequence[Clause],
    n: int,
    constant_map: Optional[Mapping[str, int]] = None,
    predicates: Optional[Mapping[str, int]] = None,
) -> GroundTheory:
    """Instantiate every clause over all assignments of elements to its variables.

    Constants outside ``constant_map`` get selector atoms ("c is element e")
    constrained to exactly one true value.  Equality literals are decided
    during grounding; every ground atom of every predicate gets a variable so
    models carry complete extensions.
    """
    if n < 1:
        raise ValueError("domain size must be positive")
    preds, consts = _signature(clauses)
    if predicates:
        for p, k in predicates.items():
            preds.setdefault(p, k)
    cmap = dict(default_constant_map(consts, n) if constant_map is None else constant_map)
    for c, e in cmap.items():
        if not 0 <= e < n:
            raise ValueError(f"constant {c} mapped outside the domain")
    gt = GroundTheory(n, cmap, arities=dict(sorted(preds.items())))
    for p, k in gt.arities.items():
        for elems in itertools.product(range(n), repeat=k):
            gt.var(("p", p, elems))
    free = [c for c in consts if c not in cmap]
    gt.free_constants = free
    for c in free:
        sels = [gt.var(("sel", c, e)) for e in range(n)]
        gt.clauses.append(tuple(sels))
        for a, b in itertools.combinations(sels, 2):
            gt.clauses.append((-a, -b))
    seen: set[tuple[int, ...]] = set(gt.clauses)
    for clause in clauses:
        variables = sorted(clause.variables())
        cfree = sorted({t.name for lit in clause.literals for t in _args(lit.atom)
                        if isinstance(t, Constant) and t.name not in cmap})
        lits = clause.sorted()
        for values in itertools.product(range(n), repeat=len(variables) + len(cfree)):
            env = dict(zip(variables, values))
            cenv = dict(zip(cfree, values[len(variables):]))
            out: list[int] = [-gt.index[("sel", c, e)] for c, e in cenv.items()]
            satisfied = False
            for lit in lits:
                g = _ground_literal(lit, env, cenv, cmap, gt)
                if g is True:
                    satisfied = True
                    break
                if g is False:
                    continue
                out.append(g)
            if satisfied:
                continue
            key = tuple(sorted(set(out), key=abs))
            if any(-x in key for x in key):
                continue
            if not key:
                gt.trivially_false = True
            if key not in seen:
                seen.add(key)
                gt.clauses.append(key)
    return gt


def _args(a):
    return a.args if isinstance(a, Atom) else (a.left, a.right)


def _elem(t: Term, env, cenv, cmap) -> int:
    if isinstance(t, Variable):
        return env[t.name]
    if t.name in cmap:
        return cmap[t.name]
    return cenv[t.name]


def _ground_literal(lit: Literal, env, cenv, cmap, gt: GroundTheory):
    a = lit.atom
    if isinstance(a, Equality):
        same = _elem(a.left, env, cenv, cmap) == _elem(a.right, env, cenv, cmap)
        return same == lit.sign
    elems = tuple(_elem(t, env, cenv, cmap) for t in a.args)
    v = gt.index[("p", a.predicate, elems)]
    return v if lit.sign else -v


# -- DPLL ----------------------------------------------------------------------


class _Solver:
    def __init__(self, nvars: int, clauses: list[tuple[int, ...]]):
        self.n = nvars
        self.clauses = clauses
        self.occ: dict[int, list[int]] = {}
        for ci, c in enumerate(clauses):
            for lit in c:
                self.occ.setdefault(lit, []).append(ci)
        self.value: list[Optional[bool]] = [None] * (nvars + 1)
        self.trail: list[int] = []

    def lit_value(self, lit: int) -> Optional[bool]:
        v = self.value[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def assign(self, lit: int) -> None:
        self.value[abs(lit)] = lit > 0
        self.trail.append(abs(lit))

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.value[self.trail.pop()] = None

    def propagate(self, queue: list[int]) -> bool:
        """Unit propagation; False on conflict."""
        while queue:
            lit = queue.pop()
            for ci in self.occ.get(-lit, ()):
                unassigned = None
                count = 0
                sat = False
                for l in self.clauses[ci]:
                    val = self.lit_value(l)
                    if val is True:
                        sat = True
                        break
                    if val is None:
                        count += 1
                        unassigned = l
                        if count > 1:
                            break
                if sat or count > 1:
                    continue
                if count == 0:
                    return False
                self.assign(unassigned)
                queue.append(unassigned)
        return True

    def initial(self) -> bool:
        queue = []
        for c in self.clauses:
            if not c:
                return False
            if len(c) == 1:
                val = self.lit_value(c[0])
                if val is False:
                    return False
                if val is None:
                    self.assign(c[0])
                    queue.append(c[0])
        return self.propagate(queue)

    def enumerate(self, limit: int) -> list[list[bool]]:
        models: list[list[bool]] = []
        if not self.initial():
            return models
        # explicit stack of (trail mark, var, next value to try)
        stack: list[tuple[int, int, int]] = []
        while True:
            var = self._next_unassigned()
            if var is None:
                models.append(list(self.value[1:]))
                if len(models) >= limit:
                    return models
                if not self._backtrack(stack):
                    return models
                continue
            mark = len(self.trail)
            stack.append((mark, var, 1))
            self.assign(-var)
            if not self.propagate([-var]):
                if not self._backtrack(stack):
                    return models

    def _backtrack(self, stack) -> bool:
        while stack:
            mark, var, stage = stack.pop()
            self.undo(mark)
            if stage == 1:
                stack.append((mark, var, 2))
                self.assign(var)
                if self.propagate([var]):
                    return True
        return False

    def _next_unassigned(self) -> Optional[int]:
        # branch inside the shortest open clause so conflicts surface early
        best, best_len = None, None
        for c in self.clauses:
            open_lits = 0
            first = None
            for l in c:
                val = self.lit_value(l)
                if val is True:
                    break
                if val is None:
                    open_lits += 1
                    if first is None:
                        first = abs(l)
            else:
                if first is not None and (best_len is None or open_lits < best_len):
                    best, best_len = first, open_lits
                    if open_lits == 2:
                        break
        if best is not None:
            return best
        for v in range(1, self.n + 1):
            if self.value[v] is None:
                return v
        return None


def solve_ground(gt: GroundTheory, limit: int = 1000) -> list[Interpretation]:
    if gt.trivially_false:
        return []
    solver = _Solver(len(gt.atoms), gt.clauses)
    out = []
    for values in solver.enumerate(limit):
        out.append(_interpretation(gt, values))
    return out


def _interpretation(gt: GroundTheory, values: list[bool]) -> Interpretation:
    cmap = dict(gt.constant_map)
    ext: dict[str, set] = {p: set() for p in gt.arities}
    for i, key in enumerate(gt.atoms):
        if not values[i]:
            continue
        if key[0] == "p":
            ext[key[1]].add(key[2])
        else:
            cmap[key[1]] = key[2]
    return Interpretation(
        gt.domain_size,
        cmap,
        {p: frozenset(v) for p, v in ext.items()},
        dict(gt.arities),
    )


def find_models(
    clauses: Sequence[Clause],
    n: int,
    limit: int = 1000,
    constant_map: Optional[Mapping[str, int]] = None,
    predicates: Optional[Mapping[str, int]] = None,
) -> list[Interpretation]:
    """Up to ``limit`` models of size ``n``, in a deterministic order."""
    return solve_ground(ground(clauses, n, constant_map, predicates), limit)


# -- evaluation ------------------------------------------------------------------


def evaluate(f: Formula, m: Interpretation, env: Optional[dict[str, int]] = None) -> bool:
    """Truth of ``f`` in ``m``; free variables are read from ``env``."""
    env = env or {}
    if isinstance(f, Atom):
        elems = tuple(_eval_term(t, m, env) for t in f.args)
        return elems in m.predicate_extensions.get(f.predicate, frozenset())
    if isinstance(f, Equality):
        return _eval_term(f.left, m, env) == _eval_term(f.right, m, env)
    if isinstance(f, Not):
        return not evaluate(f.body, m, env)
    if isinstance(f, And):
        return evaluate(f.left, m, env) and evaluate(f.right, m, env)
    if isinstance(f, Or):
        return evaluate(f.left, m, env) or evaluate(f.right, m, env)
    if isinstance(f, Implies):
        return (not evaluate(f.left, m, env)) or evaluate(f.right, m, env)
    if isinstance(f, Iff):
        return evaluate(f.left, m, env) == evaluate(f.right, m, env)
    results = (evaluate(f.body, m, {**env, f.var: e}) for e in range(m.domain_size))
    return all(results) if isinstance(f, ForAll) else any(results)


def _eval_term(t: Term, m: Interpretation, env) -> int:
    if isinstance(t, Variable):
        if t.name not in env:
            raise ValueError(f"unbound variable {t.name}")
        return env[t.name]
    if isinstance(t, Constant):
        if t.name not in m.constant_map:
            raise ValueError(f"constant {t.name} has no interpretation")
        return m.constant_map[t.name]
    raise UnsupportedTheory(f"function symbol {t.function} cannot be evaluated")


# -- consensus ---------------------------------------------------------------------

AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class Consensus:
    """Per (person, predicate) truth values agreed by all models (None if not)."""

    cells: tuple[tuple[str, tuple[tuple[str, Optional[bool]], ...]], ...]

    @property
    def ambiguous(self) -> bool:
        return any(v is None for _, row in self.cells for _, v in row)

    def value(self, person: str, predicate: str) -> Optional[bool]:
        for p, row in self.cells:
            if p == person:
                return dict(row)[predicate]
        raise KeyError(person)

    def as_dict(self) -> dict[str, dict[str, Optional[bool]]]:
        return {p: dict(row) for p, row in self.cells}

    def roles(self, roles: Sequence[str] = ("knight", "knave")) -> dict[str, Optional[str]]:
        """The single role predicate true for each person, or None."""
        out = {}
        for p, row in self.cells:
            d = dict(row)
            true = [r for r in roles if d.get(r) is True]
            out[p] = true[0] if len(true) == 1 else None
        return out


def consensus_assignment(
    models: Sequence[Interpretation], predicates: Sequence[str], persons: Sequence[str] | None = None
) -> Consensus | str:
    """Values shared by every model; ``AMBIGUOUS`` if any cell differs."""
    c = consensus_cells(models, predicates, persons)
    return AMBIGUOUS if c.ambiguous else c


def consensus_cells(
    models: Sequence[Interpretation], predicates: Sequence[str], persons: Sequence[str] | None = None
) -> Consensus:
    if not models:
        raise ValueError("consensus needs at least one model")
    if persons is None:
        persons = [c for c, _ in sorted(models[0].constant_map.items(), key=lambda kv: kv[1])
                   if not is_skolem(c)]
    rows = []
    for person in persons:
        row = []
        for pred in predicates:
            values = {m.holds(pred, person) for m in models}
            row.append((pred, values.pop() if len(values) == 1 else None))
        rows.append((person, tuple(row)))
    return Consensus(tuple(rows))
