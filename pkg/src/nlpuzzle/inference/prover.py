"""Given-clause resolution with proof extraction and independent checking."""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from ..fol.clauses import (
    DERIVED,
    INPUT,
    NEGATED_GOAL,
    Clause,
    Clausifier,
    Literal,
    is_skolem,
    rename_apart,
)
from ..fol.syntax import Atom, Constant, Equality, Formula, Not, Variable, constants
from ..fol.unify import match, unify

# rule names
ASSUMPTION = "assumption"
GOAL = "goal"
DENY = "deny"
CLAUSIFY = "clausify"
RESOLVE = "resolve"
FACTOR = "factor"
HYPER = "hyper"
EQUALITY = "equality"

PROVED = "proved"
SATURATED = "saturated"
RESOURCE = "resource"


@dataclass(frozen=True)
class ProofStep:
    id: int
    rule: str
    parents: tuple[int, ...] = ()
    clause: Optional[Clause] = None
    formula: Optional[Formula] = None
    note: str = ""

    @property
    def is_formula(self) -> bool:
        return self.clause is None

    def text(self) -> str:
        from ..fol.syntax import format_formula

        body = format_formula(self.formula) if self.is_formula else str(self.clause)
        return body

    def justification(self) -> str:
        if not self.parents:
            return self.rule
        return f"{self.rule}({','.join(map(str, self.parents))})"


@dataclass(frozen=True)
class Proof:
    steps: tuple[ProofStep, ...]
    goal: Optional[Formula] = None

    def __len__(self) -> int:
        return len(self.steps)

    def step(self, id: int) -> ProofStep:
        for s in self.steps:
            if s.id == id:
                return s
        raise KeyError(id)

    @property
    def empty_clause(self) -> ProofStep:
        return self.steps[-1]

    def render(self) -> str:
        return "\n".join(f"{s.id} {s.text()}.  [{s.justification()}]" for s in self.steps)


@dataclass(frozen=True)
class ProofResult:
    status: str
    proof: Optional[Proof] = None
    given: int = 0
    kept: int = 0
    seconds: float = 0.0

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    def __bool__(self) -> bool:
        return self.proved


# -- clause operations ----------------------------------------------------------


def _literal_match(pattern: Literal, target: Literal, s: dict) -> Optional[dict]:
    if pattern.sign != target.sign or pattern.key != target.key:
        return None
    return match(pattern.atom, target.atom, s)


def subsumes(c: Clause, d: Clause) -> bool:
    """True if some substitution maps every literal of ``c`` into ``d``."""
    if len(c) > len(d) or not c.keys <= d.keys:
        return False
    if c.is_ground:
        return c.literals <= d.literals
    lits = sorted(c.literals, key=lambda l: -len(l._vars))
    targets = list(d.literals)

    def go(i: int, s: dict) -> bool:
        if i == len(lits):
            return True
        for t in targets:
            s2 = _literal_match(lits[i], t, s)
            if s2 is not None and go(i + 1, s2):
                return True
        return False

    return go(0, {})


def variant(c: Clause, d: Clause) -> bool:
    return len(c) == len(d) and subsumes(c, d) and subsumes(d, c)


def resolvents(c: Clause, d: Clause) -> list[tuple[Clause, Literal, Literal]]:
    """All binary resolvents of ``c`` and ``d`` (renamed apart first)."""
    d2, _ = rename_apart(d, c.variables(), prefix="y")
    out = []
    for a in c.sorted():
        for b in d2.sorted():
            if a.sign == b.sign or a.key != b.key:
                continue
            s = unify(a.atom, b.atom)
            if s is None:
                continue
            lits = [l.substitute(s) for l in c.literals if l != a]
            lits += [l.substitute(s) for l in d2.literals if l != b]
            out.append((Clause.of(lits, provenance=DERIVED), a, b))
    return out


def factors(c: Clause) -> list[Clause]:
    out = []
    lits = c.sorted()
    for a, b in itertools.combinations(lits, 2):
        if a.sign != b.sign or a.key != b.key:
            continue
        s = unify(a.atom, b.atom)
        if s is None:
            continue
        f = c.substitute(s)
        if len(f) < len(c):
            out.append(Clause(f.literals, 0, DERIVED))
    return out


def equality_axioms(predicates: Optional[dict[str, int]] = None) -> list[Clause]:
    """Reflexivity, symmetry, transitivity and substitution into ``predicates``."""
    x, y, z = Variable("x"), Variable("y"), Variable("z")
    eq = lambda a, b, sign=True: Literal(sign, Equality(a, b))  # noqa: E731
    out = [
        Clause.of([eq(x, x)]),
        Clause.of([eq(x, y, False), eq(y, x)]),
        Clause.of([eq(x, y, False), eq(y, z, False), eq(x, z)]),
    ]
    for pred, arity in sorted((predicates or {}).items()):
        args = [Variable(f"u{i}") for i in range(arity)]
        for i in range(arity):
            swapped = args[:i] + [y] + args[i + 1:]
            args_x = args[:i] + [x] + args[i + 1:]
            out.append(Clause.of([
                eq(x, y, False),
                Literal(False, Atom(pred, tuple(args_x))),
                Literal(True, Atom(pred, tuple(swapped))),
            ]))
    return out


def _predicates_of(clauses: Iterable[Clause]) -> dict[str, int]:
    out: dict[str, int] = {}
    for c in clauses:
        for l in c.literals:
            if isinstance(l.atom, Atom):
                out.setdefault(l.atom.predicate, len(l.atom.args))
    return out


def _uses_equality(clauses: Iterable[Clause]) -> bool:
    return any(isinstance(l.atom, Equality) for c in clauses for l in c.literals)


class _SubsumptionIndex:
    """Kept clauses, indexed by one signed predicate key of each."""

    def __init__(self):
        self.by_anchor: dict[tuple, list[Clause]] = {}
        self.units: set[Literal] = set()
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def add(self, c: Clause) -> list[Clause]:
        """Keep ``c`` and drop the kept clauses it subsumes; returns those."""
        dropped = []
        for anchor in c.keys:
            bucket = self.by_anchor.get(anchor)
            if not bucket:
                continue
            rest = []
            for k in bucket:
                if len(k) >= len(c) and k.keys >= c.keys and subsumes(c, k):
                    dropped.append(k)
                else:
                    rest.append(k)
            self.by_anchor[anchor] = rest
        self.count += 1 - len(dropped)
        if len(c) == 1 and c.is_ground:
            self.units.add(next(iter(c.literals)))
        anchor = min(c.keys) if c.keys else ()
        self.by_anchor.setdefault(anchor, []).append(c)
        return dropped

    def subsumed(self, d: Clause) -> bool:
        """Whether a kept clause subsumes ``d``."""
        if any(l in self.units for l in d.literals):
            return True
        for anchor in d.keys:
            for c in self.by_anchor.get(anchor, ()):
                if len(c) <= len(d) and subsumes(c, d):
                    return True
        return False


# -- the prover -------------------------------------------------------------------

Axiom = Union[Clause, Formula]


class _Session:
    def __init__(self):
        self.steps: dict[int, ProofStep] = {}
        self.next_id = 1

    def add(self, rule, parents=(), clause=None, formula=None, note="") -> ProofStep:
        sid = self.next_id
        self.next_id += 1
        if clause is not None:
            clause = clause.with_id(sid)
        step = ProofStep(sid, rule, tuple(parents), clause, formula, note)
        self.steps[sid] = step
        return step


def prove(
    axioms: Sequence[Axiom],
    goal: Optional[Formula],
    max_clauses: int = 20000,
    max_seconds: float = 20.0,
    set_of_support: bool = False,
    ground: Optional[bool] = None,
) -> ProofResult:
    """Refute axioms plus the negated goal by given-clause resolution.

    Formulas among the axioms are clausified and appear in the proof as
    formula steps followed by clausify steps.  The given clause is always the
    one with the fewest literals, ties broken by lowest id.

    Without function symbols the clauses are instantiated over their
    constants first (``ground=None`` decides automatically), which makes
    saturation finite.  Proof steps then cite the general input clauses, and
    each derived ground clause is an instance of a resolvent of its parents.
    """
    t0 = time.monotonic()
    session = _Session()
    avoid = set()
    for a in axioms:
        if isinstance(a, Clause):
            for l in a.literals:
                avoid.update(constants(l.to_formula()))
        else:
            avoid.update(constants(a))
    if goal is not None:
        avoid.update(constants(goal))
    cl = Clausifier(avoid=avoid)

    inputs: list[tuple[Clause, bool]] = []  # (clause with step id, in support set)
    for a in axioms:
        if isinstance(a, Clause):
            step = session.add(ASSUMPTION, clause=a)
            inputs.append((step.clause, False))
        else:
            fstep = session.add(ASSUMPTION, formula=a)
            for c in cl.clausify(a, INPUT):
                inputs.append((session.add(CLAUSIFY, (fstep.id,), clause=c).clause, False))
    if goal is not None:
        gstep = session.add(GOAL, formula=goal)
        for c in cl.clausify(Not(goal), NEGATED_GOAL):
            step = session.add(DENY, (gstep.id,), clause=c.with_id(0, NEGATED_GOAL))
            inputs.append((step.clause, True))
    if _uses_equality(c for c, _ in inputs):
        for c in equality_axioms(_predicates_of(c for c, _ in inputs)):
            inputs.append((session.add(EQUALITY, clause=c).clause, False))

    if ground is not False:
        result = _saturate_ground(session, inputs, goal, t0, max_clauses, max_seconds, set_of_support)
        if result is not None:
            return result
        if ground:
            raise ValueError("clauses with function symbols cannot be instantiated")

    usable: list[Clause] = []
    usable_by_key: dict[tuple, list[tuple[int, Clause]]] = {}
    support: set[int] = set()
    queue: list[tuple[int, int, Clause]] = []
    kept = _SubsumptionIndex()
    deleted: set[int] = set()  # back-subsumed clauses, skipped lazily
    given_count = 0

    def keep(c: Clause, in_support: bool) -> None:
        if c.is_tautology() or kept.subsumed(c):
            return
        for k in kept.add(c):
            deleted.add(k.id)
        if in_support:
            support.add(c.id)
        heapq.heappush(queue, (len(c), c.id, c))

    for c, sos in inputs:
        if c.is_empty:
            return _finish(session, c, goal, given_count, len(kept), t0)
        keep(c, sos or not set_of_support)

    while queue:
        if time.monotonic() - t0 > max_seconds or len(kept) > max_clauses:
            return ProofResult(RESOURCE, None, given_count, len(kept), time.monotonic() - t0)
        _, _, given = heapq.heappop(queue)
        if given.id in deleted:
            continue
        given_count += 1
        for lit in given.literals:
            usable_by_key.setdefault(lit.signed_key, []).append((len(usable), given))
        usable.append(given)
        derived: list[tuple[Clause, str, tuple[int, ...]]] = []
        for f in factors(given):
            derived.append((f, FACTOR, (given.id,)))
        partners: dict[int, Clause] = {}
        for lit in given.literals:
            for pos, other in usable_by_key.get((not lit.sign,) + lit.key, ()):
                if other.id not in deleted:
                    partners[pos] = other
        for pos in sorted(partners):
            other = partners[pos]
            if set_of_support and given.id not in support and other.id not in support:
                continue
            for r, _, _ in resolvents(given, other):
                parents = (given.id, other.id) if given.id <= other.id else (other.id, given.id)
                derived.append((r, RESOLVE, parents))
        for c, rule, parents in derived:
            if c.is_tautology() or kept.subsumed(c):
                continue
            step = session.add(rule, parents, clause=c)
            c = step.clause
            if c.is_empty:
                return _finish(session, c, goal, given_count, len(kept), t0)
            keep(c, any(p in support for p in parents))
    return ProofResult(SATURATED, None, given_count, len(kept), time.monotonic() - t0)


GROUND_LIMIT = 200_000


def _herbrand(clauses: Sequence[Clause]) -> Optional[list[str]]:
    """Constants of the clause set, or None if a function symbol occurs."""
    names: set[str] = set()
    for c in clauses:
        for lit in c.literals:
            args = lit.atom.args if isinstance(lit.atom, Atom) else (lit.atom.left, lit.atom.right)
            for t in args:
                if isinstance(t, Constant):
                    names.add(t.name)
                elif not isinstance(t, Variable):
                    return None
    if not names:
        names.add("c1")
    return sorted(names)


def _saturate_ground(session, inputs, goal, t0, max_clauses, max_seconds, set_of_support):
    universe = _herbrand([c for c, _ in inputs])
    if universe is None:
        return None
    total = sum(len(universe) ** len(c.variables()) for c, _ in inputs)
    if total > GROUND_LIMIT:
        return None

    atom_ids: dict = {}
    atom_list: list = []

    def encode(c: Clause) -> frozenset[int]:
        out = []
        for lit in c.literals:
            i = atom_ids.get(lit.atom)
            if i is None:
                atom_list.append(lit.atom)
                i = atom_ids[lit.atom] = len(atom_list)
            out.append(i if lit.sign else -i)
        return frozenset(out)

    def decode(lits: frozenset[int]) -> Clause:
        return Clause.of(Literal(l > 0, atom_list[abs(l) - 1]) for l in lits)

    # serial -> (literals, step id to cite, in support set)
    clauses: list[tuple[frozenset[int], int, bool]] = []
    occurs: dict[int, list[int]] = {}  # literal -> kept serials containing it
    anchored: dict[int, list[int]] = {}  # smallest literal -> kept serials
    units: set[int] = set()
    deleted: set[int] = set()
    usable_occ: dict[int, list[int]] = {}
    queue: list[tuple[int, int, int]] = []
    kept_count = 0
    given_count = 0

    def subsumed(lits: frozenset[int]) -> bool:
        if any(l in units for l in lits):
            return True
        for l in lits:
            for k in anchored.get(l, ()):
                if k not in deleted and clauses[k][0] <= lits:
                    return True
        return False

    def keep(lits: frozenset[int], cite: int, sos: bool, order: int) -> None:
        nonlocal kept_count
        serial = len(clauses)
        clauses.append((lits, cite, sos))
        rare = min(lits, key=lambda l: len(occurs.get(l, ())))
        for k in occurs.get(rare, ()):
            if k not in deleted and lits <= clauses[k][0]:
                deleted.add(k)
                kept_count -= 1
        for l in lits:
            occurs.setdefault(l, []).append(serial)
        anchored.setdefault(min(lits), []).append(serial)
        if len(lits) == 1:
            units.add(next(iter(lits)))
        kept_count += 1
        heapq.heappush(queue, (len(lits), order, serial))

    def tautology(lits) -> bool:
        return any(-l in lits for l in lits)

    for c, sos in inputs:
        names = sorted(c.variables())
        for combo in itertools.product(universe, repeat=len(names)):
            inst = c.substitute({n: Constant(v) for n, v in zip(names, combo)}) if names else c
            lits = encode(inst)
            if not lits:
                return _finish(session, c, goal, 0, kept_count, t0)
            if tautology(lits) or subsumed(lits):
                continue
            keep(lits, c.id, sos or not set_of_support, c.id)

    while queue:
        if time.monotonic() - t0 > max_seconds or kept_count > max_clauses:
            return ProofResult(RESOURCE, None, given_count, kept_count, time.monotonic() - t0)
        _, _, serial = heapq.heappop(queue)
        if serial in deleted:
            continue
        given, gcite, gsos = clauses[serial]
        given_count += 1
        for l in given:
            usable_occ.setdefault(l, []).append(serial)
        for l in sorted(given, key=lambda x: (abs(x), x)):
            for other in list(usable_occ.get(-l, ())):
                if other in deleted:
                    continue
                olits, ocite, osos = clauses[other]
                if set_of_support and not (gsos or osos):
                    continue
                res = (given - {l}) | (olits - {-l})
                if tautology(res) or subsumed(res):
                    continue
                step = session.add(RESOLVE, tuple(sorted((gcite, ocite))), clause=decode(res))
                if not res:
                    return _finish(session, step.clause, goal, given_count, kept_count, t0)
                keep(res, step.id, gsos or osos, step.id)
    return ProofResult(SATURATED, None, given_count, kept_count, time.monotonic() - t0)


def _finish(session: _Session, empty: Clause, goal, given, kept, t0) -> ProofResult:
    needed: set[int] = set()
    todo = [empty.id]
    while todo:
        sid = todo.pop()
        if sid in needed:
            continue
        needed.add(sid)
        todo.extend(session.steps[sid].parents)
    steps = [session.steps[i] for i in sorted(needed)]
    proof = compress_hyper(Proof(tuple(steps), goal))
    return ProofResult(PROVED, proof, given, kept, time.monotonic() - t0)


# -- hyper-resolution grouping -------------------------------------------------------


def _is_satellite(c: Clause) -> bool:
    return len(c) == 1 or all(l.sign for l in c.literals)


def compress_hyper(p: Proof) -> Proof:
    """Group chains of resolutions against unit or positive satellites.

    A resolvent whose parent is itself a resolvent used nowhere else is
    merged with it, so the nucleus is resolved against all satellites in one
    recorded step, as provers print hyper-resolution.
    """
    steps = {s.id: s for s in p.steps}
    uses: dict[int, int] = {}
    for s in p.steps:
        for q in s.parents:
            uses[q] = uses.get(q, 0) + 1

    def chain(step: ProofStep) -> Optional[tuple[int, list[int]]]:
        # returns (nucleus, satellites) when step ends a chain of >= 2 resolutions
        if step.rule != RESOLVE:
            return None
        a, b = (steps[i] for i in step.parents)
        for inner, sat in ((a, b), (b, a)):
            if not _is_satellite(sat.clause):
                continue
            if inner.rule in (RESOLVE, HYPER) and uses.get(inner.id) == 1:
                sub = chain(inner) if inner.rule == RESOLVE else (inner.parents[0], list(inner.parents[1:]))
                if sub is None:
                    x, y = (steps[i] for i in inner.parents)
                    if _is_satellite(y.clause):
                        sub = (x.id, [y.id])
                    elif _is_satellite(x.clause):
                        sub = (y.id, [x.id])
                if sub is not None:
                    return sub[0], sub[1] + [sat.id]
        return None

    out: dict[int, ProofStep] = dict(steps)
    for s in p.steps:
        c = chain(s)
        if c is None:
            continue
        nucleus, sats = c
        out[s.id] = ProofStep(s.id, HYPER, (nucleus, *sats), s.clause, None, s.note)
    # drop intermediates no longer referenced
    keep: set[int] = set()
    todo = [p.steps[-1].id]
    while todo:
        sid = todo.pop()
        if sid in keep:
            continue
        keep.add(sid)
        todo.extend(out[sid].parents)
    return Proof(tuple(out[i] for i in sorted(keep)), p.goal)


# -- checking ---------------------------------------------------------------------------


def _skolem_names(c: Clause) -> set[str]:
    out = set()
    for l in c.literals:
        for name in constants(l.to_formula()):
            if is_skolem(name):
                out.add(name)
    return out


def _variant_modulo_skolem(c: Clause, d: Clause) -> bool:
    if variant(c, d):
        return True
    ks, ds = sorted(_skolem_names(c)), sorted(_skolem_names(d))
    if len(ks) != len(ds) or not ks:
        return False
    for perm in itertools.permutations(ds):
        ren = {k: Constant(v) for k, v in zip(ks, perm)}
        c2 = Clause.of(Literal(l.sign, _rename_consts(l.atom, ren)) for l in c.literals)
        if variant(c2, d):
            return True
    return False


def _rename_consts(a, ren):
    def term(t):
        return ren.get(t.name, t) if isinstance(t, Constant) else t

    if isinstance(a, Equality):
        return Equality(term(a.left), term(a.right))
    return Atom(a.predicate, tuple(term(t) for t in a.args))


def _clausify_matches(c: Clause, f: Formula) -> bool:
    from ..fol.clauses import clausify

    return any(_variant_modulo_skolem(c, k) for k in clausify(f))


def _hyper_results(nucleus: Clause, satellites: list[Clause]) -> list[Clause]:
    current = [nucleus]
    for sat in satellites:
        nxt = []
        for c in current:
            nxt.extend(r for r, _, _ in resolvents(c, sat))
            nxt.extend(r for f in factors(c) for r, _, _ in resolvents(f, sat))
        current = nxt
    return current


def check_step(step: ProofStep, steps: dict[int, ProofStep], axioms, goal) -> bool:
    for pid in step.parents:
        if pid not in steps or pid >= step.id:
            return False
    parents = [steps[i] for i in step.parents]
    ax_clauses = [a for a in axioms if isinstance(a, Clause)]
    ax_formulas = [a for a in axioms if not isinstance(a, Clause)]
    if step.rule == ASSUMPTION:
        if step.is_formula:
            return step.formula in ax_formulas
        return any(variant(step.clause, a) for a in ax_clauses) or any(
            _clausify_matches(step.clause, f) for f in ax_formulas
        )
    if step.rule == GOAL:
        return step.is_formula and goal is not None and step.formula == goal
    if step.is_formula:
        return False
    c = step.clause
    if step.rule == EQUALITY:
        return any(variant(c, e) for e in equality_axioms(_predicates_of([c])))
    if step.rule == CLAUSIFY:
        return len(parents) == 1 and parents[0].is_formula and _clausify_matches(c, parents[0].formula)
    if step.rule == DENY:
        return (
            len(parents) == 1
            and parents[0].rule == GOAL
            and _clausify_matches(c, Not(parents[0].formula))
        )
    if any(q.is_formula for q in parents):
        return False
    if step.rule == RESOLVE:
        if len(parents) == 1:
            parents = parents * 2
        if len(parents) != 2:
            return False
        a, b = parents[0].clause, parents[1].clause
        for x in [a] + _all_factors(a):
            for y in [b] + _all_factors(b):
                if any(_equal_or_factor(r, c) for r, _, _ in resolvents(x, y)):
                    return True
        return False
    if step.rule == FACTOR:
        return len(parents) == 1 and any(variant(f, c) for f in _all_factors(parents[0].clause))
    if step.rule == HYPER:
        if len(parents) < 2:
            return False
        nucleus, sats = parents[0].clause, [q.clause for q in parents[1:]]
        for order in itertools.permutations(sats):
            if any(_equal_or_factor(r, c) for r in _hyper_results(nucleus, list(order))):
                return True
        return False
    return False


def _all_factors(c: Clause) -> list[Clause]:
    out, todo, seen = [], [c], []
    while todo:
        x = todo.pop()
        for f in factors(x):
            if not any(variant(f, s) for s in seen):
                seen.append(f)
                out.append(f)
                todo.append(f)
    return out


def _equal_or_factor(r: Clause, c: Clause) -> bool:
    return variant(r, c) or instance_of(r, c)


def instance_of(r: Clause, c: Clause) -> bool:
    """True if some substitution maps the literals of ``r`` exactly onto ``c``."""
    if not r.keys >= c.keys or len(r) < len(c):
        return False
    lits = sorted(r.literals, key=lambda l: -len(l._vars))
    targets = list(c.literals)

    def go(i: int, s: dict, hit: frozenset) -> bool:
        if i == len(lits):
            return len(hit) == len(targets)
        for j, t in enumerate(targets):
            s2 = _literal_match(lits[i], t, s)
            if s2 is not None and go(i + 1, s2, hit | {j}):
                return True
        return False

    return go(0, {}, frozenset())


def check_proof(p: Proof, axioms: Sequence[Axiom]) -> bool:
    """Re-derive every step from its parents.

    Assumption steps must come from ``axioms`` (or their clausal forms) and
    the denial steps from the negation of the proof's goal.  The last step
    must be the empty clause.
    """
    if not p.steps:
        return False
    last = p.steps[-1]
    if last.clause is None or not last.clause.is_empty:
        return False
    steps: dict[int, ProofStep] = {}
    for s in p.steps:
        if s.id in steps:
            return False
        steps[s.id] = s
    for s in p.steps:
        if not check_step(s, steps, list(axioms), p.goal):
            return False
    return True
