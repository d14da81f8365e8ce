"""Substitutions, capture-avoiding substitution and syntactic unification."""

from __future__ import annotations

import itertools
from typing import Mapping, Optional

from .syntax import (
    BINARY,
    Application,
    Atom,
    Constant,
    Equality,
    Formula,
    Not,
    Term,
    Variable,
    free_variables,
    term_variables,
)

Substitution = Mapping[str, Term]


def apply_term(t: Term, s: Substitution) -> Term:
    if isinstance(t, Variable):
        return s.get(t.name, t)
    if isinstance(t, Constant):
        return t
    return Application(t.function, tuple(apply_term(a, s) for a in t.args))


def apply_atom(a: Atom | Equality, s: Substitution) -> Atom | Equality:
    if isinstance(a, Atom):
        if not a.args:
            return a
        return Atom(a.predicate, tuple(apply_term(t, s) for t in a.args))
    return Equality(apply_term(a.left, s), apply_term(a.right, s))


def fresh_name(base: str, avoid: set[str]) -> str:
    stem = base.rstrip("0123456789") or "v"
    for i in itertools.count(1):
        candidate = f"{stem}{i}"
        if candidate not in avoid:
            return candidate


def substitute(f: Formula, s: Substitution) -> Formula:
    """Replace free variables of ``f`` according to ``s``.

    Bound variables are renamed when a substituted term would otherwise be
    captured.
    """
    if not s:
        return f
    if isinstance(f, (Atom, Equality)):
        return apply_atom(f, s)
    if isinstance(f, Not):
        return Not(substitute(f.body, s))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, s), substitute(f.right, s))
    inner = {k: v for k, v in s.items() if k != f.var}
    relevant = {k: v for k, v in inner.items() if k in free_variables(f.body)}
    if not relevant:
        return f
    incoming: set[str] = set()
    for t in relevant.values():
        incoming |= term_variables(t)
    var = f.var
    if var in incoming:
        avoid = incoming | free_variables(f.body) | set(inner)
        var = fresh_name(f.var, avoid)
        relevant[f.var] = Variable(var)
    return type(f)(var, substitute(f.body, relevant))


def compose(first: Substitution, second: Substitution) -> dict[str, Term]:
    """The substitution that applies ``first`` and then ``second``."""
    out = {v: apply_term(t, second) for v, t in first.items()}
    for v, t in second.items():
        out.setdefault(v, t)
    return {v: t for v, t in out.items() if t != Variable(v)}


def occurs(name: str, t: Term) -> bool:
    if isinstance(t, Variable):
        return t.name == name
    if isinstance(t, Application):
        return any(occurs(name, a) for a in t.args)
    return False


def _unify_terms(pairs: list[tuple[Term, Term]], s: dict[str, Term]) -> Optional[dict[str, Term]]:
    while pairs:
        a, b = pairs.pop()
        a = apply_term(a, s)
        b = apply_term(b, s)
        if a == b:
            continue
        if isinstance(b, Variable) and not isinstance(a, Variable):
            a, b = b, a
        if isinstance(a, Variable):
            if occurs(a.name, b):
                return None
            binding = {a.name: b}
            s = {v: apply_term(t, binding) for v, t in s.items()}
            s[a.name] = b
            continue
        if isinstance(a, Constant) or isinstance(b, Constant):
            return None
        if a.function != b.function or len(a.args) != len(b.args):
            return None
        pairs.extend(zip(a.args, b.args))
    return s


def unify(a, b, s: Substitution | None = None) -> Optional[dict[str, Term]]:
    """Most general unifier of two terms or two atoms, or ``None``.

    The result is idempotent: no bound variable occurs in any binding.
    """
    start = dict(s) if s else {}
    if isinstance(a, Atom) and isinstance(b, Atom):
        if a.predicate != b.predicate or len(a.args) != len(b.args):
            return None
        return _unify_terms(list(zip(a.args, b.args)), start)
    if isinstance(a, Equality) and isinstance(b, Equality):
        return _unify_terms([(a.left, b.left), (a.right, b.right)], start)
    if isinstance(a, (Atom, Equality)) or isinstance(b, (Atom, Equality)):
        return None
    return _unify_terms([(a, b)], start)


def match(pattern, target, s: Substitution | None = None) -> Optional[dict[str, Term]]:
    """One-way matching: bind only variables of ``pattern``."""
    s = dict(s) if s else {}
    if isinstance(pattern, Atom):
        if not isinstance(target, Atom) or pattern.predicate != target.predicate:
            return None
        if len(pattern.args) != len(target.args):
            return None
        pairs = list(zip(pattern.args, target.args))
    elif isinstance(pattern, Equality):
        if not isinstance(target, Equality):
            return None
        pairs = [(pattern.left, target.left), (pattern.right, target.right)]
    else:
        pairs = [(pattern, target)]
    while pairs:
        p, t = pairs.pop()
        if isinstance(p, Variable):
            bound = s.get(p.name)
            if bound is None:
                s[p.name] = t
            elif bound != t:
                return None
        elif isinstance(p, Constant):
            if p != t:
                return None
        else:
            if not isinstance(t, Application) or t.function != p.function:
                return None
            if len(t.args) != len(p.args):
                return None
            pairs.extend(zip(p.args, t.args))
    return s

