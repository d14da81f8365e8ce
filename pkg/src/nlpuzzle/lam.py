"""Lambda terms over formula fragments, used for SEM composition.

Textual syntax (inside grammar SEM values)::

    \\x.(walk(x) & chew_gum(x))     abstraction, several binders allowed: \\P x.P(x)
    ?np(?vp)                       application; ?name is a rule-scoped hole
    P(marge)                       application of a bound variable
    all x.(knight(x) -> truth(x))  quantifiers, connectives as in theory files

A name is a variable when a lambda or quantifier binds it (or it starts with
``?``); any other name is a predicate, function or constant symbol.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

from .fol.parser import FormulaSyntaxError, Token, tokenize
from .fol.syntax import (
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

FRESH_PREFIX = "_v"
DEFAULT_BUDGET = 10_000


class IncompleteSemantics(ValueError):
    """A term could not be converted to a closed formula."""


class ReductionBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return format_lambda(self)


@dataclass(frozen=True)
class Lam:
    var: str
    body: LambdaTerm

    def __str__(self):
        return format_lambda(self)


@dataclass(frozen=True)
class App:
    fun: LambdaTerm
    arg: LambdaTerm

    def __str__(self):
        return format_lambda(self)


@dataclass(frozen=True)
class Leaf:
    """A formula or term constructor whose children are lambda terms.

    ``op`` is one of ``sym`` (predicate/function/constant named ``name``),
    ``fvar`` (a free first-order variable), ``not``, ``and``, ``or``, ``imp``,
    ``iff``, ``eq``, ``all`` or ``exists`` (binding ``name``).
    """

    op: str
    name: str = ""
    args: tuple[LambdaTerm, ...] = ()

    def __str__(self):
        return format_lambda(self)


LambdaTerm = Union[Var, Lam, App, Leaf]

_BINDERS = ("all", "exists")


def apply(fun: LambdaTerm, arg: LambdaTerm) -> App:
    return App(fun, arg)


def sym(name: str, *args: LambdaTerm) -> Leaf:
    return Leaf("sym", name, tuple(args))


def free_vars(t: LambdaTerm) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    out: set[str] = set()
    for a in t.args:
        out |= free_vars(a)
    if t.op in _BINDERS:
        out.discard(t.name)
    return out


class Reducer:
    """One reduction session: owns the fresh-name counter and step budget."""

    def __init__(self, budget: int = DEFAULT_BUDGET):
        self.budget = budget
        self.steps = 0
        self._fresh = itertools.count(1)

    def fresh(self) -> str:
        return f"{FRESH_PREFIX}{next(self._fresh)}"

    def subst(self, t: LambdaTerm, name: str, value: LambdaTerm, fv: set[str]) -> LambdaTerm:
        if isinstance(t, Var):
            return value if t.name == name else t
        if isinstance(t, App):
            return App(self.subst(t.fun, name, value, fv), self.subst(t.arg, name, value, fv))
        if isinstance(t, Lam):
            if t.var == name or name not in free_vars(t.body):
                return t
            var, body = t.var, t.body
            if var in fv:
                new = self.fresh()
                body = self.subst(body, var, Var(new), {new})
                var = new
            return Lam(var, self.subst(body, name, value, fv))
        if t.op in _BINDERS:
            if t.name == name or name not in free_vars(t):
                return t
            var, body = t.name, t.args[0]
            if var in fv:
                new = self.fresh()
                body = self.subst(body, var, Var(new), {new})
                var = new
            return Leaf(t.op, var, (self.subst(body, name, value, fv),))
        if not t.args:
            return t
        return Leaf(t.op, t.name, tuple(self.subst(a, name, value, fv) for a in t.args))

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise ReductionBudgetExceeded(f"beta reduction exceeded {self.budget} steps")

    def whnf(self, t: LambdaTerm) -> LambdaTerm:
        """Reduce the head position until it is not a redex."""
        if not isinstance(t, App):
            return t
        fun = self.whnf(t.fun)
        if isinstance(fun, Lam):
            self._tick()
            return self.whnf(self.subst(fun.body, fun.var, t.arg, free_vars(t.arg)))
        return App(fun, t.arg)

    def normalize(self, t: LambdaTerm) -> LambdaTerm:
        t = self.whnf(t)
        if isinstance(t, Lam):
            return Lam(t.var, self.normalize(t.body))
        if isinstance(t, App):
            return App(self.normalize(t.fun), self.normalize(t.arg))
        if isinstance(t, Var) or not t.args:
            return t
        return Leaf(t.op, t.name, tuple(self.normalize(a) for a in t.args))


def beta_reduce(t: LambdaTerm, budget: int = DEFAULT_BUDGET) -> LambdaTerm:
    """Normal-order reduction to beta-normal form."""
    return Reducer(budget).normalize(t)


def alpha_equal(a: LambdaTerm, b: LambdaTerm) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _alpha(a, b, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        la, lb = env_a.get(a.name), env_b.get(b.name)
        if la is None and lb is None:
            return a.name == b.name
        return la == lb
    if isinstance(a, App):
        return _alpha(a.fun, b.fun, env_a, env_b, depth) and _alpha(a.arg, b.arg, env_a, env_b, depth)
    if isinstance(a, Lam):
        return _alpha(a.body, b.body, {**env_a, a.var: depth}, {**env_b, b.var: depth}, depth + 1)
    if a.op != b.op or len(a.args) != len(b.args):
        return False
    if a.op in _BINDERS:
        return _alpha(
            a.args[0], b.args[0], {**env_a, a.name: depth}, {**env_b, b.name: depth}, depth + 1
        )
    if a.name != b.name:
        return False
    return all(_alpha(x, y, env_a, env_b, depth) for x, y in zip(a.args, b.args))


# -- conversion to and from formulas ---------------------------------------

_CONNECTIVES = {"and": And, "or": Or, "imp": Implies, "iff": Iff}
_LEAF_OPS = {And: "and", Or: "or", Implies: "imp", Iff: "iff"}


def to_formula(t: LambdaTerm) -> Formula:
    """Convert a beta-normal term to a formula.

    Raises IncompleteSemantics naming any residual abstraction, application
    or free semantic variable.
    """
    return _formula(t, frozenset())


def _formula(t: LambdaTerm, bound: frozenset[str]) -> Formula:
    if isinstance(t, Lam):
        raise IncompleteSemantics(f"residual abstraction: {format_lambda(t)}")
    if isinstance(t, App):
        raise IncompleteSemantics(f"residual application: {format_lambda(t)}")
    if isinstance(t, Var):
        raise IncompleteSemantics(f"free semantic variable {t.name} in formula position")
    if t.op == "sym":
        return Atom(t.name, tuple(_term(a, bound) for a in t.args))
    if t.op == "not":
        return Not(_formula(t.args[0], bound))
    if t.op == "eq":
        return Equality(_term(t.args[0], bound), _term(t.args[1], bound))
    if t.op in _CONNECTIVES:
        return _CONNECTIVES[t.op](_formula(t.args[0], bound), _formula(t.args[1], bound))
    if t.op in _BINDERS:
        cls = ForAll if t.op == "all" else Exists
        return cls(t.name, _formula(t.args[0], bound | {t.name}))
    raise IncompleteSemantics(f"{t.op} is not a formula: {format_lambda(t)}")


def _term(t: LambdaTerm, bound: frozenset[str]) -> Term:
    if isinstance(t, Var):
        if t.name in bound:
            return Variable(t.name)
        raise IncompleteSemantics(f"free semantic variable {t.name}")
    if isinstance(t, (Lam, App)):
        raise IncompleteSemantics(f"residual lambda term in argument: {format_lambda(t)}")
    if t.op == "fvar":
        return Variable(t.name)
    if t.op != "sym":
        raise IncompleteSemantics(f"formula used as a term: {format_lambda(t)}")
    if not t.args:
        return Constant(t.name)
    return Application(t.name, tuple(_term(a, bound) for a in t.args))


def from_formula(f: Formula, bound: frozenset[str] = frozenset()) -> LambdaTerm:
    """Embed a formula as a lambda term (inverse of ``to_formula``)."""
    if isinstance(f, Atom):
        return Leaf("sym", f.predicate, tuple(_from_term(a, bound) for a in f.args))
    if isinstance(f, Equality):
        return Leaf("eq", "", (_from_term(f.left, bound), _from_term(f.right, bound)))
    if isinstance(f, Not):
        return Leaf("not", "", (from_formula(f.body, bound),))
    if isinstance(f, (ForAll, Exists)):
        op = "all" if isinstance(f, ForAll) else "exists"
        return Leaf(op, f.var, (from_formula(f.body, bound | {f.var}),))
    return Leaf(_LEAF_OPS[type(f)], "", (from_formula(f.left, bound), from_formula(f.right, bound)))


def _from_term(t: Term, bound) -> LambdaTerm:
    if isinstance(t, Variable):
        return Var(t.name) if t.name in bound else Leaf("fvar", t.name)
    if isinstance(t, Constant):
        return Leaf("sym", t.name)
    return Leaf("sym", t.function, tuple(_from_term(a, bound) for a in t.args))


# -- printing ---------------------------------------------------------------

_OP_TEXT = {"and": "&", "or": "|", "imp": "->", "iff": "<->"}
_OP_PREC = {"iff": 1, "imp": 2, "or": 3, "and": 4}


def format_lambda(t: LambdaTerm) -> str:
    return _fmt(t, 0)


def _fmt(t: LambdaTerm, ctx: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        names = [t.var]
        body = t.body
        while isinstance(body, Lam):
            names.append(body.var)
            body = body.body
        text = "\\" + " ".join(names) + "." + _fmt(body, 5)
        return f"({text})" if ctx > 0 else text
    if isinstance(t, App):
        fun, args = t, []
        while isinstance(fun, App):
            args.append(fun.arg)
            fun = fun.fun
        head = _fmt(fun, 6)
        return f"{head}({','.join(_fmt(a, 0) for a in reversed(args))})"
    if t.op in ("sym", "fvar"):
        if not t.args:
            return t.name
        return f"{t.name}({','.join(_fmt(a, 0) for a in t.args)})"
    if t.op == "not":
        inner = t.args[0]
        if isinstance(inner, Leaf) and inner.op == "eq":
            return f"{_fmt(inner.args[0], 6)} != {_fmt(inner.args[1], 6)}"
        return "-" + _fmt(inner, 5)
    if t.op == "eq":
        return f"{_fmt(t.args[0], 6)} = {_fmt(t.args[1], 6)}"
    if t.op in _BINDERS:
        text = f"{t.op} {t.name}.{_fmt(t.args[0], 5)}"
        return f"({text})" if ctx > 0 else text
    prec = _OP_PREC[t.op]
    if t.op in ("and", "or"):
        left, right = _fmt(t.args[0], prec), _fmt(t.args[1], prec + 1)
    elif t.op == "imp":
        left, right = _fmt(t.args[0], prec + 1), _fmt(t.args[1], prec)
    else:
        left, right = _fmt(t.args[0], prec + 1), _fmt(t.args[1], prec + 1)
    text = f"{left} {_OP_TEXT[t.op]} {right}"
    return f"({text})" if ctx > prec else text


# -- parsing ------------------------------------------------------------------


class LambdaSyntaxError(FormulaSyntaxError):
    pass


class _LambdaParser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("OP", "NAME") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str):
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, message: str):
        raise LambdaSyntaxError(message, self.tok.line, self.tok.col)

    def expr(self, bound: frozenset[str]) -> LambdaTerm:
        if self.at("\\"):
            return self.abstraction(bound)
        if self.at("all") or self.at("exists"):
            return self.quantified(bound)
        return self.binary(bound, 1)

    def abstraction(self, bound) -> LambdaTerm:
        self.advance()
        names = []
        while self.tok.kind in ("NAME", "QVAR"):
            tok = self.advance()
            names.append(tok.text if tok.kind == "NAME" else "?" + tok.text)
        if not names:
            self.error("lambda without variable")
        self.expect(".")
        body = self.expr(bound | set(names))
        for name in reversed(names):
            body = Lam(name, body)
        return body

    def quantified(self, bound) -> LambdaTerm:
        op = self.advance().text
        names = []
        while self.tok.kind == "NAME" and self.tok.text not in _BINDERS:
            names.append(self.advance().text)
            if self.at("."):
                break
        if not names:
            self.error("quantifier without variable")
        self.expect(".")
        body = self.expr(bound | set(names))
        for name in reversed(names):
            body = Leaf(op, name, (body,))
        return body

    _LEVELS = {1: ("<->", "iff"), 2: ("->", "imp"), 3: ("|", "or"), 4: ("&", "and")}

    def binary(self, bound, level: int) -> LambdaTerm:
        if level > 4:
            return self.unary(bound)
        text, op = self._LEVELS[level]
        left = self.binary(bound, level + 1)
        if level == 2:
            if self.at(text):
                self.advance()
                return Leaf(op, "", (left, self.binary(bound, level)))
            return left
        while self.at(text):
            self.advance()
            left = Leaf(op, "", (left, self.binary(bound, level + 1)))
            if level == 1 and self.at(text):
                self.error("chained '<->' needs parentheses")
        return left

    def unary(self, bound) -> LambdaTerm:
        if self.at("-"):
            self.advance()
            return Leaf("not", "", (self.unary(bound),))
        if self.at("\\"):
            return self.abstraction(bound)
        if self.at("all") or self.at("exists"):
            return self.quantified(bound)
        left = self.application(bound)
        if self.at("="):
            self.advance()
            return Leaf("eq", "", (left, self.application(bound)))
        if self.at("!="):
            self.advance()
            return Leaf("not", "", (Leaf("eq", "", (left, self.application(bound))),))
        return left

    def application(self, bound) -> LambdaTerm:
        tok = self.tok
        if self.at("("):
            self.advance()
            head = self.expr(bound)
            self.expect(")")
        elif tok.kind == "QVAR":
            self.advance()
            head = Var("?" + tok.text)
        elif tok.kind == "NAME":
            self.advance()
            head = Var(tok.text) if tok.text in bound else None
        else:
            self.error(f"expected an expression, found {tok.text or 'end of input'!r}")
        if head is None:
            args = self.arg_list(bound) if self.at("(") else ()
            head = Leaf("sym", tok.text, args)
        while self.at("("):
            for a in self.arg_list(bound):
                head = App(head, a)
        return head

    def arg_list(self, bound) -> tuple[LambdaTerm, ...]:
        self.expect("(")
        args = [self.expr(bound)]
        while self.at(","):
            self.advance()
            args.append(self.expr(bound))
        self.expect(")")
        return tuple(args)


def parse_lambda(text: str) -> LambdaTerm:
    tokens = tokenize(text)
    p = _LambdaParser(tokens)
    t = p.expr(frozenset())
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r}")
    return t
