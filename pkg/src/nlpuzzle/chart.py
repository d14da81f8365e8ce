"""Earley chart parsing under a feature grammar, with SEM composition.

The chart is packed: an edge is identified by (rule, dot, start, bindings)
at its end position and keeps every back-pointer that produced it.  Trees
are unpacked from the chart afterwards and ordered by size, then by the
rule indices met in a pre-order walk.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from .fol.syntax import Formula
from .grammar import SEM, Category, FeatureStructure, FVar, Grammar, ProductionRule
from .grammar import resolve, substitute_features, unify_features
from .lam import IncompleteSemantics, LambdaTerm, Reducer, beta_reduce, free_vars, to_formula

log = logging.getLogger(__name__)

MAX_TREES = 200


class UnknownWordError(ValueError):
    def __init__(self, words: Sequence[str]):
        super().__init__("unknown word(s): " + ", ".join(words))
        self.words = tuple(words)


Bindings = tuple  # sorted (name, value) pairs


@dataclass(frozen=True)
class ChartEdge:
    rule: int
    dot: int
    start: int
    bindings: Bindings = ()


@dataclass(frozen=True)
class ParseTree:
    category: Category
    children: tuple[Union[ParseTree, str], ...]
    sem: Optional[LambdaTerm] = None
    rule: Optional[ProductionRule] = field(default=None, compare=False)
    rule_index: int = field(default=-1, compare=False)

    @property
    def leaves(self) -> list[str]:
        out = []
        for c in self.children:
            out.extend(c.leaves if isinstance(c, ParseTree) else [c])
        return out

    @property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children if isinstance(c, ParseTree))

    def rule_sequence(self) -> tuple[int, ...]:
        out = [self.rule_index]
        for c in self.children:
            if isinstance(c, ParseTree):
                out.extend(c.rule_sequence())
        return tuple(out)

    def bracketed(self) -> str:
        inner = " ".join(c.bracketed() if isinstance(c, ParseTree) else c for c in self.children)
        return f"({self.category.symbol} {inner})"

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        label = str(Category(self.category.symbol, self.category.features.without_sem()))
        if all(isinstance(c, str) for c in self.children):
            return f"{pad}({label} {' '.join(self.children)})"
        lines = [f"{pad}({label}"]
        for c in self.children:
            lines.append(c.pretty(indent + 1) if isinstance(c, ParseTree) else f"{pad}  {c}")
        lines[-1] += ")"
        return "\n".join(lines)


class _Chart:
    def __init__(self, tokens: Sequence[str], g: Grammar):
        self.surface = list(tokens)
        self.tokens = [t.lower() for t in tokens]
        self.g = g
        self.by_lhs: dict[str, list[int]] = {}
        for i, r in enumerate(g.rules):
            self.by_lhs.setdefault(r.lhs.symbol, []).append(i)
        n = len(tokens)
        # columns[k]: edge -> list of back-pointers (prev_edge, prev_pos, child)
        self.columns: list[dict[ChartEdge, list]] = [dict() for _ in range(n + 1)]
        # waiting[k][symbol]: edges in column k whose next symbol is symbol
        self.waiting: list[dict[str, list[ChartEdge]]] = [dict() for _ in range(n + 1)]

    def add(self, k: int, edge: ChartEdge, back, agenda: deque) -> None:
        col = self.columns[k]
        if edge in col:
            if back is not None and back not in col[edge]:
                col[edge].append(back)
            return
        col[edge] = [] if back is None else [back]
        agenda.append(edge)

    def run(self, start: str) -> None:
        g = self.g
        for ri in self.by_lhs.get(start, []):
            self.columns[0][ChartEdge(ri, 0, 0)] = []
        for k in range(len(self.tokens) + 1):
            predicted: set[str] = set()
            # edges scanned into this column wait here until it is processed
            agenda: deque = deque(self.columns[k])
            while agenda:
                edge = agenda.popleft()
                rule = g.rules[edge.rule]
                if edge.dot == len(rule.rhs):
                    self.complete(k, edge, agenda)
                    continue
                nxt = rule.rhs[edge.dot]
                if isinstance(nxt, str):
                    if k < len(self.tokens) and self.tokens[k] == nxt.lower():
                        moved = ChartEdge(edge.rule, edge.dot + 1, edge.start, edge.bindings)
                        self.add(k + 1, moved, (edge, k, ("w", k)), _Sink())
                    continue
                self.waiting[k].setdefault(nxt.symbol, []).append(edge)
                if nxt.symbol not in predicted:
                    predicted.add(nxt.symbol)
                    for ri in self.by_lhs.get(nxt.symbol, []):
                        self.add(k, ChartEdge(ri, 0, k), None, agenda)

    def child_features(self, edge: ChartEdge) -> FeatureStructure:
        lhs = self.g.rules[edge.rule].lhs
        b = dict(edge.bindings)
        items = []
        for name, value in lhs.features.items:
            if name == SEM:
                continue
            v = resolve(value, b)
            if not isinstance(v, FVar):
                items.append((name, v))
        return FeatureStructure(tuple(items))

    def complete(self, k: int, edge: ChartEdge, agenda: deque) -> None:
        symbol = self.g.rules[edge.rule].lhs.symbol
        feats = self.child_features(edge)
        for parent in self.waiting[edge.start].get(symbol, []):
            self._advance(k, parent, edge, feats, agenda)

    def _advance(self, k, parent: ChartEdge, child: ChartEdge, feats, agenda) -> None:
        want = self.g.rules[parent.rule].rhs[parent.dot]
        b = unify_features(want.features, feats, dict(parent.bindings))
        if b is None:
            return
        moved = ChartEdge(parent.rule, parent.dot + 1, parent.start, tuple(sorted(b.items(), key=_bkey)))
        self.add(k, moved, (parent, child.start, ("e", child, k)), agenda)


def _bkey(item):
    return item[0]


class _Sink:
    """Agenda stand-in for edges placed in a later column."""

    def append(self, _):
        pass


def check_vocabulary(tokens: Sequence[str], g: Grammar) -> list[str]:
    return [t for t in tokens if t.lower() not in g.terminals]


def parse(tokens: Sequence[str], g: Grammar, start: str | None = None) -> list[ParseTree]:
    """All complete parses of ``tokens`` as ``start`` (default: the grammar's)."""
    if not tokens:
        raise ValueError("cannot parse an empty token sequence")
    unknown = check_vocabulary(tokens, g)
    if unknown:
        raise UnknownWordError(list(dict.fromkeys(unknown)))
    start = start or g.start
    chart = _Chart(tokens, g)
    chart.run(start)
    n = len(tokens)
    roots = [
        e
        for e in chart.columns[n]
        if e.start == 0 and g.rules[e.rule].lhs.symbol == start and e.dot == len(g.rules[e.rule].rhs)
    ]
    builder = _TreeBuilder(chart)
    trees: list[ParseTree] = []
    for e in sorted(roots, key=lambda e: (e.rule, repr(e.bindings))):
        trees.extend(builder.trees(e, n, frozenset()))
    unique = list(dict.fromkeys(trees))
    unique.sort(key=lambda t: (t.size, t.rule_sequence()))
    return unique[:MAX_TREES]


class _TreeBuilder:
    def __init__(self, chart: _Chart):
        self.chart = chart
        self.g = chart.g
        self.memo: dict = {}

    def trees(self, edge: ChartEdge, end: int, path: frozenset) -> list[ParseTree]:
        key = (edge, end)
        if key in self.memo:
            return self.memo[key]
        if key in path:
            return []  # unary cycle
        path = path | {key}
        rule = self.g.rules[edge.rule]
        out: list[ParseTree] = []
        for kids in itertools.islice(self.sequences(edge, end, path), MAX_TREES):
            tree = self.make(edge, rule, tuple(kids))
            out.append(tree)
        self.memo[key] = out
        return out

    def sequences(self, edge: ChartEdge, end: int, path) -> Iterator[list]:
        if edge.dot == 0:
            yield []
            return
        for prev, prev_pos, child in self.chart.columns[end][edge]:
            if child[0] == "w":
                options = [self.chart.surface[child[1]]]
            else:
                options = self.trees(child[1], child[2], path)
            if not options:
                continue
            for head in self.sequences(prev, prev_pos, path):
                for opt in options:
                    yield head + [opt]

    def make(self, edge: ChartEdge, rule: ProductionRule, kids: tuple) -> ParseTree:
        b = dict(edge.bindings)
        feats = substitute_features(rule.lhs.features, b)
        sem = compose_sem(rule, kids)
        cat = Category(rule.lhs.symbol, _with_sem(feats, sem))
        return ParseTree(cat, kids, sem, rule, edge.rule)


def _with_sem(fs: FeatureStructure, sem) -> FeatureStructure:
    items = tuple(kv for kv in fs.items if kv[0] != SEM)
    if sem is not None:
        items = ((SEM, sem),) + items
    return FeatureStructure(items)


def compose_sem(rule: ProductionRule, kids: Sequence[Union[ParseTree, str]]) -> Optional[LambdaTerm]:
    """Fill the rule's SEM template with the children's meanings and reduce.

    Returns None when the rule has no SEM or a needed child meaning is missing.
    """
    template = rule.lhs.features.get(SEM)
    if template is None:
        return None
    holes: dict[str, Optional[LambdaTerm]] = {}
    for part, kid in zip(rule.rhs, kids):
        if isinstance(part, Category) and isinstance(kid, ParseTree):
            v = part.features.get(SEM)
            if isinstance(v, FVar):
                holes["?" + v.name] = kid.sem
    if isinstance(template, FVar):
        return holes.get("?" + template.name)
    term = template
    red = Reducer()
    for name in sorted(free_vars(term)):
        if not name.startswith("?"):
            continue
        value = holes.get(name)
        if value is None:
            return None
        term = red.subst(term, name, value, free_vars(value))
    return beta_reduce(term)


def sentence_semantics(t: ParseTree) -> Formula:
    """Closed formula for a complete parse; raises IncompleteSemantics."""
    if t.sem is None:
        raise IncompleteSemantics(f"no semantics composed for {t.category.symbol}")
    return to_formula(beta_reduce(t.sem))


def first_formula(trees: Sequence[ParseTree]) -> tuple[Optional[ParseTree], Optional[Formula]]:
    """The first parse (in parse order) whose semantics is a closed formula."""
    for t in trees:
        try:
            return t, sentence_semantics(t)
        except IncompleteSemantics:
            continue
    return None, None
