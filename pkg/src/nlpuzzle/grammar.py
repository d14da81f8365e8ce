"""Feature-based context-free grammars with lambda SEM annotations.

File format (one rule per line)::

    %start S
    %pos VSAY v
    % a comment
    S[NUM=?n, SEM=<?np(?vp)>] -> NP[NUM=?n, SEM=?np] VP[NUM=?n, SEM=?vp]
    PropN[NUM=sg, SEM=<\\P.P(marge)>] -> 'Marge'
    Det[NUM=sg] -> 'a' | 'an'

Feature values are atoms (``sg``), rule-scoped variables (``?n``) or, for
SEM only, a lambda expression in angle brackets.  On the right-hand side
``SEM=?x`` names the child's meaning so the left-hand template can use it.
Terminals are quoted and matched case-insensitively.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Union

from .fol.parser import FormulaSyntaxError
from .lam import App, Lam, LambdaTerm, Leaf, Var, format_lambda, parse_lambda
from .nlp.lexical import SynonymDb, lemmatize

log = logging.getLogger(__name__)

SEM = "SEM"


class GrammarError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class FVar:
    """A feature variable such as ``?n``; scoped to one rule."""

    name: str

    def __str__(self) -> str:
        return "?" + self.name


FeatureValue = Union[str, FVar, LambdaTerm]


@dataclass(frozen=True)
class FeatureStructure:
    items: tuple[tuple[str, FeatureValue], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, FeatureValue] | None = None, **kw) -> FeatureStructure:
        merged = dict(mapping or {}, **kw)
        return cls(tuple(sorted(merged.items(), key=lambda kv: (kv[0] != SEM, kv[0]))))

    def get(self, name: str, default=None):
        for k, v in self.items:
            if k == name:
                return v
        return default

    def __contains__(self, name: str) -> bool:
        return any(k == name for k, _ in self.items)

    def as_dict(self) -> dict[str, FeatureValue]:
        return dict(self.items)

    def without_sem(self) -> FeatureStructure:
        return FeatureStructure(tuple(kv for kv in self.items if kv[0] != SEM))

    def __str__(self) -> str:
        return ", ".join(f"{k}={_format_value(v)}" for k, v in _display_order(self.items))


def _display_order(items):
    return sorted(items, key=lambda kv: (kv[0] == SEM, kv[0]))


def _format_value(v: FeatureValue) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, FVar):
        return str(v)
    return f"<{format_lambda(v)}>"


@dataclass(frozen=True)
class Category:
    symbol: str
    features: FeatureStructure = FeatureStructure()

    def __str__(self) -> str:
        if not self.features.items:
            return self.symbol
        return f"{self.symbol}[{self.features}]"


@dataclass(frozen=True)
class ProductionRule:
    lhs: Category
    rhs: tuple[Union[Category, str], ...]

    @property
    def is_lexical(self) -> bool:
        return bool(self.rhs) and all(isinstance(x, str) for x in self.rhs)

    def __str__(self) -> str:
        parts = [str(x) if isinstance(x, Category) else _quote(x) for x in self.rhs]
        return f"{self.lhs} -> {' '.join(parts)}"


def _quote(word: str) -> str:
    return "'" + word.replace("'", "\\'") + "'"


@dataclass(frozen=True)
class Grammar:
    start: str
    rules: tuple[ProductionRule, ...]
    pos_tags: tuple[tuple[str, str], ...] = ()
    undefined: tuple[str, ...] = ()
    lexicon: Mapping[str, tuple[int, ...]] = field(default=None, compare=False, repr=False)
    terminals: frozenset[str] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        index: dict[str, list[int]] = {}
        terms: set[str] = set()
        for i, r in enumerate(self.rules):
            for x in r.rhs:
                if isinstance(x, str):
                    terms.add(x.lower())
            if r.is_lexical and len(r.rhs) == 1:
                index.setdefault(r.rhs[0].lower(), []).append(i)
        object.__setattr__(self, "lexicon", {w: tuple(ix) for w, ix in index.items()})
        object.__setattr__(self, "terminals", frozenset(terms))

    def lexical_rules(self, word: str) -> list[ProductionRule]:
        return [self.rules[i] for i in self.lexicon.get(word.lower(), ())]

    def rules_for(self, symbol: str) -> list[ProductionRule]:
        return [r for r in self.rules if r.lhs.symbol == symbol]

    @property
    def nonterminals(self) -> set[str]:
        return {r.lhs.symbol for r in self.rules}

    def pos_of(self, symbol: str) -> str | None:
        """Part-of-speech tag (n/v/a/r) of a preterminal, if known."""
        for sym, tag in self.pos_tags:
            if sym == symbol:
                return tag
        return _default_pos(symbol)

    def word_pos(self, word: str) -> set[str]:
        out = set()
        for r in self.lexical_rules(word):
            tag = self.pos_of(r.lhs.symbol)
            if tag:
                out.add(tag)
        return out

    def with_rules(self, extra: Iterable[ProductionRule]) -> Grammar:
        rules = list(self.rules)
        seen = set(rules)
        for r in extra:
            if r not in seen:
                seen.add(r)
                rules.append(r)
        return replace(self, rules=tuple(rules))


def _default_pos(symbol: str) -> str | None:
    s = symbol.upper()
    if s in ("PROPN", "NP", "PRO"):
        return None
    if s.startswith("ADJ") or s == "A":
        return "a"
    if s.startswith("ADV"):
        return "r"
    if s.startswith("N"):
        return "n"
    if s.startswith("V") or s in ("IV", "TV", "DTV"):
        return "v"
    return None


# -- reading ---------------------------------------------------------------


class _LineReader:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str):
        raise GrammarError(message, self.lineno)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def eof(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text) or self.text[self.pos] == "%"

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-+"):
            self.pos += 1
        if start == self.pos:
            self.error(f"expected a name at column {start + 1}")
        return self.text[start : self.pos]

    def quoted(self) -> str:
        self.skip_ws()
        q = self.text[self.pos]
        self.pos += 1
        out = []
        while self.pos < len(self.text) and self.text[self.pos] != q:
            if self.text[self.pos] == "\\" and self.pos + 1 < len(self.text):
                self.pos += 1
            out.append(self.text[self.pos])
            self.pos += 1
        if self.pos >= len(self.text):
            self.error("unterminated quoted terminal")
        self.pos += 1
        return "".join(out)

    def sem_block(self) -> str:
        # '<' ... '>' where '->' and '<->' inside do not count as brackets
        assert self.text[self.pos] == "<"
        self.pos += 1
        depth = 1
        start = self.pos
        t = self.text
        while self.pos < len(t):
            if t.startswith("<->", self.pos):
                self.pos += 3
                continue
            if t.startswith("->", self.pos):
                self.pos += 2
                continue
            c = t[self.pos]
            if c == "<":
                depth += 1
            elif c == ">":
                depth -= 1
                if depth == 0:
                    body = t[start : self.pos]
                    self.pos += 1
                    return body
            self.pos += 1
        self.error("unterminated SEM expression")

    def category(self, lhs: bool) -> Category:
        symbol = self.ident()
        feats: dict[str, FeatureValue] = {}
        if self.peek("["):
            self.pos += 1
            while not self.peek("]"):
                name = self.ident()
                if not self.peek("="):
                    self.error(f"expected '=' after feature {name}")
                self.pos += 1
                self.skip_ws()
                if self.text.startswith("<", self.pos):
                    if name != SEM:
                        self.error(f"lambda value allowed only for SEM, not {name}")
                    body = self.sem_block()
                    try:
                        feats[name] = parse_lambda(body)
                    except FormulaSyntaxError as e:
                        raise GrammarError(f"bad SEM expression <{body}>: {e}", self.lineno) from None
                elif self.text.startswith("?", self.pos):
                    self.pos += 1
                    feats[name] = FVar(self.ident())
                else:
                    feats[name] = self.ident()
                if self.peek(","):
                    self.pos += 1
                elif not self.peek("]"):
                    self.error("expected ',' or ']' in feature block")
            self.pos += 1
        if not lhs and isinstance(feats.get(SEM), (Lam, App, Leaf, Var)):
            self.error("right-hand SEM must be a variable such as ?np")
        return Category(symbol, FeatureStructure.of(feats))


def _strip_comment(line: str) -> str:
    out, quote, depth = [], None, 0
    for c in line:
        if quote:
            if c == quote:
                quote = None
        elif c in "'\"" and depth == 0:
            quote = c
        elif c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
        elif c == "%" and depth == 0:
            break
        out.append(c)
    return "".join(out)


def parse_grammar_file(text: str) -> Grammar:
    start: Optional[str] = None
    pos_tags: list[tuple[str, str]] = []
    rules: list[ProductionRule] = []
    seen: set[ProductionRule] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("%start"):
            parts = stripped.split()
            if len(parts) != 2:
                raise GrammarError("expected '%start SYMBOL'", lineno)
            start = parts[1]
            continue
        if stripped.startswith("%pos"):
            parts = stripped.split()
            if len(parts) != 3 or parts[2] not in ("n", "v", "a", "r"):
                raise GrammarError("expected '%pos SYMBOL n|v|a|r'", lineno)
            pos_tags.append((parts[1], parts[2]))
            continue
        line = _strip_comment(raw)
        if not line.strip():
            continue
        rd = _LineReader(line, lineno)
        lhs = rd.category(lhs=True)
        if not rd.peek("->"):
            rd.error("expected '->'")
        rd.pos += 2
        alternatives: list[list] = [[]]
        while not rd.eof():
            rd.skip_ws()
            c = rd.text[rd.pos]
            if c in "'\"":
                alternatives[-1].append(rd.quoted())
            elif c == "|":
                rd.pos += 1
                alternatives.append([])
            else:
                alternatives[-1].append(rd.category(lhs=False))
        for alt in alternatives:
            if not alt:
                raise GrammarError("empty right-hand side", lineno)
            rule = ProductionRule(lhs, tuple(alt))
            if rule not in seen:
                seen.add(rule)
                rules.append(rule)
    if not rules:
        raise GrammarError("grammar has no rules, so no start symbol")
    if start is None:
        start = rules[0].lhs.symbol
    defined = {r.lhs.symbol for r in rules}
    if start not in defined:
        raise GrammarError(f"start symbol {start} has no rules")
    undefined = sorted(
        {x.symbol for r in rules for x in r.rhs if isinstance(x, Category)} - defined
    )
    for sym in undefined:
        log.warning("grammar references undefined symbol %s", sym)
    return Grammar(start, tuple(rules), tuple(pos_tags), tuple(undefined))


def print_grammar(g: Grammar) -> str:
    lines = [f"%start {g.start}"]
    lines += [f"%pos {sym} {tag}" for sym, tag in g.pos_tags]
    lines += [str(r) for r in g.rules]
    return "\n".join(lines) + "\n"


# -- feature unification ----------------------------------------------------

Bindings = Mapping[str, Union[str, FVar]]


def resolve(value: FeatureValue, bindings: Bindings) -> FeatureValue:
    seen = set()
    while isinstance(value, FVar) and value.name in bindings and value.name not in seen:
        seen.add(value.name)
        value = bindings[value.name]
    return value


def unify_features(
    a: FeatureStructure, b: FeatureStructure, bindings: Bindings | None = None
) -> Optional[dict[str, Union[str, FVar]]]:
    """Unify two flat feature structures under ``bindings``.

    Returns the extended bindings, or None on a clash.  SEM is never
    compared; features present on one side only are unconstrained.
    """
    out = dict(bindings or {})
    bdict = b.as_dict()
    for name, va in a.items:
        if name == SEM or name not in bdict:
            continue
        x = resolve(va, out)
        y = resolve(bdict[name], out)
        if isinstance(x, FVar):
            if x != y:
                out[x.name] = y
        elif isinstance(y, FVar):
            out[y.name] = x
        elif x != y:
            return None
    return out


def substitute_features(fs: FeatureStructure, bindings: Bindings) -> FeatureStructure:
    return FeatureStructure(
        tuple((k, v if k == SEM else resolve(v, bindings)) for k, v in fs.items)
    )


# -- lexicon extension ------------------------------------------------------


def _inflection(word: str, lemma: str) -> str:
    if word == lemma:
        return "base"
    if word.endswith("ing"):
        return "ing"
    if word.endswith("ed"):
        return "ed"
    if word.endswith("s"):
        return "s"
    return "other"


def rename_predicate(t: LambdaTerm, old: str, new: str) -> LambdaTerm:
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        return Lam(t.var, rename_predicate(t.body, old, new))
    if isinstance(t, App):
        return App(rename_predicate(t.fun, old, new), rename_predicate(t.arg, old, new))
    name = new if (t.op == "sym" and t.name == old and t.args) else t.name
    return Leaf(t.op, name, tuple(rename_predicate(a, old, new) for a in t.args))


def extend_lexicon(
    g: Grammar,
    synonyms: SynonymDb,
    tokens: Iterable[str],
    pos_hints: Mapping[str, set[str]] | None = None,
) -> tuple[Grammar, list[tuple[str, str]]]:
    """Add lexical entries for unseen tokens that have a synonym in the lexicon.

    The new word copies every lexical rule of its synonym, with the SEM head
    predicate renamed to the new word's lemma.  Returns the extended grammar
    and (new word, known word) pairs.
    """
    pos_hints = pos_hints or {}
    known: dict[str, list[str]] = {}  # pos -> lexicon words
    for word in sorted(g.lexicon):
        for tag in g.word_pos(word):
            known.setdefault(tag, []).append(word)
    new_rules: list[ProductionRule] = []
    pairs: list[tuple[str, str]] = []
    done: set[str] = set()
    for tok in tokens:
        word = tok.lower()
        if word in g.terminals or word in done or not word.isalpha():
            continue
        tags = [t for t in ("v", "n", "a", "r") if t in pos_hints.get(word, {"v", "n", "a", "r"})]
        for tag in tags:
            lemma = lemmatize(word, tag)
            syns = synonyms.synonyms(lemma, tag)
            if not syns:
                continue
            candidates = [w for w in known.get(tag, []) if lemmatize(w, tag) in syns]
            if not candidates:
                continue
            infl = _inflection(word, lemma)
            candidates.sort(key=lambda w: (_inflection(w, lemmatize(w, tag)) != infl, w))
            source = candidates[0]
            old = lemmatize(source, tag)
            for r in g.lexical_rules(source):
                if g.pos_of(r.lhs.symbol) != tag:
                    continue
                feats = r.lhs.features.as_dict()
                if SEM in feats:
                    feats[SEM] = rename_predicate(feats[SEM], old, lemma)
                new_rules.append(
                    ProductionRule(Category(r.lhs.symbol, FeatureStructure.of(feats)), (word,))
                )
            pairs.append((word, source))
            done.add(word)
            break
    if not new_rules:
        return g, pairs
    return g.with_rules(new_rules), pairs


def proper_noun_rules(names: Iterable[tuple[str, str]], symbol: str = "PropN") -> list[ProductionRule]:
    """Lexical rules ``PropN[NUM=sg, SEM=<\\P.P(const)>] -> 'Surface'``."""
    out = []
    for surface, const in names:
        sem = Lam("P", App(Var("P"), Leaf("sym", const)))
        feats = FeatureStructure.of({"NUM": "sg", "PERS": "3", SEM: sem})
        out.append(ProductionRule(Category(symbol, feats), (surface,)))
    return out
