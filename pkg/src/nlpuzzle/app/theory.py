"""From puzzle text to a first-order theory, and reasoning over it."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from ..chart import ParseTree, UnknownWordError, first_formula, parse
from ..fol.clauses import Clause, clausify_all
from ..fol.syntax import Atom, Constant, ForAll, Formula, Iff, Not, Variable, predicates
from ..grammar import Grammar, extend_lexicon, proper_noun_rules
from ..inference import (
    PROVED,
    Interpretation,
    Proof,
    ProofResult,
    UnsupportedTheory,
    consensus_cells,
    evaluate,
    find_models,
    prove,
)
from ..lam import App, IncompleteSemantics, Leaf, beta_reduce, to_formula
from ..nlp import (
    Document,
    EntitySet,
    SynonymDb,
    constant_name,
    detect_synonym_pairs,
    name_anonymous,
    pos_hints,
    recognize_persons,
    resolve_coreference,
    split_and_tokenize,
)
from ..nlp.pipeline import _replace_ordinals
from .background import speech_atoms_of
from .resources import get_domain, grammar_id, load_grammar, load_names, load_synonyms

# failure stages, following the three ways a puzzle can be lost
NER = "ner"
COREF = "coref"
GRAMMAR = "grammar"
SOLVER = "solver"

BACKGROUND = "background"
TEXT = "text"
SYNONYMY = "synonymy"
DISTINCTNESS = "distinctness"
BRIDGE = "bridge"

QUESTION_FORMS = (
    "Is <name> a <noun>?",
    "Is <name> not a <noun>?",
    "Is <name> a <noun> and/or <name> a <noun>?",
    "Does <name> <verb>?",
    "Are <name> and <name> <nouns>?",
    "Are <name> and <name> both <nouns>?",
    "Are <name> and <name> the same / different?",
)


class NoPersonsError(ValueError):
    """The text names nobody, so the domain size cannot be fixed."""


class QuestionError(ValueError):
    pass


class UnknownPredicateError(ValueError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    stage: str
    message: str
    sentence: Optional[int] = None

    def __str__(self) -> str:
        where = f"sentence {self.sentence + 1}: " if self.sentence is not None else ""
        return f"[{self.stage}] {where}{self.message}"

    def as_dict(self) -> dict:
        return {"stage": self.stage, "sentence": self.sentence, "message": self.message}


@dataclass(frozen=True)
class TaggedFormula:
    tag: str
    formula: Formula
    sentence: Optional[int] = None

    def __str__(self) -> str:
        label = f"{self.tag}({self.sentence + 1})" if self.sentence is not None else self.tag
        return f"{self.formula}.  % {label}"


@dataclass(frozen=True)
class SentenceParse:
    index: int
    text: str
    tree: Optional[ParseTree]
    formula: Optional[Formula]
    parse_count: int = 0


@dataclass(frozen=True)
class PuzzleTheory:
    persons: EntitySet
    domain_size: int
    axioms: tuple[TaggedFormula, ...]
    grammar_id: str
    source: str
    domain: str = "knights-knaves"
    anonymous: tuple[str, ...] = ()
    synonym_pairs: tuple[tuple[str, str], ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()
    parses: tuple[SentenceParse, ...] = field(default=(), repr=False)
    grammar: Optional[Grammar] = field(default=None, repr=False, compare=False)
    synonyms: Optional[SynonymDb] = field(default=None, repr=False, compare=False)

    @property
    def formulas(self) -> list[Formula]:
        return [a.formula for a in self.axioms]

    def tagged(self, tag: str) -> list[TaggedFormula]:
        return [a for a in self.axioms if a.tag == tag]

    @property
    def constants(self) -> list[str]:
        return self.persons.constants

    @property
    def constant_map(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.constants)}

    def person_of(self, constant: str) -> str:
        return dict(zip(self.constants, self.persons.persons))[constant]

    @cached_property
    def clauses(self) -> list[Clause]:
        return clausify_all(self.formulas)

    @cached_property
    def signature(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for f in self.formulas:
            out.update(predicates(f))
        return out

    def render(self) -> str:
        return "\n".join(str(a) for a in self.axioms)


def _arity_of(pred: str, text_axioms: Sequence[Formula]) -> int:
    for f in text_axioms:
        arity = predicates(f).get(pred)
        if arity is not None:
            return arity
    return 1


def synonymy_axiom(a: str, b: str, arity: int = 1) -> Formula:
    names = [f"x{i}" if arity > 1 else "x" for i in range(1, arity + 1)]
    args = tuple(Variable(n) for n in names)
    body: Formula = Iff(Atom(a, args), Atom(b, args))
    for n in reversed(names):
        body = ForAll(n, body)
    return body


def build_theory(
    text: str,
    grammar: Union[Grammar, str, Path, None] = None,
    synonyms: Union[SynonymDb, str, Path, None] = None,
    gazetteer: Union[Iterable[str], str, Path, None] = None,
    domain: str = "knights-knaves",
) -> PuzzleTheory:
    """Translate puzzle text into a tagged theory plus diagnostics.

    Sentences that fail to parse are recorded and skipped; questions in the
    text are not part of the theory.  Raises NoPersonsError when nobody is
    named, since the domain size comes from the persons.
    """
    dom = get_domain(domain)
    if isinstance(grammar, Grammar):
        gid = "custom"
    else:
        gid = grammar_id(grammar, domain)
        grammar = load_grammar(grammar, domain)
    db = synonyms if isinstance(synonyms, SynonymDb) else load_synonyms(synonyms)
    names = load_names(gazetteer) if gazetteer is None or isinstance(gazetteer, (str, Path)) else list(gazetteer)

    doc = split_and_tokenize(text)
    doc, anonymous = name_anonymous(doc)
    persons = recognize_persons(doc, names, known=anonymous)
    if not len(persons):
        raise NoPersonsError("no persons recognized: cannot fix the domain size")
    doc = resolve_coreference(doc, persons)
    diagnostics: list[Diagnostic] = [Diagnostic(COREF, w, i) for i, w in doc.warnings]

    base = grammar.with_rules(
        proper_noun_rules([(p, c) for p, c in zip(persons.persons, persons.constants)])
    )
    words = [t.text for t in doc.tokens() if t.is_word]
    extended, _ = extend_lexicon(base, db, words, pos_hints(doc, persons))

    text_axioms: list[TaggedFormula] = []
    parses: list[SentenceParse] = []
    for i, s in enumerate(doc.sentences):
        if s.is_question:
            continue
        tokens = s.word_tokens()
        if not tokens:
            continue
        try:
            trees = parse(tokens, extended)
        except UnknownWordError as e:
            diagnostics.append(Diagnostic(GRAMMAR, str(e), i))
            parses.append(SentenceParse(i, s.text, None, None))
            continue
        tree, formula = first_formula(trees)
        parses.append(SentenceParse(i, s.text, tree, formula, len(trees)))
        if not trees:
            diagnostics.append(Diagnostic(GRAMMAR, f"no parse for {s.text!r}", i))
        elif formula is None:
            diagnostics.append(Diagnostic(GRAMMAR, f"incomplete semantics for {s.text!r}", i))
        else:
            text_axioms.append(TaggedFormula(TEXT, formula, i))

    text_formulas = [a.formula for a in text_axioms]
    used = {p for f in text_formulas for p in predicates(f)}
    pairs = [
        (a, b)
        for a, b in detect_synonym_pairs(doc, grammar, db, persons)
        if a in used and b in used
    ]
    syn_axioms = [
        TaggedFormula(SYNONYMY, synonymy_axiom(a, b, _arity_of(a, text_formulas))) for a, b in pairs
    ]
    background = [
        TaggedFormula(tag, f)
        for tag, f in dom.background(
            persons.constants, speech_atoms=speech_atoms_of(text_formulas, persons.constants)
        )
    ]
    return PuzzleTheory(
        persons=persons,
        domain_size=len(persons),
        axioms=tuple(text_axioms + syn_axioms + background),
        grammar_id=gid,
        source=text,
        domain=domain,
        anonymous=tuple(anonymous),
        synonym_pairs=tuple(pairs),
        diagnostics=tuple(diagnostics),
        parses=tuple(parses),
        grammar=extended,
        synonyms=db,
    )


# -- solving -------------------------------------------------------------------

SOLVED = "solved"
AMBIGUOUS = "ambiguous"
UNSATISFIABLE = "unsatisfiable"
FAILED = "failed"


@dataclass(frozen=True)
class SolveReport:
    verdict: str
    assignment: Union[dict, str, None]
    model_count: int
    diagnostics: tuple[Diagnostic, ...] = ()
    timings: dict = field(default_factory=dict, compare=False)
    models: tuple[Interpretation, ...] = field(default=(), repr=False, compare=False)

    def summary(self) -> str:
        if isinstance(self.assignment, dict):
            return ", ".join(f"{p}: {r}" for p, r in self.assignment.items())
        return self.verdict

    def render(self) -> str:
        lines = [self.summary(), f"models: {self.model_count}"]
        lines += [str(d) for d in self.diagnostics]
        return "\n".join(lines)

    def as_dict(self, timings: bool = True) -> dict:
        out = {
            "verdict": self.verdict,
            "assignment": self.assignment,
            "model_count": self.model_count,
            "diagnostics": [d.as_dict() for d in self.diagnostics],
        }
        if timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


def enumerate_models(theory: PuzzleTheory, limit: int = 10000) -> list[Interpretation]:
    preds = dict(theory.signature)
    for r in get_domain(theory.domain).roles:
        preds.setdefault(r, 1)
    return find_models(theory.clauses, theory.domain_size, limit, theory.constant_map, preds)


def solve(theory: PuzzleTheory, max_models: int = 10000) -> SolveReport:
    """Enumerate the models and report what they agree on."""
    t0 = time.perf_counter()
    diags = list(theory.diagnostics)
    roles = get_domain(theory.domain).roles
    try:
        models = enumerate_models(theory, max_models)
    except UnsupportedTheory as e:
        diags.append(Diagnostic(SOLVER, str(e)))
        return SolveReport(FAILED, None, 0, tuple(diags), {"models": time.perf_counter() - t0})
    timings = {"models": time.perf_counter() - t0}
    if not models:
        diags.append(Diagnostic(SOLVER, "the theory has no model"))
        return SolveReport(UNSATISFIABLE, None, 0, tuple(diags), timings)
    if len(models) >= max_models:
        diags.append(Diagnostic(SOLVER, f"model limit {max_models} reached"))
    cells = consensus_cells(models, roles, theory.constants)
    if cells.ambiguous:
        open_ = [theory.person_of(c) for c, row in cells.cells if any(v is None for _, v in row)]
        diags.append(Diagnostic(SOLVER, "undetermined: " + ", ".join(open_)))
        return SolveReport(AMBIGUOUS, AMBIGUOUS, len(models), tuple(diags), timings, tuple(models))
    assignment = {}
    for c, row in cells.cells:
        true = [r for r, v in row if v]
        assignment[theory.person_of(c)] = " ".join(true) if true else "none"
    return SolveReport(SOLVED, assignment, len(models), tuple(diags), timings, tuple(models))


# -- questions -------------------------------------------------------------------

YES, NO, UNKNOWN = "Yes", "No", "Unknown"


@dataclass(frozen=True)
class Answer:
    verdict: str
    question: str
    goal: Formula
    proof: Optional[Proof] = None
    diagnostics: tuple[str, ...] = ()
    attempts: tuple[ProofResult, ...] = field(default=(), repr=False, compare=False)

    def render(self, show_proof: bool = False) -> str:
        lines = [self.verdict]
        if show_proof and self.proof is not None:
            lines.append(self.proof.render())
        lines += list(self.diagnostics)
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "question": self.question,
            "goal": str(self.goal),
            "proof": self.proof.render().splitlines() if self.proof else None,
            "diagnostics": list(self.diagnostics),
            "timings": {f"attempt{i + 1}": round(r.seconds, 6) for i, r in enumerate(self.attempts)},
        }


def _question_tokens(theory: PuzzleTheory, question: str) -> list[str]:
    doc = split_and_tokenize(question)
    if not doc.sentences:
        raise QuestionError("empty question")
    if theory.anonymous:
        doc = Document(doc.raw, tuple(_replace_ordinals(s, list(theory.anonymous)) for s in doc.sentences))
    doc = resolve_coreference(doc, theory.persons)
    return [w for s in doc.sentences for w in s.word_tokens()]


def _parse_question(theory: PuzzleTheory, question: str, start: str):
    tokens = _question_tokens(theory, question)
    g = theory.grammar or load_grammar(None, theory.domain)
    if theory.synonyms is not None:
        g, _ = extend_lexicon(g, theory.synonyms, tokens)
    forms = "accepted forms: " + "; ".join(QUESTION_FORMS)
    try:
        trees = parse(tokens, g, start=start)
    except UnknownWordError as e:
        raise QuestionError(f"{e}; {forms}") from None
    return trees, forms


def question_goal(theory: PuzzleTheory, question: str) -> Formula:
    """The closed formula a Yes/No question asks about."""
    trees, forms = _parse_question(theory, question, "Q")
    _, goal = first_formula(trees)
    if goal is None:
        raise QuestionError(f"cannot parse question {question!r}; {forms}")
    return goal


def decide(
    axioms: Sequence[Formula], goal: Formula, max_seconds: float = 10.0, max_clauses: int = 20000
) -> tuple[str, Optional[Proof], list[ProofResult]]:
    """Yes if the goal is provable, No if its negation is, else Unknown."""
    attempts = []
    for verdict, g in ((YES, goal), (NO, Not(goal))):
        r = prove(axioms, g, max_clauses=max_clauses, max_seconds=max_seconds)
        attempts.append(r)
        if r.status == PROVED:
            return verdict, r.proof, attempts
    return UNKNOWN, None, attempts


def answer_question(theory: PuzzleTheory, question: str, max_seconds: float = 10.0) -> Answer:
    goal = question_goal(theory, question)
    verdict, proof, attempts = decide(theory.formulas, goal, max_seconds)
    diags: tuple[str, ...] = ()
    if verdict == UNKNOWN:
        diags = tuple(
            f"{label}: {r.status} after {r.given} given clauses ({r.kept} kept)"
            for label, r in zip(("goal", "negated goal"), attempts)
        )
    return Answer(verdict, question, goal, proof, diags, tuple(attempts))


@dataclass(frozen=True)
class WhAnswer:
    persons: tuple[str, ...]
    diagnostics: tuple[str, ...] = ()

    @property
    def ambiguous(self) -> bool:
        return AMBIGUOUS in self.diagnostics


def _property_of(theory: PuzzleTheory, query: str):
    """A one-place property as a lambda term, from a predicate or a wh-question."""
    if query.replace("_", "").isalnum():
        if query not in theory.signature:
            raise UnknownPredicateError(f"unknown predicate {query!r}")
        return None, query
    trees, _ = _parse_question(theory, query, "WHQ")
    for t in trees:
        if t.sem is not None:
            return t.sem, None
    raise QuestionError(f"cannot parse wh-question {query!r}")


def query_wh(theory: PuzzleTheory, query: str, max_models: int = 10000) -> WhAnswer:
    """Persons who have the property in every model (certain answers)."""
    term, pred = _property_of(theory, query)
    formulas: dict[str, Formula] = {}
    for c in theory.constants:
        if pred is not None:
            formulas[c] = Atom(pred, (Constant(c),))
        else:
            try:
                formulas[c] = to_formula(beta_reduce(App(term, Leaf("sym", c))))
            except IncompleteSemantics as e:
                raise QuestionError(f"wh-question does not denote a property: {e}") from None
            unknown = set(predicates(formulas[c])) - set(theory.signature)
            if unknown:
                raise UnknownPredicateError(f"unknown predicate {sorted(unknown)[0]!r}")
    models = enumerate_models(theory, max_models)
    if not models:
        return WhAnswer((), ("no model",))
    certain = []
    for c, f in formulas.items():
        values = {evaluate(f, m) for m in models}
        if len(values) > 1:
            return WhAnswer((), (AMBIGUOUS,))
        if values == {True}:
            certain.append(theory.person_of(c))
    return WhAnswer(tuple(certain))
