"""Text preprocessing: sentences, tokens, person names and pronoun rewriting."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .lexical import SynonymDb, lemmatize

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:'[A-Za-z]+)*|[^\sA-Za-z0-9]")
_TERMINATORS = {".", "?", "!"}
_QUOTES = {'"', "“", "”", "''"}
_ABBREVIATIONS = {"mr", "mrs", "ms", "dr", "st", "prof", "sr", "jr"}
PUNCTUATION = set(".,;:!?\"'()“”-")

# capitalized words that never name a person
FUNCTION_WORDS = frozenset(
    """
    a an the and or but if then either neither nor not no yes is are am was were be
    on in of at by to for from with where while when who what which whom whose how
    i you we he she they it me us him her them my your our his its their this that
    these those each every all both some any one two three four five six seven eight
    nine ten first second third can could would should will shall do does did
    knight knights knave knaves island inhabitant inhabitants people exactly only
    at least here there so also just
    """.split()
)

SUBJECT_PRONOUNS = {"he", "she"}
OBJECT_PRONOUNS = {"him", "her"}
SINGULAR_PRONOUNS = SUBJECT_PRONOUNS | OBJECT_PRONOUNS
FIRST_PERSON = {"i", "me"}
PLURAL_PRONOUNS = {"we", "us", "they", "them"}
ORDINALS = ("first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth")
COUNT_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
GROUP_NOUNS = {"people", "inhabitants", "natives", "persons"}
ANONYMOUS_NAMES = tuple("ABCDEFGHI")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int

    @property
    def lower(self) -> str:
        return self.text.lower()

    @property
    def is_word(self) -> bool:
        return self.text[0].isalnum()


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    start: int
    end: int
    warnings: tuple[str, ...] = ()

    @property
    def words(self) -> list[str]:
        return [t.text for t in self.tokens]

    @property
    def text(self) -> str:
        return detokenize(self.words)

    @property
    def is_question(self) -> bool:
        return bool(self.tokens) and self.tokens[-1].text == "?"

    def word_tokens(self) -> list[str]:
        """Tokens with punctuation removed (what the grammar sees)."""
        return [t.text for t in self.tokens if t.is_word]


@dataclass(frozen=True)
class Document:
    raw: str
    sentences: tuple[Sentence, ...] = ()

    def __len__(self) -> int:
        return len(self.sentences)

    def tokens(self) -> Iterable[Token]:
        for s in self.sentences:
            yield from s.tokens

    @property
    def warnings(self) -> list[tuple[int, str]]:
        return [(i, w) for i, s in enumerate(self.sentences) for w in s.warnings]


@dataclass(frozen=True)
class EntitySet:
    persons: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.persons)

    def __contains__(self, name: str) -> bool:
        return self.canonical(name) is not None

    def canonical(self, surface: str) -> Optional[str]:
        """The person a token names; case-sensitive for names that are also
        function words (the letter "A" versus the article "a")."""
        for p in self.persons:
            if p == surface:
                return p
            if p.lower() == surface.lower() and p.lower() not in FUNCTION_WORDS and surface[0].isupper():
                return p
        return None

    @property
    def constants(self) -> list[str]:
        return [constant_name(p) for p in self.persons]


def constant_name(person: str) -> str:
    return re.sub(r"\W", "_", person.lower())


def detokenize(words: Sequence[str]) -> str:
    out = ""
    for w in words:
        if out and not (w in ".,;:!?" or out.endswith(("“",))):
            out += " "
        out += w
    return out


# -- splitting ----------------------------------------------------------------


def split_and_tokenize(text: str) -> Document:
    """Split on sentence terminators outside quotes and abbreviations."""
    toks = [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
    sentences: list[Sentence] = []
    current: list[Token] = []
    in_quote = False

    def flush():
        if current:
            sentences.append(Sentence(tuple(current), current[0].start, current[-1].end))
            current.clear()

    for i, tok in enumerate(toks):
        current.append(tok)
        if tok.text in _QUOTES:
            if tok.text == "“":
                in_quote = True
            elif tok.text == "”":
                in_quote = False
            else:
                in_quote = not in_quote
            # a quotation closing right after a terminator ends the sentence
            if not in_quote and len(current) > 1 and current[-2].text in _TERMINATORS:
                nxt = toks[i + 1] if i + 1 < len(toks) else None
                if nxt is None or nxt.text not in _TERMINATORS:
                    flush()
            continue
        if tok.text in _TERMINATORS and not in_quote:
            prev = current[-2].lower if len(current) > 1 else ""
            if tok.text == "." and prev in _ABBREVIATIONS:
                continue
            flush()
    flush()
    return Document(text, tuple(sentences))


# -- anonymous inhabitants -------------------------------------------------------


def name_anonymous(doc: Document, known: Iterable[str] = ()) -> tuple[Document, list[str]]:
    """Give letters to unnamed inhabitants ("two people", "the first one").

    When an introduction mentions a count of people without listing names,
    the introduction gets ": A and B" appended and ordinal references such
    as "the second one" become the matching letter.
    """
    known = {k.lower() for k in known}
    count = 0
    intro = None
    for si, s in enumerate(doc.sentences):
        low = [t.lower for t in s.tokens]
        for i in range(len(low) - 1):
            if low[i] in COUNT_WORDS and low[i + 1] in GROUP_NOUNS and COUNT_WORDS[low[i]] > 1:
                rest = [t for t in s.tokens[i + 2 :] if t.is_word]
                if not any(t.text[0].isupper() and t.lower not in FUNCTION_WORDS for t in rest):
                    count, intro = COUNT_WORDS[low[i]], si
                break
        if intro is not None:
            break
    if intro is None:
        return doc, []
    names = [n for n in ANONYMOUS_NAMES if n.lower() not in known][:count]
    sentences = list(doc.sentences)
    s = sentences[intro]
    toks = list(s.tokens)
    pos = toks[-1].start if toks and not toks[-1].is_word else s.end
    extra = [Token(":", pos, pos)]
    for j, n in enumerate(names):
        if j == len(names) - 1 and j > 0:
            extra.append(Token("and", pos, pos))
        elif j > 0:
            extra.append(Token(",", pos, pos))
        extra.append(Token(n, pos, pos))
    if toks and not toks[-1].is_word:
        toks = toks[:-1] + extra + [toks[-1]]
    else:
        toks = toks + extra
    sentences[intro] = replace(s, tokens=tuple(toks))
    for si in range(len(sentences)):
        sentences[si] = _replace_ordinals(sentences[si], names)
    return Document(doc.raw, tuple(sentences)), names


def _replace_ordinals(s: Sentence, names: list[str]) -> Sentence:
    toks = list(s.tokens)
    out: list[Token] = []
    i = 0
    while i < len(toks):
        low = [t.lower for t in toks[i : i + 3]]
        if len(low) == 3 and low[0] == "the" and low[1] in ORDINALS and low[2] in (
            "one", "inhabitant", "person", "native", "speaker",
        ):
            k = ORDINALS.index(low[1])
            if k < len(names):
                out.append(Token(names[k], toks[i].start, toks[i + 2].end))
                i += 3
                continue
        out.append(toks[i])
        i += 1
    return replace(s, tokens=tuple(out))


# -- named entities ----------------------------------------------------------------


def load_gazetteer(path) -> list[str]:
    from pathlib import Path

    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            names.append(line)
    return names


def _sentence_initial(s: Sentence) -> set[int]:
    """Indices of tokens that start a sentence or a quotation."""
    out = set()
    expect = True
    for i, t in enumerate(s.tokens):
        if not t.is_word:
            if t.text in _QUOTES:
                expect = True
            continue
        if expect:
            out.add(i)
        expect = False
    return out


def recognize_persons(
    doc: Document, gazetteer: Iterable[str] = (), known: Iterable[str] = ()
) -> EntitySet:
    """Person names in first-mention order.

    A word names a person when some occurrence of it is capitalized, not at
    the start of a sentence or quotation, and not a function word; or when
    it is a capitalized gazetteer entry.  Coordinated lists split naturally
    since every token is judged on its own.  ``known`` names (such as the
    letters given to anonymous inhabitants) are always included.
    """
    gaz = {g.lower() for g in gazetteer}
    names: set[str] = {k for k in known}
    for s in doc.sentences:
        initial = _sentence_initial(s)
        for i, t in enumerate(s.tokens):
            if not t.is_word or not t.text[0].isupper():
                continue
            low = t.lower
            if low in FUNCTION_WORDS:
                continue
            if low in gaz or i not in initial:
                names.add(t.text)
    entities = EntitySet(tuple(sorted(names)))
    ordered: dict[str, None] = {}
    for t in doc.tokens():
        name = entities.canonical(t.text) if t.is_word else None
        if name is not None:
            ordered.setdefault(name, None)
    return EntitySet(tuple(ordered))


# -- coreference -----------------------------------------------------------------------


def _quote_spans(s: Sentence) -> list[tuple[int, int]]:
    spans, open_at = [], None
    for i, t in enumerate(s.tokens):
        if t.text in _QUOTES:
            if open_at is None and t.text != "”":
                open_at = i
            else:
                spans.append((open_at, i))
                open_at = None
    if open_at is not None:
        spans.append((open_at, len(s.tokens)))
    return spans


def resolve_coreference(doc: Document, entities: EntitySet) -> Document:
    """Replace personal pronouns with the names they refer to.

    A pronoun with a person mentioned earlier in its sentence refers to the
    first person of that sentence (the speaker of reported speech); one
    opening its sentence refers to the nearest person mentioned before it.
    Inside a quotation "I"/"me" denote the speaker and "we"/"us" the
    speaker together with everyone else.  "You" addresses the reader and is
    left alone.  Pronouns that cannot be bound stay and get a warning.
    """
    last_person: Optional[str] = None
    out: list[Sentence] = []
    for s in doc.sentences:
        toks = list(s.tokens)
        warnings = list(s.warnings)
        quotes = _quote_spans(s)
        first_in_sentence: Optional[str] = None
        for i, t in enumerate(toks):
            low = t.lower
            name = entities.canonical(t.text) if t.is_word else None
            if name is not None:
                first_in_sentence = first_in_sentence or name
                last_person = name
                continue
            in_quote = any(a < i < b for a, b in quotes)
            speaker = first_in_sentence
            if low in SINGULAR_PRONOUNS:
                target = first_in_sentence if first_in_sentence else last_person
                if target is None:
                    warnings.append(f"unresolved pronoun {t.text!r}")
                    continue
                toks[i] = Token(target, t.start, t.end)
                first_in_sentence = first_in_sentence or target
                last_person = target
            elif low in FIRST_PERSON and in_quote:
                if speaker is None:
                    warnings.append(f"unresolved pronoun {t.text!r}")
                    continue
                toks[i] = Token(speaker, t.start, t.end)
            elif low in ("we", "us") and in_quote and speaker is not None and len(entities) > 1:
                group = [speaker] + [p for p in entities.persons if p != speaker]
                toks[i] = Token(_join_names(group), t.start, t.end)
            elif low in PLURAL_PRONOUNS:
                warnings.append(f"unresolved plural pronoun {t.text!r}")
        out.append(replace(s, tokens=tuple(_expand(toks)), warnings=tuple(warnings)))
    return Document(doc.raw, tuple(out))


def _join_names(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    return " , ".join(names[:-1]) + " and " + names[-1]


def _expand(toks: list[Token]) -> list[Token]:
    # a replaced "we" carries a name list; split it back into tokens
    out = []
    for t in toks:
        if " " in t.text:
            out.extend(Token(w, t.start, t.end) for w in t.text.split())
        else:
            out.append(t)
    return out


# -- parts of speech and synonyms ------------------------------------------------------

_DETERMINERS = {"a", "an", "the", "each", "every", "this", "that", "my", "your", "his", "her"}


def guess_pos(words: Sequence[str], i: int, persons: EntitySet | None = None) -> str:
    """Part of speech of ``words[i]`` from its left neighbour."""
    w = words[i].lower()
    prev = words[i - 1].lower() if i > 0 else ""
    if prev in _DETERMINERS:
        return "n"
    if w.endswith("ly") and len(w) > 4:
        return "r"
    if persons is not None and i > 0 and words[i - 1] in persons:
        return "v"
    if prev in ("he", "she", "it", "they", "we", "i", "you", "to", "who", "always", "never"):
        return "v"
    return "v" if w.endswith("s") else "n"


def pos_hints(doc: Document, persons: EntitySet | None = None) -> dict[str, set[str]]:
    hints: dict[str, set[str]] = {}
    for s in doc.sentences:
        words = s.word_tokens()
        for i, w in enumerate(words):
            hints.setdefault(w.lower(), set()).add(guess_pos(words, i, persons))
    return hints


def detect_synonym_pairs(
    doc: Document,
    g,
    db: SynonymDb,
    persons: EntitySet | None = None,
) -> list[tuple[str, str]]:
    """Lemma pairs with the same part of speech that are linked in ``db``.

    Both lemmas occur in the document, or one occurs and the other is a word
    of the grammar's lexicon.  The part of speech of a word comes from the
    grammar when the word is in the lexicon and from its context otherwise.
    """
    doc_lemmas: set[tuple[str, str]] = set()
    for s in doc.sentences:
        words = s.word_tokens()
        for i, w in enumerate(words):
            low = w.lower()
            if persons is not None and w in persons:
                continue
            tags = g.word_pos(low) if low in g.lexicon else {guess_pos(words, i, persons)}
            for tag in tags:
                doc_lemmas.add((lemmatize(low, tag), tag))
    lex_lemmas: set[tuple[str, str]] = set()
    for word in g.lexicon:
        for tag in g.word_pos(word):
            lex_lemmas.add((lemmatize(word, tag), tag))
    pairs: set[tuple[str, str]] = set()
    for lemma, tag in doc_lemmas:
        for other in db.synonyms(lemma, tag):
            if (other, tag) in doc_lemmas or (other, tag) in lex_lemmas:
                if (lemma, tag) in lex_lemmas and (other, tag) not in doc_lemmas:
                    continue  # both only known from the lexicon side
                pairs.add(tuple(sorted((lemma, other))))
    return sorted(pairs)
