"""Lemmatization and the synonym database."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

POS_TAGS = ("n", "v", "a", "r")

_VERB_EXCEPTIONS = {
    "is": "be", "are": "be", "am": "be", "was": "be", "were": "be", "been": "be",
    "has": "have", "had": "have", "does": "do", "did": "do", "done": "do",
    "says": "say", "said": "say", "claims": "claim", "tells": "tell", "told": "tell",
    "lies": "lie", "lied": "lie", "lying": "lie", "knows": "know", "knew": "know",
    "goes": "go", "went": "go", "states": "state", "stated": "state",
    "declares": "declare", "declared": "declare", "mentions": "mention",
    "asserts": "assert", "insists": "insist", "swears": "swear", "swore": "swear",
    "would": "would", "could": "could", "meet": "meet", "met": "meet",
}
_NOUN_EXCEPTIONS = {
    "people": "person", "men": "man", "women": "woman", "children": "child",
    "persons": "person", "ones": "one",
}
_ADJ_EXCEPTIONS = {"better": "good", "best": "good", "worse": "bad", "worst": "bad"}


def _strip_plural(w: str) -> str:
    if len(w) > 3 and w.endswith("ies"):
        return w[:-3] + "y"
    for suffix in ("sses", "shes", "ches", "xes", "zes"):
        if w.endswith(suffix):
            return w[:-2]
    if len(w) > 3 and w.endswith("s") and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    return w


def _strip_verb(w: str) -> str:
    if len(w) > 4 and w.endswith("ing"):
        return w[:-3]
    if len(w) > 4 and w.endswith("ed") and not w.endswith("eed"):
        stem = w[:-2]
        if w.endswith("ied"):
            return w[:-3] + "y"
        return stem
    if w.endswith("oes") and len(w) > 4:
        return w[:-2]
    return _strip_plural(w)


def _strip_adj(w: str) -> str:
    for suffix in ("est", "er"):
        if len(w) > len(suffix) + 2 and w.endswith(suffix):
            stem = w[: -len(suffix)]
            if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
                stem = stem[:-1]
            return stem
    return w


def lemmatize(word: str, pos: str = "v") -> str:
    """Rule-based lemma with an exception table; falls back to the word itself."""
    w = word.lower()
    table, strip = {
        "v": (_VERB_EXCEPTIONS, _strip_verb),
        "n": (_NOUN_EXCEPTIONS, _strip_plural),
        "a": (_ADJ_EXCEPTIONS, _strip_adj),
    }.get(pos, ({}, lambda x: x))
    # iterate to a fixpoint so the function is idempotent
    for _ in range(8):
        nxt = table.get(w)
        if nxt is None:
            nxt = strip(w)
        if nxt == w or not nxt:
            break
        w = nxt
    return w


@dataclass
class SynonymDb:
    """Synonym sets keyed by (lemma, pos); kept symmetric."""

    entries: dict[tuple[str, str], set[str]] = field(default_factory=dict)

    def add(self, lemma: str, pos: str, synonyms) -> None:
        lemma = lemma.lower()
        for s in synonyms:
            s = s.lower()
            if s == lemma:
                continue
            self.entries.setdefault((lemma, pos), set()).add(s)
            self.entries.setdefault((s, pos), set()).add(lemma)

    def synonyms(self, lemma: str, pos: str) -> set[str]:
        return set(self.entries.get((lemma.lower(), pos), ()))

    def linked(self, a: str, b: str, pos: str) -> bool:
        return b.lower() in self.entries.get((a.lower(), pos), ())

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def parse(cls, text: str) -> SynonymDb:
        """Read ``lemma  pos  syn1,syn2,...`` lines; ``#`` or ``%`` start comments."""
        db = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].split("%", 1)[0].strip()
            if not line:
                continue
            parts = line.split(None, 2)
            if len(parts) != 3 or parts[1] not in POS_TAGS:
                raise ValueError(f"synonym file line {lineno}: expected 'lemma pos syn1,syn2'")
            lemma, pos, rest = parts
            db.add(lemma, pos, [s.strip() for s in rest.split(",") if s.strip()])
        return db

    @classmethod
    def load(cls, path) -> SynonymDb:
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def dump(self) -> str:
        lines = []
        for (lemma, pos), syns in sorted(self.entries.items()):
            lines.append(f"{lemma}\t{pos}\t{','.join(sorted(syns))}")
        return "\n".join(lines) + "\n"
