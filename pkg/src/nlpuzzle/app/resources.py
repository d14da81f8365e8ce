"""Bundled data files and domain definitions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Union

from ..grammar import Grammar, parse_grammar_file
from ..nlp import SynonymDb, load_gazetteer
from .background import comparatives_background, knights_knaves_background

DATA = resources.files("nlpuzzle") / "data"


@dataclass(frozen=True)
class Domain:
    name: str
    grammar_file: str
    background: Callable
    roles: tuple[str, ...]


DOMAINS = {
    "knights-knaves": Domain(
        "knights-knaves", "knights-knaves.fcfg", knights_knaves_background, ("knight", "knave")
    ),
    "comparatives": Domain(
        "comparatives", "comparatives.fcfg", comparatives_background, ("tallest", "shortest")
    ),
}


def get_domain(name: str) -> Domain:
    try:
        return DOMAINS[name]
    except KeyError:
        raise ValueError(f"unknown domain {name!r}; choose from {', '.join(DOMAINS)}") from None


def data_path(*parts: str) -> Path:
    return Path(str(DATA.joinpath(*parts)))


@lru_cache(maxsize=16)
def _grammar_from(path: str) -> Grammar:
    return parse_grammar_file(Path(path).read_text(encoding="utf-8"))


def load_grammar(source: Union[str, Path, None] = None, domain: str = "knights-knaves") -> Grammar:
    """A grammar file path, or the bundled grammar of ``domain``."""
    if source is None:
        source = data_path("grammars", get_domain(domain).grammar_file)
    return _grammar_from(str(Path(source).resolve()))


def load_synonyms(path: Union[str, Path, None] = None) -> SynonymDb:
    return SynonymDb.load(path or data_path("synonyms.txt"))


def load_names(path: Union[str, Path, None] = None) -> list[str]:
    return load_gazetteer(path or data_path("gazetteer.txt"))


def corpus_dir() -> Path:
    return data_path("corpus")


def grammar_id(source: Optional[Union[str, Path]], domain: str) -> str:
    return Path(source).name if source else get_domain(domain).grammar_file
