"""Text preprocessing: tokens, persons, coreference, lemmas and synonyms."""

from .lexical import POS_TAGS, SynonymDb, lemmatize
from .pipeline import (
    Document,
    EntitySet,
    Sentence,
    Token,
    constant_name,
    detect_synonym_pairs,
    guess_pos,
    load_gazetteer,
    name_anonymous,
    pos_hints,
    recognize_persons,
    resolve_coreference,
    split_and_tokenize,
)
