"""Puzzle solving, question answering and the command line."""

from .background import comparatives_background, knights_knaves_background
from .dot import ProofCheckError, export_proof_dot
from .theory import (
    Answer,
    Diagnostic,
    NoPersonsError,
    PuzzleTheory,
    QuestionError,
    SolveReport,
    TaggedFormula,
    UnknownPredicateError,
    WhAnswer,
    answer_question,
    build_theory,
    enumerate_models,
    query_wh,
    question_goal,
    solve,
)
