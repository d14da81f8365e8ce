import dataclasses

import pydot
import pytest

from nlpuzzle.app import (
    NoPersonsError,
    ProofCheckError,
    QuestionError,
    UnknownPredicateError,
    answer_question,
    build_theory,
    comparatives_background,
    export_proof_dot,
    knights_knaves_background,
    query_wh,
    question_goal,
    solve,
)
from nlpuzzle.app.resources import corpus_dir, data_path
from nlpuzzle.fol import clausify, parse_formula
from nlpuzzle.inference import check_proof, prove

P = parse_formula


def puzzle(name):
    return build_theory((corpus_dir() / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def marge():
    return puzzle("marge-homer.txt")


@pytest.fixture(scope="module")
def sue():
    return puzzle("sue-alice.txt")


@pytest.fixture(scope="module")
def anon():
    return puzzle("both-knaves.txt")


@pytest.fixture(scope="module")
def taller():
    text = data_path("comparatives", "taller.txt").read_text(encoding="utf-8")
    return build_theory(text, domain="comparatives")


# -- background --------------------------------------------------------------------


def test_two_persons_are_distinct():
    tagged = knights_knaves_background(["a", "b"])
    assert ("distinctness", P("a != b.")) in tagged


def test_single_person_has_no_distinctness():
    assert not [f for tag, f in knights_knaves_background(["a"]) if tag == "distinctness"]


def test_same_is_defined_by_types():
    same = P("all x all y (same(x,y) <-> knight(x) & knight(y) | knave(x) & knave(y)).")
    assert ("background", same) in knights_knaves_background(["a", "b"])


def test_speech_bridges():
    tagged = knights_knaves_background(["a"], speech_atoms=[("say", "a")])
    bridges = [f for tag, f in tagged if tag == "bridge"]
    assert bridges == [P("knight(a) -> say(a)."), P("knave(a) -> -say(a).")]


def test_superlatives_range_over_persons():
    tagged = dict((str(f), tag) for tag, f in comparatives_background(["d", "m"]))
    assert "all x (tallest(x) <-> (x = d | taller(x,d)) & (x = m | taller(x,m)))" in tagged


# -- theory building ------------------------------------------------------------------


def test_marge_homer_text_axioms(marge):
    texts = [t.formula for t in marge.tagged("text")]
    assert P("say(marge) <-> knight(homer) & knight(marge) | knave(homer) & knave(marge).") in texts
    assert P("claim(homer) <-> same(homer,marge).") in texts


def test_synonymy_axiom_links_claim_and_say(marge):
    assert [t.formula for t in marge.tagged("synonymy")] == [P("all x (claim(x) <-> say(x)).")]
    assert marge.synonym_pairs == (("claim", "say"),)


def test_persons_fix_the_domain(marge):
    assert marge.persons.persons == ("Marge", "Homer")
    assert marge.domain_size == 2
    assert marge.constants == ["marge", "homer"]


def test_no_persons_is_an_error():
    with pytest.raises(NoPersonsError, match="no persons recognized"):
        build_theory("knights always tell the truth.")


def test_unparsed_sentence_is_a_diagnostic():
    th = build_theory("You meet Sue. Sue flurbs loudly.")
    assert any(d.stage == "grammar" and "flurbs" in d.message for d in th.diagnostics)
    assert not th.tagged("text")[1:]


def test_anonymous_inhabitants(anon):
    assert anon.anonymous == ("A", "B")
    assert P("say(a) <-> knave(a) & knave(b).") in anon.formulas


# -- solving ------------------------------------------------------------------------


def test_marge_homer_both_knights(marge):
    r = solve(marge)
    assert r.verdict == "solved"
    assert r.assignment == {"Marge": "knight", "Homer": "knight"}


def test_sue_alice(sue):
    assert solve(sue).assignment == {"Sue": "knight", "Alice": "knave"}


def test_both_knaves(anon):
    r = solve(anon)
    assert r.assignment == {"A": "knave", "B": "knight"}
    # say(b) is unconstrained because b makes no statement
    assert r.model_count == 2


def test_ambiguous_puzzle():
    r = solve(build_theory("You meet Sue and Alice. Sue says that Alice is a knight."))
    assert r.verdict == "ambiguous"
    assert any("undetermined" in d.message for d in r.diagnostics)


def test_contradictory_puzzle():
    r = solve(build_theory("You meet Sue. Sue says that Sue is a knave."))
    assert r.verdict == "unsatisfiable" and r.model_count == 0


def test_reports_are_deterministic(marge):
    assert solve(marge).as_dict(timings=False) == solve(marge).as_dict(timings=False)
    assert set(solve(marge).as_dict()) == {"verdict", "assignment", "model_count", "diagnostics", "timings"}


# -- questions ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "question, verdict",
    [
        ("Is Sue a knight?", "Yes"),
        ("Is Alice a knave?", "Yes"),
        ("Is Sue a knave?", "No"),
        ("Is Alice a knight?", "No"),
        ("Are Sue and Alice knights?", "No"),
        ("Is Sue a knight and Alice a knave?", "Yes"),
    ],
)
def test_sue_alice_questions(sue, question, verdict):
    a = answer_question(sue, question)
    assert a.verdict == verdict
    assert check_proof(a.proof, sue.formulas)


def test_question_goal(sue):
    assert question_goal(sue, "Is Sue a knight?") == P("knight(sue).")


def test_ordinal_question(anon):
    a = answer_question(anon, "Is the first inhabitant a knave and the second one a knight?")
    assert a.verdict == "Yes"
    assert a.goal == P("knave(a) & knight(b).")
    assert a.proof.empty_clause.clause.is_empty


def test_unknown_verdict():
    th = build_theory("You meet Sue and Alice. Sue says that Alice is a knight.")
    a = answer_question(th, "Is Sue a knight?", max_seconds=5)
    assert a.verdict == "Unknown" and a.proof is None
    assert len(a.diagnostics) == 2


def test_unparseable_question(sue):
    with pytest.raises(QuestionError, match="accepted forms"):
        answer_question(sue, "Why is Sue glorping?")


# -- wh-queries -----------------------------------------------------------------------


def test_tallest(taller):
    assert query_wh(taller, "Who is the tallest?").persons == ("Ana",)


def test_shortest_by_predicate(taller):
    assert query_wh(taller, "shortest").persons == ("Maria",)


def test_knights_by_predicate(marge):
    assert query_wh(marge, "knight").persons == ("Marge", "Homer")
    assert query_wh(marge, "knave").persons == ()


def test_unknown_predicate(marge):
    with pytest.raises(UnknownPredicateError):
        query_wh(marge, "wizard")


def test_ambiguous_wh_answer():
    th = build_theory("You meet Sue and Alice. Sue says that Alice is a knight.")
    assert query_wh(th, "knight").ambiguous


# -- proof export ------------------------------------------------------------------


def trivial():
    axioms = [clausify(P("knight(sue)."))[0], clausify(P("-knight(sue)."))[0]]
    return prove(axioms, None).proof, axioms


def test_trivial_proof_dot_has_three_nodes():
    proof, axioms = trivial()
    (graph,) = pydot.graph_from_dot_data(export_proof_dot(proof, axioms))
    steps = [n for n in graph.get_nodes() if n.get_name() != "node"]  # skip the default-style entry
    assert len(steps) == 3
    assert len(graph.get_edges()) == 2


def test_dot_is_deterministic(anon):
    a = answer_question(anon, "Is the first inhabitant a knave?")
    assert export_proof_dot(a.proof, anon.formulas) == export_proof_dot(a.proof, anon.formulas)


def test_tampered_proof_is_not_exported():
    proof, axioms = trivial()
    bad = dataclasses.replace(proof, steps=proof.steps[:-1] + (
        dataclasses.replace(proof.steps[-1], parents=(1, 1)),
    ))
    with pytest.raises(ProofCheckError):
        export_proof_dot(bad, axioms)
