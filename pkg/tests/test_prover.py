import dataclasses

import pytest

from nlpuzzle.app.resources import data_path
from nlpuzzle.fol import Clause, clausify, parse_formula, parse_theory
from nlpuzzle.inference import (
    PROVED,
    RESOURCE,
    SATURATED,
    check_proof,
    compress_hyper,
    factors,
    prove,
    resolvents,
    subsumes,
    variant,
)

from hand_proofs import both_knaves_proof, kk0p

P = parse_formula


def cl(text):
    (c,) = clausify(P(text))
    return c


def theory(name):
    th = parse_theory(data_path("theories", name).read_text(encoding="utf-8"))
    return list(th.assumptions), th.goals[0]


# -- clause operations ----------------------------------------------------------


def test_binary_resolvent():
    ((r, a, b),) = resolvents(cl("-knight(?x) | m(?x)"), cl("knight(a)"))
    assert r == cl("m(a)")
    assert not a.sign and b.sign


def test_resolvents_rename_apart():
    rs = resolvents(cl("p(?x) | q(?x)"), cl("-p(f(?x))"))
    assert [r for r, _, _ in rs] == [cl("q(f(?y))")] or variant(rs[0][0], cl("q(f(?y))"))


def test_no_resolvent_between_same_signs():
    assert resolvents(cl("p(a)"), cl("p(a) | q(b)")) == []


def test_factor_merges_unifiable_literals():
    (f,) = factors(cl("p(?x) | p(a) | q(?x)"))
    assert f == cl("p(a) | q(a)")


@pytest.mark.parametrize(
    "c, d, expected",
    [
        ("p(?x)", "p(a) | q(b)", True),
        ("p(?x) | q(?x)", "p(a) | q(b)", False),
        ("p(a) | q(b)", "p(?x)", False),
        ("-p(?x) | q(?y)", "-p(a) | q(a) | r(c)", True),
        ("p(?x,?x)", "p(a,b)", False),
    ],
)
def test_subsumption(c, d, expected):
    assert subsumes(cl(c), cl(d)) is expected


def test_variants():
    assert variant(cl("p(?x) | q(?y)"), cl("p(?u) | q(?v)"))
    assert not variant(cl("p(?x) | q(?x)"), cl("p(?u) | q(?v)"))


# -- proving --------------------------------------------------------------------------


def test_trivial_proof_has_five_steps():
    r = prove([P("knight(sue).")], P("knight(sue)."))
    assert r.status == PROVED
    assert [s.rule for s in r.proof.steps] == ["assumption", "clausify", "goal", "deny", "resolve"]
    assert r.proof.empty_clause.clause.is_empty
    assert check_proof(r.proof, [P("knight(sue).")])


def test_non_consequence_saturates():
    r = prove([P("p(a) | q(a).")], P("p(a)."))
    assert r.status == SATURATED and not r
    assert r.proof is None


def test_infinite_search_hits_the_resource_limit():
    r = prove([P("all x (p(x) -> p(s(x))).") , P("p(z).")], P("p(w)."), max_clauses=200, max_seconds=5)
    assert r.status == RESOURCE


def test_friends_needs_the_case_split():
    axioms, goal = theory("friends.in")
    r = prove(axioms, goal)
    assert r.proved
    assert check_proof(r.proof, axioms)


@pytest.mark.parametrize("ground", [True, False])
def test_both_knaves_is_proved_in_both_modes(ground):
    axioms, goal = kk0p()
    r = prove(axioms, goal, ground=ground)
    assert r.proved
    assert check_proof(r.proof, axioms)


def test_set_of_support_proofs_check():
    axioms, goal = kk0p()
    r = prove(axioms, goal, set_of_support=True)
    assert r.proved and check_proof(r.proof, axioms)


def test_proofs_are_deterministic():
    axioms, goal = kk0p()
    assert prove(axioms, goal).proof.render() == prove(axioms, goal).proof.render()


def test_clause_axioms_are_accepted():
    axioms = [cl("-knight(?x) | m(?x)"), cl("knight(a)")]
    r = prove(axioms, P("m(a)."))
    assert r.proved and check_proof(r.proof, axioms)


def test_equality_reasoning():
    axioms = [P("a = b."), P("knight(a).")]
    r = prove(axioms, P("knight(b)."))
    assert r.proved and check_proof(r.proof, axioms)


# -- checking ---------------------------------------------------------------------


def test_hand_transcribed_proof_checks():
    axioms, _ = kk0p()
    p = both_knaves_proof()
    assert check_proof(p, axioms)
    assert [s.id for s in p.steps if s.rule == "resolve"] == [16, 18, 20, 22, 23]


def _replace(proof, id, **changes):
    steps = tuple(dataclasses.replace(s, **changes) if s.id == id else s for s in proof.steps)
    return dataclasses.replace(proof, steps=steps)


def test_tampered_clause_is_rejected():
    axioms, _ = kk0p()
    p = both_knaves_proof()
    assert not check_proof(_replace(p, 22, clause=cl("knave(b)")), axioms)


def test_tampered_parent_is_rejected():
    axioms, _ = kk0p()
    assert not check_proof(_replace(both_knaves_proof(), 23, parents=(20, 16)), axioms)


def test_forward_reference_is_rejected():
    axioms, _ = kk0p()
    assert not check_proof(_replace(both_knaves_proof(), 16, parents=(8, 22)), axioms)


def test_foreign_assumption_is_rejected():
    axioms, _ = kk0p()
    assert not check_proof(both_knaves_proof(), axioms[:-1])


def test_missing_empty_clause_is_rejected():
    axioms, _ = kk0p()
    p = both_knaves_proof()
    assert not check_proof(dataclasses.replace(p, steps=p.steps[:-1]), axioms)


def test_duplicate_ids_are_rejected():
    axioms, _ = kk0p()
    p = both_knaves_proof()
    assert not check_proof(dataclasses.replace(p, steps=p.steps[:1] + p.steps), axioms)


def test_hyper_compression_keeps_proofs_valid():
    axioms, goal = kk0p()
    r = prove(axioms, goal)
    short = compress_hyper(r.proof)
    assert len(short) <= len(r.proof)
    assert check_proof(short, axioms)


def test_empty_clause_is_printed_as_false():
    assert str(Clause.of(())) == "$F"
