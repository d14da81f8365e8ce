import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlpuzzle.fol import (
    And,
    Application,
    ArityError,
    Atom,
    Constant,
    Equality,
    Exists,
    ForAll,
    FormulaSyntaxError,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    Signature,
    Variable,
    clausify,
    compose,
    free_variables,
    parse_formula,
    parse_theory,
    print_formula,
    print_theory,
    substitute,
    unify,
)
from nlpuzzle.fol.clauses import nnf, prenex, rectify
from nlpuzzle.fol.unify import apply_term

from logic_oracle import person_atoms, random_ground, truth

x, y = Variable("x"), Variable("y")


def atom(p, *names):
    return Atom(p, tuple(Constant(n) if isinstance(n, str) else n for n in names))


def clause_set(formula_text):
    return {frozenset(str(l) for l in c.literals) for c in clausify(parse_formula(formula_text))}


# -- reading and printing -----------------------------------------------------


def test_parse_inhabitant_rule():
    f = parse_formula("all x (inhabitant(x) -> knight(x) | knave(x)).")
    assert f == ForAll("x", Implies(Atom("inhabitant", (x,)), Or(Atom("knight", (x,)), Atom("knave", (x,)))))


def test_parse_atomic():
    assert parse_formula("knight(a).") == atom("knight", "a")


def test_parse_inequality():
    assert parse_formula("alice != sam.") == Not(Equality(Constant("alice"), Constant("sam")))


def test_bound_names_are_variables_free_names_constants():
    f = parse_formula("all x p(x, y).")
    assert f.body.args == (x, Constant("y"))
    assert parse_formula("p(?y).").args == (y,)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("a & b | c.", Or(And(atom("a"), atom("b")), atom("c"))),
        ("a -> b -> c.", Implies(atom("a"), Implies(atom("b"), atom("c")))),
        ("-a & b.", And(Not(atom("a")), atom("b"))),
        ("a <-> b & c.", Iff(atom("a"), And(atom("b"), atom("c")))),
        ("exists x all y p(x,y).", Exists("x", ForAll("y", atom("p", x, y)))),
        ("f(a) = b.", Equality(Application("f", (Constant("a"),)), Constant("b"))),
    ],
)
def test_precedence(text, expected):
    assert parse_formula(text) == expected


def test_syntax_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("knight(a")
    assert err.value.line == 1 and err.value.col == 9


def test_arity_mismatch_against_signature():
    sig = Signature()
    parse_formula("p(a).", sig)
    with pytest.raises(ArityError):
        parse_formula("p(a,b).", sig)


def test_theory_sections_and_comments():
    text = (
        "% header\n"
        "formulas(assumptions).\n  knight(a).  % trailing\n  -knave(a).\nend_of_list.\n"
        "formulas(goals).\n  knight(a).\nend_of_list.\n"
    )
    th = parse_theory(text)
    assert th.assumptions == [atom("knight", "a"), Not(atom("knave", "a"))]
    assert th.goals == [atom("knight", "a")]
    assert parse_theory(print_theory(th)) == th


def _formulas(depth):
    names = st.sampled_from(["a", "b", "c"])
    preds = st.sampled_from(["p", "q"])
    base = st.builds(lambda p, n: Atom(p, (Constant(n),)), preds, names)
    return st.recursive(
        base,
        lambda sub: st.one_of(
            st.builds(Not, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Implies, sub, sub),
            st.builds(Iff, sub, sub),
        ),
        max_leaves=depth,
    )


@settings(max_examples=200, deadline=None)
@given(_formulas(12))
def test_print_parse_roundtrip(f):
    assert parse_formula(print_formula(f)) == f


@settings(max_examples=100, deadline=None)
@given(_formulas(6), st.sampled_from(["all", "exists"]))
def test_roundtrip_with_quantifier(f, q):
    body = substitute(f, {})  # identity
    wrapped = (ForAll if q == "all" else Exists)("x", Or(body, Atom("p", (x,))))
    assert parse_formula(print_formula(wrapped)) == wrapped


# -- substitution and unification ---------------------------------------------


def test_substitute_ground():
    assert substitute(Atom("knight", (x,)), {"x": Constant("homer")}) == atom("knight", "homer")


def test_substitute_avoids_capture():
    f = substitute(ForAll("x", Atom("p", (x, y))), {"y": x})
    assert isinstance(f, ForAll) and f.var != "x"
    assert f.body == Atom("p", (Variable(f.var), x))


def test_substitute_same():
    f = substitute(Atom("same", (x, y)), {"x": Constant("marge"), "y": Constant("homer")})
    assert f == atom("same", "marge", "homer")


def test_unify_examples():
    assert unify(Atom("knave", (x,)), atom("knave", "b")) == {"x": Constant("b")}
    assert unify(Atom("p", (x, x)), atom("p", "a", "b")) is None
    assert unify(x, Application("f", (x,))) is None


def test_unify_binds_chains_idempotently():
    s = unify(Atom("p", (x, y)), Atom("p", (y, Constant("a"))))
    assert s is not None
    for t in s.values():
        assert not ({v for v in s} & _vars(t))
    assert apply_term(x, s) == apply_term(y, s) == Constant("a")


def _vars(t):
    if isinstance(t, Variable):
        return {t.name}
    if isinstance(t, Application):
        return set().union(*(_vars(a) for a in t.args))
    return set()


_terms = st.recursive(
    st.one_of(st.sampled_from([x, y, Variable("z")]), st.sampled_from([Constant("a"), Constant("b")])),
    lambda sub: st.builds(lambda a, b: Application("f", (a, b)), sub, sub),
    max_leaves=5,
)


@settings(max_examples=300, deadline=None)
@given(_terms, _terms)
def test_unifier_unifies(s, t):
    mgu = unify(Atom("p", (s,)), Atom("p", (t,)))
    if mgu is not None:
        assert apply_term(s, mgu) == apply_term(t, mgu)


@settings(max_examples=200, deadline=None)
@given(_terms, _terms, st.sampled_from([Constant("a"), Constant("b")]))
def test_mgu_is_most_general(s, t, c):
    # any ground unifier built by grounding the mgu factors through it
    mgu = unify(Atom("p", (s,)), Atom("p", (t,)))
    if mgu is None:
        return
    ground = {v: c for v in ("x", "y", "z")}
    other = compose(mgu, ground)
    assert apply_term(s, other) == apply_term(t, other)
    for v in ("x", "y", "z"):
        assert apply_term(Variable(v), other) == apply_term(apply_term(Variable(v), mgu), ground)


@settings(max_examples=200, deadline=None)
@given(_formulas(6))
def test_disjoint_substitutions_commute(f):
    g = ForAll("x", Or(f, Atom("p", (x, y, Variable("z")))))
    s1, s2 = {"y": Constant("a")}, {"z": Constant("b")}
    assert substitute(substitute(g, s1), s2) == substitute(substitute(g, s2), s1)


# -- clause form ----------------------------------------------------------------


def test_clausify_inhabitant_rule():
    assert clause_set("all x (inhabitant(x) -> knight(x) | knave(x)).") == {
        frozenset({"-inhabitant(?x)", "knight(?x)", "knave(?x)"})
    }


def test_clausify_atom():
    assert clause_set("knight(a).") == {frozenset({"knight(a)"})}


def test_clausify_skolem_constant():
    assert clause_set("exists x knave(x).") == {frozenset({"knave(sk1)"})}


def test_clausify_skolem_function_under_universal():
    (c,) = clausify(parse_formula("all y exists x p(y,x)."))
    (lit,) = c.literals
    assert lit.atom.args[1] == Application("sk1", (lit.atom.args[0],))


def test_clausify_message_biconditional():
    assert clause_set("m(a) <-> knave(a) & knave(b).") == {
        frozenset({"-m(a)", "knave(a)"}),
        frozenset({"-m(a)", "knave(b)"}),
        frozenset({"m(a)", "-knave(a)", "-knave(b)"}),
    }


def test_message_biconditional_truth_table():
    f = parse_formula("m(a) <-> knave(a) & knave(b).")
    clauses = clausify(f)
    atoms = [atom("m", "a"), atom("knave", "a"), atom("knave", "b")]
    keys = [(a.predicate, (0,) if a.args[0].name == "a" else (1,)) for a in atoms]
    for bits in itertools.product((False, True), repeat=3):
        val = {k for k, b in zip(keys, bits) if b}
        cm = {"a": 0, "b": 1}
        assert truth(f, val, 2, cm) == all(truth(c.to_formula(), val, 2, cm) for c in clauses)


def test_tautologies_are_dropped():
    assert clausify(parse_formula("p(a) | -p(a).")) == []


def test_clause_has_set_semantics():
    (c,) = clausify(parse_formula("p(a) | p(a) | q(a)."))
    assert len(c.literals) == 2


def test_rectify_gives_distinct_binders():
    f = rectify(parse_formula("(all x p(x)) & (all x q(x))."))
    assert f.left.var != f.right.var


def test_nnf_pushes_negation():
    f = nnf(parse_formula("-(all x (p(x) -> q(x)))."))
    assert f == Exists("x", And(Atom("p", (x,)), Not(Atom("q", (x,)))))


def test_prenex_pulls_quantifiers():
    prefix, matrix = prenex(nnf(rectify(parse_formula("(all x p(x)) | (exists y q(y))."))))
    assert [q for q, _ in prefix] == ["all", "exists"]
    assert not free_variables(matrix) - {v for _, v in prefix}


@pytest.mark.parametrize("seed", range(40))
def test_clausify_equivalent_on_ground_formulas(seed):
    rng = random.Random(seed)
    atoms = person_atoms(["a", "b"], ("p", "q"))[: rng.randint(1, 4)]
    f = random_ground(rng, atoms, 4)
    clauses = clausify(f)
    cm = {"a": 0, "b": 1}
    keys = sorted({(a.predicate, (cm[a.args[0].name],)) for a in atoms})
    for bits in itertools.product((False, True), repeat=len(keys)):
        val = {k for k, b in zip(keys, bits) if b}
        assert truth(f, val, 2, cm) == all(truth(c.to_formula(), val, 2, cm) for c in clauses)


def test_literal_rejects_connectives():
    with pytest.raises((TypeError, ValueError)):
        Literal(True, And(atom("p"), atom("q")))


@pytest.mark.parametrize(
    "text",
    ["all x (inhabitant(x) -> knight(x) | knave(x)).", "all x all y (same(x,y) <-> knight(x) & knight(y))."],
)
def test_printed_clauses_reparse_with_variables(text):
    for c in clausify(parse_formula(text)):
        (again,) = clausify(parse_formula(str(c)))
        assert again == c
