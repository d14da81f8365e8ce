"""First-order logic: syntax, reader/printer, unification and clause form."""

from .clauses import (
    Clause,
    Clausifier,
    Literal,
    clausify,
    clausify_all,
    is_skolem,
    normalize_variables,
    rename_apart,
)
from .parser import (
    ArityError,
    FormulaSyntaxError,
    Signature,
    Theory,
    parse_formula,
    parse_theory,
    print_formula,
    print_theory,
)
from .syntax import (
    And,
    Application,
    Atom,
    Constant,
    Equality,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Variable,
    atoms,
    conjoin,
    constants,
    disjoin,
    format_formula,
    free_variables,
    functions,
    predicates,
)
from .unify import Substitution, apply_term, compose, match, substitute, unify
