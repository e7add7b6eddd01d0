import random

import pytest

from sumo_cq.errors import FormulaError
from sumo_cq.formula import (And, Atom, Constant, Exists, Forall, Function, Iff, Implies, Not, Or, Variable,
                             canonical_key, conjunction, equal, free_variables, is_literal, is_sentence,
                             map_symbols, negate, simplify, symbols)

X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")


def p(*args):
    return Atom("p", *args)


def q(*args):
    return Atom("q", *args)


def test_variable_question_mark_is_stripped():
    assert Variable("?X") == Variable("X")
    assert str(Variable("X")) == "?X"


def test_and_or_flatten():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    assert And(And(a, b), c) == And(a, b, c)
    assert Or(a, Or(b, c)).operands == (a, b, c)
    assert And(Or(a, b), c).operands == (Or(a, b), c)


@pytest.mark.parametrize("build", [
    lambda: And(Atom("a")),
    lambda: Or(),
    lambda: Atom(""),
    lambda: Atom("equal", Constant("a")),
    lambda: Forall((), Atom("a")),
    lambda: Exists((X, X), p(X)),
    lambda: Function("f"),
    lambda: Atom("p", "not a term"),
    lambda: conjunction([]),
])
def test_malformed_trees_are_rejected(build):
    with pytest.raises(FormulaError):
        build()


def test_free_variables():
    f = Forall(X, Implies(p(X), Exists(Y, q(X, Y, Z))))
    assert free_variables(f) == {Z}
    assert not is_sentence(f)
    assert is_sentence(Exists(Z, f))
    assert free_variables(p(Function("f", X, Constant("c")))) == {X}


def test_negate_closed_formula():
    f = Exists(X, p(X))
    assert negate(f) == Not(f)
    assert negate(Not(f), simplify_result=True) == f


def test_negate_open_formula_fails():
    with pytest.raises(FormulaError, match="free"):
        negate(p(X))


def test_simplify_only_removes_double_negation():
    f = Not(Not(And(Not(Not(p(X))), Implies(q(X), Not(p(X))))))
    assert simplify(f) == And(p(X), Implies(q(X), Not(p(X))))
    assert simplify(Not(Not(Not(p(X))))) == Not(p(X))


def test_is_literal():
    assert is_literal(p(X))
    assert is_literal(Not(equal(X, Y)))
    assert not is_literal(Not(Not(p(X))))
    assert not is_literal(Forall(X, p(X)))


def test_symbols_in_first_occurrence_order():
    f = Exists(X, And(Atom("$instance", X, Constant("Horse")), Atom("attribute", X, Constant("Male")),
                      Atom("$instance", X, Function("f", Constant("Horse")))))
    assert symbols(f) == ["$instance", "Horse", "attribute", "Male", "f"]


def test_map_symbols_keeps_variables():
    f = Forall(X, Implies(p(X), q(X, Constant("c"))))
    g = map_symbols(f, str.upper)
    assert g == Forall(X, Implies(Atom("P", X), Atom("Q", X, Constant("C"))))


class TestCanonicalKey:

    def test_alpha_renaming(self):
        assert canonical_key(Exists(X, p(X))) == canonical_key(Exists(Y, p(Y)))
        assert canonical_key(Forall((X, Y), q(X, Y))) == canonical_key(Forall((Y, X), q(Y, X)))

    def test_conjunct_order(self):
        a = Exists(X, And(p(X), q(X)))
        b = Exists(Y, And(q(Y), p(Y)))
        assert canonical_key(a) == canonical_key(b)

    def test_distinguishes_binding_structure(self):
        assert canonical_key(Forall((X, Y), q(X, Y))) != canonical_key(Forall((X, Y), q(Y, X)))
        assert canonical_key(Exists(X, p(X))) != canonical_key(Forall(X, p(X)))
        assert canonical_key(And(p(X), q(X))) != canonical_key(Or(p(X), q(X)))

    def test_free_variables_keep_their_names(self):
        assert canonical_key(p(X)) != canonical_key(p(Y))

    def test_implication_is_ordered(self):
        assert canonical_key(Implies(p(X), q(X))) != canonical_key(Implies(q(X), p(X)))
        assert canonical_key(Iff(p(X), q(X))) != canonical_key(Implies(p(X), q(X)))


# random formulas

_PREDICATES = [("p", 1), ("q", 2), ("r", 0), ("equal", 2)]
_CONSTANTS = ["a", "b", "c"]


def random_term(rng, bound):
    if bound and rng.random() < 0.7:
        return rng.choice(bound)
    if rng.random() < 0.1:
        return Function("f", Constant(rng.choice(_CONSTANTS)))
    return Constant(rng.choice(_CONSTANTS))


def random_formula(rng, depth=0, bound=()):
    bound = list(bound)
    if depth > 3 or rng.random() < 0.3:
        name, arity = rng.choice(_PREDICATES)
        return Atom(name, *[random_term(rng, bound) for _ in range(arity)])
    choice = rng.randrange(7)
    if choice == 0:
        return Not(random_formula(rng, depth + 1, bound))
    if choice in (1, 2):
        cls = And if choice == 1 else Or
        return cls(*[random_formula(rng, depth + 1, bound) for _ in range(rng.randint(2, 3))])
    if choice == 3:
        return Implies(random_formula(rng, depth + 1, bound), random_formula(rng, depth + 1, bound))
    if choice == 4:
        return Iff(random_formula(rng, depth + 1, bound), random_formula(rng, depth + 1, bound))
    v = Variable(f"V{depth}{rng.randrange(3)}")
    inner = [b for b in bound if b != v] + [v]
    cls = Forall if choice == 5 else Exists
    return cls(v, random_formula(rng, depth + 1, inner))


def rename_bound(f, suffix):
    """Alpha-renames every bound variable."""
    def term(t, env):
        if isinstance(t, Variable):
            return env.get(t, t)
        if isinstance(t, Function):
            return Function(t.name, *[term(a, env) for a in t.args])
        return t

    def walk(g, env):
        if isinstance(g, Atom):
            return Atom(g.predicate, *[term(a, env) for a in g.args])
        if isinstance(g, Not):
            return Not(walk(g.body, env))
        if isinstance(g, (And, Or)):
            return type(g)(*[walk(o, env) for o in g.operands])
        if isinstance(g, (Implies, Iff)):
            return type(g)(walk(g.left, env), walk(g.right, env))
        inner = dict(env)
        for v in g.variables:
            inner[v] = Variable(v.name + suffix)
        return type(g)([inner[v] for v in g.variables], walk(g.body, inner))

    return walk(f, {})


def shuffle_junctions(f, rng):
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(shuffle_junctions(f.body, rng))
    if isinstance(f, (And, Or)):
        ops = [shuffle_junctions(o, rng) for o in f.operands]
        rng.shuffle(ops)
        return type(f)(*ops)
    if isinstance(f, (Implies, Iff)):
        return type(f)(shuffle_junctions(f.left, rng), shuffle_junctions(f.right, rng))
    return type(f)(f.variables, shuffle_junctions(f.body, rng))


def test_random_formulas_invariants():
    rng = random.Random(20)
    for _ in range(10000):
        f = random_formula(rng)
        key = canonical_key(f)
        assert canonical_key(rename_bound(f, "r")) == key
        assert canonical_key(shuffle_junctions(f, rng)) == key
        assert simplify(simplify(f)) == simplify(f)
        if is_sentence(f):
            g = negate(f)
            assert is_sentence(g)
            assert canonical_key(g) != key
            assert negate(g, simplify_result=True) == simplify(f)
