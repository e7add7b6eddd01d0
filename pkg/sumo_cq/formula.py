"""First-order formula trees.

Every value is immutable and hashable. And/Or are n-ary (at least two operands)
and flatten nested operands of the same connective on construction, so
``And(And(p, q), r) == And(p, q, r)``.
"""
import json
from dataclasses import dataclass
from typing import Callable, FrozenSet, Iterable, Tuple, Union

from sumo_cq.errors import FormulaError

EQUAL = "equal"
INSTANCE = "$instance"
SUBCLASS = "$subclass"
ATTRIBUTE = "attribute"


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        name = self.name[1:] if self.name.startswith("?") else self.name
        if not name:
            raise FormulaError("empty variable name")
        object.__setattr__(self, "name", name)

    def __str__(self):
        return f"?{self.name}"


@dataclass(frozen=True)
class Constant:
    name: str

    def __post_init__(self):
        if not self.name:
            raise FormulaError("empty constant name")

    def __str__(self):
        return self.name


@dataclass(frozen=True, init=False)
class Function:
    """Functional term. Only produced when reading ontology axiom files."""
    name: str
    args: Tuple["Term", ...]

    def __init__(self, name, *args):
        if not name:
            raise FormulaError("empty function name")
        if not args:
            raise FormulaError(f"function term {name} without arguments")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", tuple(args))


Term = Union[Variable, Constant, Function]


@dataclass(frozen=True, init=False)
class Atom:
    predicate: str
    args: Tuple[Term, ...]

    def __init__(self, predicate, *args):
        if not predicate:
            raise FormulaError("empty predicate")
        for a in args:
            if not isinstance(a, (Variable, Constant, Function)):
                raise FormulaError(f"{a!r} is not a term")
        if predicate == EQUAL and len(args) != 2:
            raise FormulaError(f"equality takes 2 arguments, got {len(args)}")
        object.__setattr__(self, "predicate", predicate)
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Not:
    body: "Formula"


def _flatten(cls, operands):
    flat = []
    for op in operands:
        if isinstance(op, cls):
            flat.extend(op.operands)
        else:
            flat.append(op)
    if len(flat) < 2:
        raise FormulaError(f"{cls.__name__} needs at least 2 operands, got {len(flat)}")
    return tuple(flat)


@dataclass(frozen=True, init=False)
class And:
    operands: Tuple["Formula", ...]

    def __init__(self, *operands):
        object.__setattr__(self, "operands", _flatten(And, operands))


@dataclass(frozen=True, init=False)
class Or:
    operands: Tuple["Formula", ...]

    def __init__(self, *operands):
        object.__setattr__(self, "operands", _flatten(Or, operands))


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


def _variables(variables):
    if isinstance(variables, Variable):
        variables = (variables,)
    variables = tuple(variables)
    if not variables:
        raise FormulaError("quantifier without variables")
    if len(set(variables)) != len(variables):
        raise FormulaError(f"duplicate quantified variable in {[str(v) for v in variables]}")
    return variables


@dataclass(frozen=True, init=False)
class Forall:
    variables: Tuple[Variable, ...]
    body: "Formula"

    def __init__(self, variables, body):
        object.__setattr__(self, "variables", _variables(variables))
        object.__setattr__(self, "body", body)


@dataclass(frozen=True, init=False)
class Exists:
    variables: Tuple[Variable, ...]
    body: "Formula"

    def __init__(self, variables, body):
        object.__setattr__(self, "variables", _variables(variables))
        object.__setattr__(self, "body", body)


Formula = Union[Atom, Not, And, Or, Implies, Iff, Forall, Exists]
QUANTIFIERS = (Forall, Exists)


def equal(a, b):
    return Atom(EQUAL, a, b)


def conjunction(formulas: Iterable["Formula"]) -> "Formula":
    formulas = list(formulas)
    if not formulas:
        raise FormulaError("empty conjunction")
    return formulas[0] if len(formulas) == 1 else And(*formulas)


def children(f):
    if isinstance(f, Atom):
        return ()
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.operands
    if isinstance(f, (Implies, Iff)):
        return f.left, f.right
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    raise FormulaError(f"not a formula: {f!r}")


def term_variables(t):
    if isinstance(t, Variable):
        return {t}
    if isinstance(t, Function):
        out = set()
        for a in t.args:
            out |= term_variables(a)
        return out
    return set()


def free_variables(f) -> FrozenSet[Variable]:
    if isinstance(f, Atom):
        out = set()
        for a in f.args:
            out |= term_variables(a)
        return frozenset(out)
    if isinstance(f, QUANTIFIERS):
        return free_variables(f.body) - set(f.variables)
    out = frozenset()
    for c in children(f):
        out |= free_variables(c)
    return out


def is_sentence(f):
    return not free_variables(f)


def simplify(f):
    """Removes double negations anywhere in the tree and nothing else."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        if isinstance(f.body, Not):
            return simplify(f.body.body)
        return Not(simplify(f.body))
    if isinstance(f, And):
        return And(*[simplify(o) for o in f.operands])
    if isinstance(f, Or):
        return Or(*[simplify(o) for o in f.operands])
    if isinstance(f, Implies):
        return Implies(simplify(f.left), simplify(f.right))
    if isinstance(f, Iff):
        return Iff(simplify(f.left), simplify(f.right))
    return type(f)(f.variables, simplify(f.body))


def negate(f, simplify_result=False):
    free = free_variables(f)
    if free:
        raise FormulaError(f"cannot negate an open formula, free: {sorted(str(v) for v in free)}")
    negated = Not(f)
    return simplify(negated) if simplify_result else negated


def is_literal(f):
    """A single atom with at most one Not around it."""
    if isinstance(f, Not):
        f = f.body
    return isinstance(f, Atom)


def atoms(f):
    if isinstance(f, Atom):
        yield f
        return
    for c in children(f):
        yield from atoms(c)


def _term_symbols(t):
    if isinstance(t, Constant):
        yield t.name
    elif isinstance(t, Function):
        yield t.name
        for a in t.args:
            yield from _term_symbols(a)


def symbols(f):
    """Predicate, function and constant names in first-occurrence order."""
    seen = {}
    for a in atoms(f):
        seen.setdefault(a.predicate, None)
        for t in a.args:
            for s in _term_symbols(t):
                seen.setdefault(s, None)
    return list(seen)


def map_symbols(f, fn: Callable[[str], str]):
    """Renames every predicate, function and constant symbol through fn."""
    def term(t):
        if isinstance(t, Constant):
            return Constant(fn(t.name))
        if isinstance(t, Function):
            return Function(fn(t.name), *[term(a) for a in t.args])
        return t

    def walk(g):
        if isinstance(g, Atom):
            return Atom(fn(g.predicate), *[term(a) for a in g.args])
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or)):
            return type(g)(*[walk(o) for o in g.operands])
        if isinstance(g, (Implies, Iff)):
            return type(g)(walk(g.left), walk(g.right))
        return type(g)(g.variables, walk(g.body))

    return walk(f)


# canonical keys

def _term_key(t, scope):
    if isinstance(t, Variable):
        # innermost binder first: de Bruijn index
        for depth, bound in enumerate(reversed(scope)):
            if bound == t:
                return ["b", depth]
        return ["v", t.name]
    if isinstance(t, Constant):
        return ["c", t.name]
    return ["f", t.name, [_term_key(a, scope) for a in t.args]]


def _key_tree(f, scope):
    if isinstance(f, Atom):
        return ["A", f.predicate, [_term_key(a, scope) for a in f.args]]
    if isinstance(f, Not):
        return ["N", _key_tree(f.body, scope)]
    if isinstance(f, (And, Or)):
        keyed = [_key_tree(o, scope) for o in f.operands]
        keyed.sort(key=_dumps)
        return ["&" if isinstance(f, And) else "|", keyed]
    if isinstance(f, Implies):
        return [">", _key_tree(f.left, scope), _key_tree(f.right, scope)]
    if isinstance(f, Iff):
        return ["=", _key_tree(f.left, scope), _key_tree(f.right, scope)]
    tag = "F" if isinstance(f, Forall) else "E"
    return [tag, len(f.variables), _key_tree(f.body, scope + list(f.variables))]


def _dumps(tree):
    return json.dumps(tree, separators=(",", ":"), ensure_ascii=False)


def canonical_key(f) -> bytes:
    """Key equal for alpha-equivalent formulas up to And/Or operand order.

    Bound variables become positional indices counted from the innermost
    binder, so the key of a subformula does not depend on its siblings.
    """
    return _dumps(_key_tree(f, [])).encode("utf-8")
