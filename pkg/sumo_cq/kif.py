"""Parenthesized prefix syntax: the SUO-KIF subset used by taxonomy files and
by the human-readable conjectures in the corpus manifest."""
import re

from sumo_cq.errors import KifSyntaxError
from sumo_cq.formula import (And, Atom, Constant, Exists, Forall, Function, Iff, Implies, Not, Or,
                             Variable)

_TOKEN = re.compile(r'(?P<ws>\s+)|(?P<comment>;[^\n]*)|(?P<string>"(?:[^"\\]|\\.)*")|'
                    r'(?P<open>\()|(?P<close>\))|(?P<atom>[^\s()";]+)|(?P<bad>")')

CONNECTIVES = {"not", "and", "or", "=>", "<=>", "forall", "exists"}


class KifString(str):
    """A double-quoted string literal, quotes included."""


def read_sexprs(text, path=None):
    """Yields ``(expression, line)`` for every top-level expression.

    Lists become python lists, atoms stay strings and string literals become
    KifString.
    """
    stack = []
    line = 1
    last = 0

    for m in _TOKEN.finditer(text):
        start = m.start()
        line += text.count("\n", last, start)
        last = start
        kind = m.lastgroup

        if kind in ("ws", "comment"):
            continue
        if kind == "bad":
            raise KifSyntaxError("unterminated string literal", path, line)
        if kind == "open":
            stack.append(([], line))
            continue
        if kind == "close":
            if not stack:
                raise KifSyntaxError("unbalanced ')'", path, line)
            done, opened = stack.pop()
            if stack:
                stack[-1][0].append(done)
            else:
                yield done, opened
            continue

        token = KifString(m.group()) if kind == "string" else m.group()
        if stack:
            stack[-1][0].append(token)
        else:
            yield token, line

    if stack:
        raise KifSyntaxError("unbalanced '(' never closed", path, stack[-1][1])


def _term(expr):
    if isinstance(expr, list):
        if not expr or isinstance(expr[0], list):
            raise KifSyntaxError(f"bad term {_render(expr)}")
        return Function(expr[0], *[_term(e) for e in expr[1:]])
    if expr.startswith("?"):
        return Variable(expr)
    if expr.startswith("@"):
        raise KifSyntaxError(f"unsupported construct: row variable {expr}")
    return Constant(expr)


def _render(expr):
    if isinstance(expr, list):
        return "(" + " ".join(_render(e) for e in expr) + ")"
    return expr


def to_formula(expr):
    if not isinstance(expr, list):
        if isinstance(expr, KifString) or expr.startswith("?"):
            raise KifSyntaxError(f"{expr} is not a formula")
        return Atom(expr)
    if not expr:
        raise KifSyntaxError("empty expression")

    head, rest = expr[0], expr[1:]
    if isinstance(head, list):
        raise KifSyntaxError(f"unsupported construct: compound head in {_render(expr)}")

    if head == "not":
        if len(rest) != 1:
            raise KifSyntaxError(f"not takes one argument: {_render(expr)}")
        return Not(to_formula(rest[0]))
    if head in ("and", "or"):
        if not rest:
            raise KifSyntaxError(f"{head} without operands")
        operands = [to_formula(e) for e in rest]
        if len(operands) == 1:
            return operands[0]
        return And(*operands) if head == "and" else Or(*operands)
    if head in ("=>", "<=>"):
        if len(rest) != 2:
            raise KifSyntaxError(f"{head} takes two arguments: {_render(expr)}")
        cls = Implies if head == "=>" else Iff
        return cls(to_formula(rest[0]), to_formula(rest[1]))
    if head in ("forall", "exists"):
        if len(rest) != 2 or not isinstance(rest[0], list):
            raise KifSyntaxError(f"malformed quantifier: {_render(expr)}")
        variables = [_term(v) for v in rest[0]]
        if not all(isinstance(v, Variable) for v in variables):
            raise KifSyntaxError(f"quantifier over non-variable: {_render(expr)}")
        cls = Forall if head == "forall" else Exists
        return cls(variables, to_formula(rest[1]))

    return Atom(head, *[_term(e) for e in rest])


def parse_suo_kif(text, path=None):
    exprs = list(read_sexprs(text, path))
    if len(exprs) != 1:
        raise KifSyntaxError(f"expected one expression, found {len(exprs)}", path)
    expr, line = exprs[0]
    try:
        return to_formula(expr)
    except KifSyntaxError as e:
        raise KifSyntaxError(str(e), path, line) from None


def _emit_term(t):
    if isinstance(t, Variable):
        return f"?{t.name}"
    if isinstance(t, Constant):
        return t.name
    return "(" + " ".join([t.name] + [_emit_term(a) for a in t.args]) + ")"


def _parts(f):
    """Head and rendered-argument pieces of a formula."""
    if isinstance(f, Atom):
        return f.predicate, [_emit_term(a) for a in f.args], []
    if isinstance(f, Not):
        return "not", [], [f.body]
    if isinstance(f, And):
        return "and", [], list(f.operands)
    if isinstance(f, Or):
        return "or", [], list(f.operands)
    if isinstance(f, Implies):
        return "=>", [], [f.left, f.right]
    if isinstance(f, Iff):
        return "<=>", [], [f.left, f.right]
    head = "forall" if isinstance(f, Forall) else "exists"
    bound = "(" + " ".join(f"?{v.name}" for v in f.variables) + ")"
    return head, [bound], [f.body]


def _emit_line(f):
    if isinstance(f, Atom) and not f.args:
        return f.predicate
    head, flat, subs = _parts(f)
    return "(" + " ".join([head] + flat + [_emit_line(s) for s in subs]) + ")"


def _emit_pretty(f, indent, width):
    one = _emit_line(f)
    if len(one) + indent <= width or isinstance(f, Atom):
        return one
    head, flat, subs = _parts(f)
    pad = " " * (indent + 2)
    lines = ["(" + " ".join([head] + flat)]
    for s in subs:
        lines.append(pad + _emit_pretty(s, indent + 2, width))
    return "\n".join(lines) + ")"


def emit_suo_kif(f, pretty=False, width=72):
    if pretty:
        return _emit_pretty(f, 0, width)
    return _emit_line(f)
