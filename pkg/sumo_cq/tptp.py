"""TPTP first-order form: emission through a SymbolMap, and a parser for the
annotated-formula subset found in ontology axiom files and problem files."""
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Tuple

from sumo_cq.errors import FormulaError, SymbolCollisionError, TptpSyntaxError
from sumo_cq.formula import (EQUAL, And, Atom, Constant, Exists, Forall, Function, Iff, Implies,
                             Not, Or, Variable, free_variables, map_symbols, symbols,
                             term_variables)
from sumo_cq.util import read_json

logger = logging.getLogger(__name__)

_LOWER_WORD = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_NON_IDENT = re.compile(r"[^A-Za-z0-9_]")
NATIVE_PREDICATES = ("$true", "$false")
ROLES = ("axiom", "hypothesis", "definition", "assumption", "lemma", "theorem", "corollary",
         "conjecture", "negated_conjecture", "plain", "unknown")


def sanitize(symbol):
    return _NON_IDENT.sub("_", symbol)


@dataclass(frozen=True)
class SymbolMap:
    """Source symbol -> TPTP identifier.

    Symbols missing from `table` fall back to the prefix rule: `$name` becomes
    `<meta_prefix>name`, anything else `<ontology_prefix>name`, with
    non-identifier characters replaced by `_`.
    """
    table: Tuple[Tuple[str, str], ...] = ()
    ontology_prefix: str = "s__"
    meta_prefix: str = "d__"
    _forward: Dict[str, str] = field(default=None, init=False, repr=False, compare=False)
    _backward: Dict[str, str] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        forward, backward = {}, {}
        for source, target in self.table:
            if not _LOWER_WORD.match(target):
                raise SymbolCollisionError(target, source, "<not a TPTP lower word>")
            if target in backward and backward[target] != source:
                raise SymbolCollisionError(target, backward[target], source)
            forward[source] = target
            backward[target] = source
        object.__setattr__(self, "table", tuple(self.table))
        object.__setattr__(self, "_forward", forward)
        object.__setattr__(self, "_backward", backward)

    @classmethod
    def from_dict(cls, d):
        return cls(table=tuple((k, v) for k, v in d.get("table", {}).items()),
                   ontology_prefix=d.get("ontology_prefix", "s__"),
                   meta_prefix=d.get("meta_prefix", "d__"))

    @classmethod
    def from_json(cls, path):
        return cls.from_dict(read_json(path))

    def resolve(self, symbol):
        if symbol in self._forward:
            return self._forward[symbol]
        if symbol.startswith("$"):
            return self.meta_prefix + sanitize(symbol[1:])
        return self.ontology_prefix + sanitize(symbol)

    def invert(self, target):
        if target in self._backward:
            return self._backward[target]
        if target.startswith(self.meta_prefix):
            return "$" + target[len(self.meta_prefix):]
        if target.startswith(self.ontology_prefix):
            return target[len(self.ontology_prefix):]
        return target

    def check_injective(self, source_symbols):
        """Returns target -> source, raising on the first collision."""
        seen = {}
        for s in source_symbols:
            if s == EQUAL or s in NATIVE_PREDICATES:
                continue
            t = self.resolve(s)
            if t in seen and seen[t] != s:
                raise SymbolCollisionError(t, seen[t], s)
            seen[t] = s
        return seen


def tptp_variable(v):
    name = sanitize(v.name)
    if not name[0].isalpha():
        name = "V" + name
    return name[0].upper() + name[1:]


def _variable_names(f, out):
    if isinstance(f, (Forall, Exists)):
        out.update(f.variables)
    if isinstance(f, Atom):
        for a in f.args:
            out.update(term_variables(a))
        return
    for c in _children(f):
        _variable_names(c, out)


def _children(f):
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.operands
    if isinstance(f, (Implies, Iff)):
        return f.left, f.right
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    return ()


class _Emitter:
    def __init__(self, symbol_map, f):
        self.map = symbol_map
        variables = set()
        _variable_names(f, variables)
        self.vars = {}
        taken = {}
        for v in sorted(variables, key=lambda v: v.name):
            name = tptp_variable(v)
            if name in taken:
                raise SymbolCollisionError(name, f"?{taken[name].name}", f"?{v.name}")
            taken[name] = v
            self.vars[v] = name

    def term(self, t):
        if isinstance(t, Variable):
            return self.vars[t]
        if isinstance(t, Constant):
            return self.map.resolve(t.name)
        return f"{self.map.resolve(t.name)}({','.join(self.term(a) for a in t.args)})"

    def formula(self, f, top=False):
        if isinstance(f, Atom):
            if f.predicate == EQUAL:
                s = f"{self.term(f.args[0])} = {self.term(f.args[1])}"
                return s if top else f"({s})"
            name = f.predicate if f.predicate in NATIVE_PREDICATES else self.map.resolve(f.predicate)
            if not f.args:
                return name
            return f"{name}({','.join(self.term(a) for a in f.args)})"
        if isinstance(f, Not):
            return "~ " + self.formula(f.body)
        if isinstance(f, And):
            return "(" + " & ".join(self.formula(o) for o in f.operands) + ")"
        if isinstance(f, Or):
            return "(" + " | ".join(self.formula(o) for o in f.operands) + ")"
        if isinstance(f, Implies):
            return f"({self.formula(f.left)} => {self.formula(f.right)})"
        if isinstance(f, Iff):
            return f"({self.formula(f.left)} <=> {self.formula(f.right)})"
        q = "!" if isinstance(f, Forall) else "?"
        bound = ",".join(self.vars[v] for v in f.variables)
        return f"{q} [{bound}] : {self.formula(f.body)}"


def check_name(name):
    if not (_LOWER_WORD.match(name) or name.isdigit()):
        raise FormulaError(f"{name!r} is not a valid TPTP formula name")


def emit_tptp(name, role, f, symbol_map):
    check_name(name)
    if role not in ROLES:
        raise FormulaError(f"unknown TPTP role {role!r}")
    symbol_map.check_injective(symbols(f))
    return f"fof({name}, {role}, {_Emitter(symbol_map, f).formula(f, top=True)})."


def problem_text(name, conjecture, symbol_map, include, header=()):
    lines = [f"% {h}" for h in header]
    lines.append(f"include('{include}').")
    lines.append(emit_tptp(name, "conjecture", conjecture, symbol_map))
    return "\n".join(lines) + "\n"


def unmap_formula(f, symbol_map):
    return map_symbols(f, symbol_map.invert)


# parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<block>/\*.*?\*/)
  | (?P<squote>'(?:[^'\\]|\\.)*')
  | (?P<dquote>"(?:[^"\\]|\\.)*")
  | (?P<op><~>|<=>|=>|<=|~\||~&|!=|:=|-->|!!|\?\?|!>|\?\*|@\+|@-|[()\[\],.:!?~&|=^@*>+<-])
  | (?P<number>[0-9]+(?:/[0-9]+|\.[0-9]+(?:[Ee][+-]?[0-9]+)?)?)
  | (?P<word>\$\$?[A-Za-z_][A-Za-z0-9_]*|[A-Za-z][A-Za-z0-9_]*)
  | (?P<bad>.)
""", re.VERBOSE | re.DOTALL)

_HIGHER_ORDER = {"^", "@", "!!", "??", ":=", "-->", "!>", "?*", "@+", "@-", "*", ">", "+", "<", "-"}
_BINARY = {"=>", "<=", "<=>", "<~>", "~|", "~&"}
_UNSUPPORTED_LANGUAGES = {"tff", "thf", "tcf", "tpi"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class TptpRecord:
    name: str
    role: str
    formula: object
    line: int
    language: str = "fof"


def tokenize(text, path=None):
    tokens = []
    line, line_start, last = 1, 0, 0
    for m in _TOKEN.finditer(text):
        start = m.start()
        nl = text.count("\n", last, start)
        if nl:
            line += nl
            line_start = text.rfind("\n", 0, start) + 1
        last = start
        kind = m.lastgroup
        if kind == "bad":
            raise TptpSyntaxError(f"unexpected character {m.group()!r}", path, line, start - line_start + 1)
        if kind not in ("ws", "comment", "block"):
            tokens.append(Token(kind, m.group(), line, start - line_start + 1))
        # multi-line tokens move the line counter
        inner = m.group().count("\n")
        if inner:
            line += inner
            line_start = m.start() + m.group().rfind("\n") + 1
            last = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, path):
        self.tokens = tokens
        self.pos = 0
        self.path = path

    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def error(self, message, tok=None):
        tok = tok or self.peek() or (self.tokens[-1] if self.tokens else None)
        if tok is None:
            raise TptpSyntaxError(message, self.path)
        raise TptpSyntaxError(message, self.path, tok.line, tok.column)

    def next(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def at(self, *texts):
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text in texts

    def unsupported(self, tok):
        self.error(f"unsupported construct {tok.text!r}", tok)

    # records

    def records(self):
        out, includes = [], []
        while self.peek() is not None:
            start = self.next()
            if start.kind != "word":
                self.error(f"expected an annotated formula, found {start.text!r}", start)
            if start.text == "include":
                self.expect("(")
                target = self.next()
                if target.kind != "squote":
                    self.error("include expects a quoted file name", target)
                self.skip_until_close()
                self.expect(".")
                includes.append(target.text[1:-1])
                continue
            if start.text in _UNSUPPORTED_LANGUAGES:
                self.error(f"unsupported construct: {start.text} records", start)
            if start.text not in ("fof", "cnf"):
                self.error(f"unknown record type {start.text!r}", start)
            out.append(self.record(start))
        return out, includes

    def record(self, start):
        self.expect("(")
        name = self.next()
        if name.kind not in ("word", "squote", "number"):
            self.error(f"bad formula name {name.text!r}", name)
        self.expect(",")
        role = self.next()
        if role.kind != "word":
            self.error(f"bad role {role.text!r}", role)
        self.expect(",")
        f = self.formula()
        if start.text == "cnf":
            free = sorted(free_variables(f), key=lambda v: v.name)
            if free:
                f = Forall(free, f)
        if self.at(","):
            self.next()
            self.skip_until_close()
        else:
            self.expect(")")
        self.expect(".")
        return TptpRecord(name.text, role.text, f, start.line, start.text)

    def skip_until_close(self):
        depth = 0
        while True:
            tok = self.next()
            if tok.kind == "op" and tok.text in ("(", "["):
                depth += 1
            elif tok.kind == "op" and tok.text in (")", "]"):
                if depth == 0:
                    if tok.text != ")":
                        self.error("unbalanced ']'", tok)
                    return
                depth -= 1

    # formulas

    def formula(self):
        left = self.unit()
        if self.at("&", "|"):
            op = self.peek().text
            operands = [left]
            while self.at(op):
                self.next()
                operands.append(self.unit())
            if self.at("&", "|") or self.peek_binary():
                self.error("mixed connectives need parentheses")
            return And(*operands) if op == "&" else Or(*operands)
        if self.peek_binary():
            op = self.next().text
            right = self.unit()
            if op == "=>":
                return Implies(left, right)
            if op == "<=":
                return Implies(right, left)
            if op == "<=>":
                return Iff(left, right)
            if op == "<~>":
                return Not(Iff(left, right))
            if op == "~|":
                return Not(Or(left, right))
            return Not(And(left, right))
        return left

    def peek_binary(self):
        return self.at(*_BINARY)

    def unit(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        if tok.kind == "op":
            if tok.text == "(":
                self.next()
                f = self.formula()
                self.expect(")")
                return f
            if tok.text == "~":
                self.next()
                return Not(self.unit())
            if tok.text in ("!", "?"):
                return self.quantified()
            if tok.text in _HIGHER_ORDER:
                self.unsupported(tok)
            self.error(f"unexpected {tok.text!r}", tok)
        return self.atomic()

    def quantified(self):
        q = self.next().text
        self.expect("[")
        variables = []
        while True:
            v = self.next()
            if v.kind != "word" or not v.text[0].isupper():
                self.error(f"expected a variable, found {v.text!r}", v)
            variables.append(Variable(v.text))
            if self.at(":"):
                self.unsupported(self.peek())
            if self.at(","):
                self.next()
                continue
            self.expect("]")
            break
        self.expect(":")
        body = self.unit()
        try:
            return (Forall if q == "!" else Exists)(variables, body)
        except FormulaError as e:
            self.error(str(e))

    def atomic(self):
        tok = self.peek()
        if tok.kind == "word" and tok.text in NATIVE_PREDICATES:
            self.next()
            return Atom(tok.text)
        left = self.term()
        if self.at("=", "!="):
            op = self.next().text
            right = self.term()
            eq = Atom(EQUAL, left, right)
            return eq if op == "=" else Not(eq)
        if isinstance(left, Variable):
            self.error(f"variable {left.name} used as a formula", tok)
        if isinstance(left, Constant):
            return Atom(left.name)
        return Atom(left.name, *left.args)

    def term(self):
        tok = self.next()
        if tok.kind == "word" and tok.text[0].isupper():
            return Variable(tok.text)
        if tok.kind in ("word", "squote", "number", "dquote"):
            if self.at("("):
                self.next()
                args = [self.term()]
                while self.at(","):
                    self.next()
                    args.append(self.term())
                self.expect(")")
                return Function(tok.text, *args)
            return Constant(tok.text)
        if tok.kind == "op" and tok.text in _HIGHER_ORDER:
            self.unsupported(tok)
        self.error(f"expected a term, found {tok.text!r}", tok)


def parse_tptp(text, path=None, with_includes=False):
    """Parses fof (and cnf) records. Include directives are returned
    separately when `with_includes` is set and otherwise dropped."""
    records, includes = _Parser(tokenize(text, path), path).records()
    if includes:
        logger.debug(f"{path or '<text>'}: skipped includes {includes}")
    if with_includes:
        return records, includes
    return records
