import pytest

from sumo_cq.errors import KifSyntaxError
from sumo_cq.formula import And, Atom, Constant, Exists, Forall, Function, Implies, Not, Or, Variable, equal
from sumo_cq.kif import KifString, emit_suo_kif, parse_suo_kif, read_sexprs

X, Y = Variable("X"), Variable("Y")


def test_read_sexprs_tracks_lines_and_strings():
    text = ';; header\n(subclass Horse Animal)\n\n(documentation Horse EnglishLanguage "A (big) \\"animal\\"")\n'
    exprs = list(read_sexprs(text))
    assert exprs[0] == (["subclass", "Horse", "Animal"], 2)
    doc, line = exprs[1]
    assert line == 4
    assert isinstance(doc[3], KifString)
    assert doc[3].startswith('"A (big)')


@pytest.mark.parametrize("text,message", [
    ("(subclass Horse Animal", "never closed"),
    ("(subclass Horse Animal))", "unbalanced"),
    ('(documentation Horse "open', "unterminated"),
])
def test_read_sexprs_errors(text, message):
    with pytest.raises(KifSyntaxError, match=message):
        list(read_sexprs(text, "t.kif"))


def test_parse_quantified_formula():
    f = parse_suo_kif("(forall (?X ?Y) (=> (and ($instance ?X Birth) ($instance ?Y Death)) (not (equal ?X ?Y))))")
    assert f == Forall((X, Y), Implies(And(Atom("$instance", X, Constant("Birth")),
                                            Atom("$instance", Y, Constant("Death"))),
                                        Not(equal(X, Y))))


def test_parse_function_terms_and_disjunction():
    f = parse_suo_kif("(or (p (f ?X a)) (q b))")
    assert f == Or(Atom("p", Function("f", X, Constant("a"))), Atom("q", Constant("b")))


def test_single_operand_and_collapses():
    assert parse_suo_kif("(and (p a))") == Atom("p", Constant("a"))


@pytest.mark.parametrize("text,message", [
    ("(p a) (q b)", "expected one expression"),
    ("(forall ?X (p ?X))", "malformed quantifier"),
    ("(exists (a) (p a))", "non-variable"),
    ("(not (p a) (q a))", "one argument"),
    ("(=> (p a))", "two arguments"),
    ("(p @ROW)", "row variable"),
    ("((p a) b)", "compound head"),
    ("?X", "not a formula"),
])
def test_parse_errors(text, message):
    with pytest.raises(KifSyntaxError, match=message):
        parse_suo_kif(text)


def test_parse_error_carries_position():
    with pytest.raises(KifSyntaxError) as e:
        parse_suo_kif("\n\n(forall ?X (p ?X))", "corpus.jsonl")
    assert e.value.path == "corpus.jsonl"
    assert e.value.line == 3


@pytest.mark.parametrize("text", [
    "(exists (?X) (and ($instance ?X ExplosiveDevice) ($instance ?X Weapon)))",
    "(equal Death Killing)",
    "($subclass Repairing Pretending)",
    "(forall (?X ?Y) (=> (and ($instance ?X Birth) ($instance ?Y Death)) (not (equal ?X ?Y))))",
    "(and (forall (?X) (=> ($instance ?X EducationalProcess) (exists (?Y) (and (attribute ?Y Teacher) "
    "(agent ?X ?Y))))) (forall (?Y) (=> (attribute ?Y Teacher) (exists (?X) (and ($instance ?X "
    "EducationalProcess) (agent ?X ?Y))))))",
    "(<=> (p (f ?X)) (q ?X))",
])
def test_emit_reproduces_canonical_text(text):
    assert emit_suo_kif(parse_suo_kif(text)) == text


def test_pretty_emission_parses_back():
    f = parse_suo_kif("(exists (?X ?Y) (and ($instance ?X Planning) ($instance ?Y Plan) (result ?X ?Y)))")
    pretty = emit_suo_kif(f, pretty=True, width=30)
    assert "\n" in pretty
    assert max(len(line) for line in pretty.splitlines()) <= 45
    assert parse_suo_kif(pretty) == f


def test_emit_nullary_atom():
    assert emit_suo_kif(Not(Atom("raining"))) == "(not raining)"
    assert emit_suo_kif(Exists(X, Atom("p", X))) == "(exists (?X) (p ?X))"
