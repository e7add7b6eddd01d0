"""Question patterns: turning mapping information and lexical relations into
problems, each a truth-test conjecture together with its negation."""
import collections
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from sumo_cq.errors import CorpusError, RelationMappedSynset
from sumo_cq.formula import (SUBCLASS, And, Atom, Constant, Exists, Forall, Implies, Not, canonical_key,
                             equal, free_variables, negate)
from sumo_cq.mapping import MappingRelation
from sumo_cq.statements import X, Y, is_equivalence_side, kinded, routing_relation, synset_statement
from sumo_cq.taxonomy import ConceptKind
from sumo_cq.wordnet import LinkKind

logger = logging.getLogger(__name__)


class Category(str, Enum):
    MULTIPLE_MAPPING = "MultipleMapping"
    EVENT1 = "Event1"
    EVENT2 = "Event2"
    EVENT3 = "Event3"
    ANTONYM1 = "Antonym1"
    ANTONYM2 = "Antonym2"
    ANTONYM3 = "Antonym3"
    AGENT = "Agent"
    INSTRUMENT = "Instrument"
    RESULT = "Result"

    @property
    def prefix(self):
        return _PREFIX[self]

    @property
    def group(self):
        return "Mapping" if self in MAPPING_CATEGORIES else "Competency"

    @property
    def label(self):
        return _LABEL[self]


MAPPING_CATEGORIES = (Category.MULTIPLE_MAPPING, Category.EVENT1, Category.EVENT2, Category.EVENT3)
COMPETENCY_CATEGORIES = (Category.ANTONYM1, Category.ANTONYM2, Category.ANTONYM3,
                         Category.AGENT, Category.INSTRUMENT, Category.RESULT)
CATEGORY_ORDER = MAPPING_CATEGORIES + COMPETENCY_CATEGORIES

_PREFIX = {
    Category.MULTIPLE_MAPPING: "mm",
    Category.EVENT1: "ev1",
    Category.EVENT2: "ev2",
    Category.EVENT3: "ev3",
    Category.ANTONYM1: "an1",
    Category.ANTONYM2: "an2",
    Category.ANTONYM3: "an3",
    Category.AGENT: "ag",
    Category.INSTRUMENT: "in",
    Category.RESULT: "re",
}

_LABEL = {
    Category.MULTIPLE_MAPPING: "Multiple Mapping",
    Category.EVENT1: "Event #1",
    Category.EVENT2: "Event #2",
    Category.EVENT3: "Event #3",
    Category.ANTONYM1: "Antonym #1",
    Category.ANTONYM2: "Antonym #2",
    Category.ANTONYM3: "Antonym #3",
    Category.AGENT: "Agent",
    Category.INSTRUMENT: "Instrument",
    Category.RESULT: "Result",
}

PROCESS_CATEGORY = {
    LinkKind.AGENT: Category.AGENT,
    LinkKind.INSTRUMENT: Category.INSTRUMENT,
    LinkKind.RESULT: Category.RESULT,
}


@dataclass
class Problem:
    category: Category
    truth_test: object
    provenance: dict
    pattern: Optional[str] = None
    id: Optional[str] = None
    collapsed_from: int = 1
    falsity_test: object = None
    key: bytes = field(default=None, repr=False)

    def __post_init__(self):
        if free_variables(self.truth_test):
            raise CorpusError(f"{self.category.value} truth-test is not closed: {self.truth_test}")
        if self.falsity_test is None:
            self.falsity_test = negate(self.truth_test)
        if self.key is None:
            self.key = canonical_key(self.truth_test)


def _provenance(sources, projected, link=None, routing=None):
    first = sources[0]
    return {
        "link": link.value if link is not None else None,
        "mapping": {str(sid): [str(e) for e in projected[sid]] for sid in first},
        "routing": routing,
        "sources": [[str(sid) for sid in s] for s in sources],
    }


def deduplicate(candidates, counters=None):
    """Collapses problems whose truth-tests share a canonical key, keeping the
    first and counting the rest into `collapsed_from`."""
    by_key = {}
    for p in candidates:
        kept = by_key.get(p.key)
        if kept is None:
            by_key[p.key] = p
            continue
        if kept.category is not p.category:
            raise CorpusError(f"{kept.category.value} and {p.category.value} problems share the conjecture "
                              f"{p.truth_test}")
        kept.collapsed_from += p.collapsed_from
        kept.provenance["sources"].extend(p.provenance["sources"])
    if counters is not None:
        counters["collapsed"] += len(candidates) - len(by_key)
    return list(by_key.values())


def _side(entries, kinds):
    return kinded(entries, kinds)


def generate_multiple_mapping(projected, kinds, attribute_overrides=None, counters=None):
    counters = counters if counters is not None else collections.Counter()
    candidates = []
    for sid, entries in sorted(projected.items()):
        if len(entries) < 2:
            continue
        counters["multi_mapped_synsets"] += 1
        try:
            st = synset_statement(_side(entries, kinds), X, attribute_overrides, provenance=str(sid))
        except RelationMappedSynset as e:
            logger.debug(f"multiple mapping: {sid} skipped, {e}")
            counters["relation_mapped"] += 1
            continue
        candidates.append(Problem(Category.MULTIPLE_MAPPING, Exists(X, st.formula),
                                  _provenance([(sid,)], projected)))

    problems = deduplicate(candidates, counters)
    counters["problems"] += len(problems)
    return problems


def _event_category(verb_equivalent, noun_equivalent):
    if verb_equivalent and noun_equivalent:
        return Category.EVENT1
    if verb_equivalent or noun_equivalent:
        return Category.EVENT2
    return Category.EVENT3


def generate_event(event_links, projected, kinds, counters=None):
    """Event pairs name the same process as a verb and as a noun; their
    classes should coincide, or at least one include the other, or at least
    share a subclass."""
    counters = counters if counters is not None else collections.Counter()
    candidates = []
    for link in sorted(event_links):
        counters["pairs"] += 1
        verb, noun = projected.get(link.source), projected.get(link.target)
        if verb is None or noun is None:
            counters["unprojected"] += 1
            continue
        if {e.concept for e in verb} == {e.concept for e in noun}:
            counters["equal_mapped"] += 1
            continue
        kv, kn = _side(verb, kinds), _side(noun, kinds)
        if any(e.kind is not ConceptKind.CLASS for e in kv + kn):
            counters["non_class"] += 1
            continue
        if any(e.relation.is_complement for e in kv + kn):
            counters["complement"] += 1
            continue

        # pairs are partitioned by the strongest relation of each side,
        # problems by the relations of the concepts actually chosen
        counters[f"pairs_{_event_category(is_equivalence_side(kv), is_equivalence_side(kn)).value}"] += 1
        routing = f"verb {routing_relation(kv).value} / noun {routing_relation(kn).value}"

        for ev in kv:
            for en in kn:
                if ev.concept == en.concept:
                    counters["same_concept_choices"] += 1
                    continue
                v_eq = ev.relation.base is MappingRelation.EQUIVALENCE
                n_eq = en.relation.base is MappingRelation.EQUIVALENCE
                category = _event_category(v_eq, n_eq)
                cv, cn = Constant(ev.concept), Constant(en.concept)
                if category is Category.EVENT1:
                    f = equal(cv, cn)
                elif category is Category.EVENT2:
                    eq, other = (cv, cn) if v_eq else (cn, cv)
                    f = Atom(SUBCLASS, eq, other)
                else:
                    f = Exists(X, And(Atom(SUBCLASS, X, cv), Atom(SUBCLASS, X, cn)))
                candidates.append(Problem(category, f, _provenance([(link.source, link.target)], projected,
                                                                   link.kind, routing)))

    problems = deduplicate(candidates, counters)
    for p in problems:
        counters[p.category.value] += 1
    return problems


def expand_antonym_pairs(antonym_links, similar_links, synsets=None):
    """Antonymy carries over to the satellites of both antonyms.

    Returns unordered pairs as (smaller id, larger id). When `synsets` is
    given, only neighbours whose part of speech is `satellite` count as
    satellites.
    """
    neighbours = collections.defaultdict(set)
    for link in similar_links:
        neighbours[link.source].add(link.target)
        neighbours[link.target].add(link.source)

    def satellites(sid):
        found = neighbours.get(sid, set())
        if synsets is not None:
            found = {s for s in found if s in synsets and synsets[s].pos == "satellite"}
        return found

    pairs = set()
    for link in antonym_links:
        for a in {link.source} | satellites(link.source):
            for b in {link.target} | satellites(link.target):
                if a != b:
                    pairs.add((min(a, b), max(a, b)))
    return pairs


def _not_equal():
    return Not(equal(X, Y))


def generate_antonym(pairs, projected, kinds, attribute_overrides=None, counters=None):
    """Antonyms describe incompatible things: nothing is both.

    Equivalence-mapped sides are universally quantified, the others
    existentially; with one of each, the existential is outermost.
    """
    counters = counters if counters is not None else collections.Counter()
    candidates = []
    for a, b in sorted(pairs):
        counters["pairs"] += 1
        ea, eb = projected.get(a), projected.get(b)
        if ea is None or eb is None:
            counters["unprojected"] += 1
            continue
        ka, kb = _side(ea, kinds), _side(eb, kinds)
        if any(e.kind.is_relation for e in ka + kb):
            counters["relation_mapped"] += 1
            continue

        # mirrored pairs must produce the same conjecture
        sa = synset_statement(ka, X, attribute_overrides, avoid=(Y,))
        sb = synset_statement(kb, X, attribute_overrides, avoid=(Y,))
        if canonical_key(sb.formula) < canonical_key(sa.formula):
            a, b, ka, kb = b, a, kb, ka

        a_eq, b_eq = is_equivalence_side(ka), is_equivalence_side(kb)
        if a_eq and b_eq:
            category = Category.ANTONYM1
            s1 = synset_statement(ka, X, attribute_overrides, avoid=(Y,)).formula
            s2 = synset_statement(kb, Y, attribute_overrides, avoid=(X,)).formula
            f = Forall((X, Y), Implies(And(s1, s2), _not_equal()))
        elif a_eq or b_eq:
            category = Category.ANTONYM2
            sub, eq = (kb, ka) if a_eq else (ka, kb)
            s_sub = synset_statement(sub, X, attribute_overrides, avoid=(Y,)).formula
            s_eq = synset_statement(eq, Y, attribute_overrides, avoid=(X,)).formula
            f = Exists(X, And(s_sub, Forall(Y, Implies(s_eq, _not_equal()))))
        else:
            category = Category.ANTONYM3
            s1 = synset_statement(ka, X, attribute_overrides, avoid=(Y,)).formula
            s2 = synset_statement(kb, Y, attribute_overrides, avoid=(X,)).formula
            f = Exists((X, Y), And(s1, s2, _not_equal()))

        counters[f"pairs_{category.value}"] += 1
        routing = f"{routing_relation(ka).value} / {routing_relation(kb).value}"
        candidates.append(Problem(category, f, _provenance([(a, b)], projected, LinkKind.ANTONYM, routing)))

    problems = deduplicate(candidates, counters)
    for p in problems:
        counters[p.category.value] += 1
    return problems


def generate_process(links, projected, kinds, attribute_overrides=None, counters=None):
    """Agent, instrument and result pairs: the process the verb names has
    the noun's referent as its agent (instrument, result)."""
    counters = counters if counters is not None else collections.Counter()
    candidates = []
    for link in sorted(links):
        counters["pairs"] += 1
        verb, noun = projected.get(link.source), projected.get(link.target)
        if verb is None or noun is None:
            counters["unprojected"] += 1
            continue
        kv, kn = _side(verb, kinds), _side(noun, kinds)
        if any(e.kind.is_relation for e in kv + kn):
            counters["relation_mapped"] += 1
            continue
        if any(e.relation.is_complement for e in kv + kn):
            counters["complement"] += 1
            continue
        counters["retained"] += 1

        v = synset_statement(kv, X, attribute_overrides, avoid=(Y,)).formula
        n = synset_statement(kn, Y, attribute_overrides, avoid=(X,)).formula
        rel = Atom(link.kind.value, X, Y)
        forward = Forall(X, Implies(v, Exists(Y, And(n, rel))))
        backward = Forall(Y, Implies(n, Exists(X, And(v, rel))))

        v_eq, n_eq = is_equivalence_side(kv), is_equivalence_side(kn)
        if v_eq and n_eq:
            pattern, f = "P1", And(forward, backward)
        elif v_eq:
            pattern, f = "P2", forward
        elif n_eq:
            pattern, f = "P3", backward
        else:
            pattern, f = "P4", Exists((X, Y), And(v, n, rel))

        counters[f"pairs_{pattern}"] += 1
        routing = f"verb {routing_relation(kv).value} / noun {routing_relation(kn).value}"
        candidates.append(Problem(PROCESS_CATEGORY[link.kind], f,
                                  _provenance([(link.source, link.target)], projected, link.kind, routing),
                                  pattern=pattern))

    problems = deduplicate(candidates, counters)
    for p in problems:
        counters[p.category.value] += 1
        counters[p.pattern] += 1
    return problems
