"""Object-level statements for synsets: what it means for ?X to be
"something the synset denotes", given the concepts the synset is mapped to."""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional

from sumo_cq.errors import FormulaError, RelationMappedSynset
from sumo_cq.formula import (ATTRIBUTE, INSTANCE, And, Atom, Constant, Exists, Not, Variable,
                             canonical_key, equal, free_variables)
from sumo_cq.mapping import MappingEntry, MappingRelation
from sumo_cq.taxonomy import ConceptKind

X = Variable("X")
Y = Variable("Y")
Z = Variable("Z")


@dataclass(frozen=True)
class KindedEntry:
    concept: str
    relation: MappingRelation
    kind: ConceptKind


@dataclass(frozen=True)
class Statement:
    formula: object
    variable: Variable
    relations_used: FrozenSet[MappingRelation]
    kinds_used: FrozenSet[ConceptKind]


def fresh_variable(avoid, base="Z"):
    taken = {v.name for v in avoid}
    if base not in taken:
        return Variable(base)
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return Variable(f"{base}{i}")


def object_statement(entry, var, attribute_overrides=None, avoid=()):
    """The statement that `var` is something `entry` describes.

    `attribute_overrides` maps attribute concepts to the predicate used in
    place of `attribute` (e.g. `property`).
    """
    if entry.kind.is_relation:
        raise RelationMappedSynset(entry.concept)

    c = Constant(entry.concept)
    predicate = (attribute_overrides or {}).get(entry.concept, ATTRIBUTE)
    if entry.kind is ConceptKind.OBJECT:
        f = equal(var, c)
    elif entry.kind is ConceptKind.CLASS:
        f = Atom(INSTANCE, var, c)
    elif entry.kind is ConceptKind.INDIVIDUAL_ATTRIBUTE:
        f = Atom(predicate, var, c)
    else:
        z = fresh_variable(set(avoid) | {var})
        f = Exists(z, And(Atom(INSTANCE, z, c), Atom(predicate, var, z)))

    if entry.relation.is_complement:
        f = Not(f)
    return f


def kinded(entries: Iterable[MappingEntry], kinds, default=ConceptKind.OBJECT):
    return [KindedEntry(e.concept, e.relation, kinds.get(e.concept, default)) for e in entries]


def synset_statement(entries, var, attribute_overrides=None, avoid=(), provenance=None):
    """Conjunction of the object statements of all entries, sharing `var`.

    Identical conjuncts (e.g. `=` and `+` on the same class) are kept once.
    """
    entries = list(entries)
    if not entries:
        raise FormulaError(f"synset statement without mapping entries ({provenance})")
    for e in entries:
        if e.kind.is_relation:
            raise RelationMappedSynset(e.concept, provenance)

    parts, seen = [], set()
    for e in entries:
        f = object_statement(e, var, attribute_overrides, avoid)
        key = canonical_key(f)
        if key not in seen:
            seen.add(key)
            parts.append(f)

    formula = parts[0] if len(parts) == 1 else And(*parts)
    assert free_variables(formula) == {var}
    return Statement(formula, var, frozenset(e.relation for e in entries), frozenset(e.kind for e in entries))


def routing_relation(entries) -> Optional[MappingRelation]:
    """Strongest base relation present: Equivalence > Instance > Subsumption.
    Complements count as their base relation."""
    relations = [e.relation.base for e in entries]
    if not relations:
        return None
    return max(relations, key=lambda r: r.strength)


def is_equivalence_side(entries):
    return routing_relation(entries) is MappingRelation.EQUIVALENCE
