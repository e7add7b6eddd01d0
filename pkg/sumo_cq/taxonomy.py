"""Taxonomy facts and concept kinds from SUO-KIF files."""
import collections
import logging
import multiprocessing.pool
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx
from smart_open import open

from sumo_cq.kif import KifString, read_sexprs

logger = logging.getLogger(__name__)

TAXONOMY_RELATIONS = ("instance", "subclass", "subrelation", "subAttribute")
ORDER_RELATIONS = ("subclass", "subrelation", "subAttribute")
TOP = "Entity"


class ConceptKind(str, Enum):
    OBJECT = "o"
    CLASS = "c"
    INDIVIDUAL_RELATION = "r"
    INDIVIDUAL_ATTRIBUTE = "a"
    CLASS_OF_RELATIONS = "R"
    CLASS_OF_ATTRIBUTES = "A"

    @property
    def is_relation(self):
        return self in (ConceptKind.INDIVIDUAL_RELATION, ConceptKind.CLASS_OF_RELATIONS)


# highest first
KIND_PRECEDENCE = (
    ConceptKind.INDIVIDUAL_RELATION,
    ConceptKind.INDIVIDUAL_ATTRIBUTE,
    ConceptKind.CLASS_OF_RELATIONS,
    ConceptKind.CLASS_OF_ATTRIBUTES,
    ConceptKind.CLASS,
    ConceptKind.OBJECT,
)


@dataclass(frozen=True, order=True)
class TaxonomyFact:
    relation: str
    child: str
    parent: str
    source_file: str = ""

    def to_json(self):
        return [self.relation, self.child, self.parent, self.source_file]

    @classmethod
    def from_json(cls, row):
        return cls(*row)


@dataclass
class TaxonomyData:
    facts: List[TaxonomyFact]
    kinds: Dict[str, ConceptKind]
    core: FrozenSet[str]
    ambiguous: List[Tuple[str, List[str]]] = field(default_factory=list)
    skipped: collections.Counter = field(default_factory=collections.Counter)
    self_loops: int = 0


def read_core_manifest(path):
    """One file name per line, `#` comments allowed; names resolve next to the manifest."""
    base = os.path.dirname(str(path))
    files = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if line:
                files.append(line if os.path.isabs(line) or "://" in line else os.path.join(base, line))
    return files


def parse_kif_facts(path):
    """Top-level taxonomy facts of one file, plus counters of what was skipped."""
    with open(path, "r", encoding="utf-8", errors="replace") as f:
        text = f.read()

    facts = []
    skipped = collections.Counter()
    self_loops = 0
    name = os.path.basename(str(path))

    for expr, line in read_sexprs(text, path):
        if not isinstance(expr, list) or not expr or isinstance(expr[0], list):
            skipped["<non-fact>"] += 1
            continue
        head = expr[0]
        if head not in TAXONOMY_RELATIONS:
            skipped[head if isinstance(head, str) else "<non-fact>"] += 1
            continue
        if len(expr) != 3 or not all(_is_symbol(e) for e in expr[1:]):
            skipped[f"{head}/non-ground"] += 1
            continue
        child, parent = expr[1], expr[2]
        if child == parent and head in ORDER_RELATIONS:
            logger.debug(f"{path}:{line}: self-loop ({head} {child} {parent}) dropped")
            self_loops += 1
            continue
        facts.append(TaxonomyFact(head, child, parent, name))

    return facts, skipped, self_loops


def _norm(path):
    path = str(path)
    return path if "://" in path else os.path.abspath(path)


def _is_symbol(e):
    return isinstance(e, str) and not isinstance(e, KifString) and not e.startswith(("?", "@"))


def _subclasses_of(graph, concept):
    """The concept and everything below it along subclass edges."""
    if concept not in graph:
        return {concept}
    return {concept} | nx.ancestors(graph, concept)


def assign_kinds(facts, extra_concepts=()):
    """Kind per concept by precedence r > a > R > A > c > o.

    Returns the kinds and the concepts for which more than one of r, a, R, A
    (or an individual kind together with a subclass fact) applied.
    """
    subclass = nx.DiGraph()
    instance_of = collections.defaultdict(set)
    in_subclass, in_subrelation, in_subattribute, instance_parents = set(), set(), set(), set()
    concepts = set(extra_concepts)

    for fact in facts:
        concepts.add(fact.child)
        concepts.add(fact.parent)
        if fact.relation == "subclass":
            subclass.add_edge(fact.child, fact.parent)
            in_subclass.update((fact.child, fact.parent))
        elif fact.relation == "instance":
            instance_of[fact.child].add(fact.parent)
            instance_parents.add(fact.parent)
        elif fact.relation == "subrelation":
            in_subrelation.update((fact.child, fact.parent))
        else:
            in_subattribute.update((fact.child, fact.parent))

    relation_classes = _subclasses_of(subclass, "Relation")
    attribute_classes = _subclasses_of(subclass, "Attribute")
    class_classes = _subclasses_of(subclass, "Class")

    kinds = {}
    ambiguous = []
    for concept in sorted(concepts):
        targets = instance_of.get(concept, ())
        candidates = set()
        if concept in in_subrelation or any(t in relation_classes for t in targets):
            candidates.add(ConceptKind.INDIVIDUAL_RELATION)
        if concept in in_subattribute or any(t in attribute_classes for t in targets):
            candidates.add(ConceptKind.INDIVIDUAL_ATTRIBUTE)
        if concept in relation_classes:
            candidates.add(ConceptKind.CLASS_OF_RELATIONS)
        if concept in attribute_classes:
            candidates.add(ConceptKind.CLASS_OF_ATTRIBUTES)
        if concept in in_subclass or concept in instance_parents or any(t in class_classes for t in targets):
            candidates.add(ConceptKind.CLASS)
        if concept == TOP:
            candidates.add(ConceptKind.CLASS)
        candidates.add(ConceptKind.OBJECT)

        kind = next(k for k in KIND_PRECEDENCE if k in candidates)
        kinds[concept] = kind

        specific = [k for k in KIND_PRECEDENCE[:4] if k in candidates]
        individual = {ConceptKind.INDIVIDUAL_RELATION, ConceptKind.INDIVIDUAL_ATTRIBUTE} & candidates
        if len(specific) > 1 or (individual and concept in in_subclass):
            ambiguous.append((concept, [k.value for k in KIND_PRECEDENCE if k in candidates
                                        and k is not ConceptKind.OBJECT]))

    if ambiguous:
        logger.warning(f"{len(ambiguous)} concepts with ambiguous kinds, e.g. {ambiguous[:3]}")
    return kinds, ambiguous


def parse_suo_kif_taxonomy(paths, core_paths, parallelism=4, extra_concepts=()):
    paths = [_norm(p) for p in paths]
    core_paths = [_norm(p) for p in core_paths]
    for p in core_paths:
        if p not in paths:
            paths.append(p)

    with multiprocessing.pool.ThreadPool(max(1, min(parallelism, len(paths) or 1))) as pool:
        parsed = pool.map(parse_kif_facts, paths)

    facts, skipped, self_loops = [], collections.Counter(), 0
    core = set()
    for path, (file_facts, file_skipped, file_loops) in zip(paths, parsed):
        facts.extend(file_facts)
        skipped.update(file_skipped)
        self_loops += file_loops
        if path in core_paths:
            for fact in file_facts:
                core.add(fact.child)
                core.add(fact.parent)

    # the same fact stated in two files is kept once, first file wins
    unique = {}
    for fact in facts:
        unique.setdefault((fact.relation, fact.child, fact.parent), fact)
    facts = sorted(unique.values(), key=lambda f: (f.relation, f.child, f.parent))

    kinds, ambiguous = assign_kinds(facts, extra_concepts)
    logger.info(f"taxonomy: {len(facts)} facts from {len(paths)} files, {len(core)} core concepts, "
                f"{sum(skipped.values())} other expressions skipped")
    return TaxonomyData(facts, kinds, frozenset(core), ambiguous, skipped, self_loops)
