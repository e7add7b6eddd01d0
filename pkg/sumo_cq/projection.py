"""Lifting the raw mapping onto the core of the ontology.

A synset mapped to a concept outside the core is re-mapped to the most
specific core concepts above it, e.g. frying=Frying becomes frying+Cooking.
"""
import collections
import functools
import logging
import multiprocessing.pool
from dataclasses import asdict, dataclass, field
from typing import Dict, FrozenSet, List

import networkx as nx

from sumo_cq.errors import InputFormatError, ProjectionError
from sumo_cq.mapping import MappingEntry, MappingRelation
from sumo_cq.taxonomy import ORDER_RELATIONS, TOP
from sumo_cq.util import read_json, timer, write_json, write_text
from sumo_cq.wordnet import SynsetId

logger = logging.getLogger(__name__)

PROJECTION_FORMAT = 1

# figures for the official 3.0 database and mapping against the Adimen-SUMO core
REFERENCE_STATS = {
    "non_core_concepts": 24906,
    "multiple_supers": 14472,
    "single_super": 10434,
    "dangling": 113,
    "entity_fallback_synsets": 4700,
    "multi_mapped_synsets": {"noun": 1104, "verb": 2},
}


class Taxonomy:
    """Upward views over the taxonomy facts.

    Edges point from child to parent, so networkx "descendants" are the
    taxonomic ancestors.
    """

    def __init__(self, facts=()):
        self.order = nx.DiGraph()
        self.subclass = nx.DiGraph()
        self.instance_of = collections.defaultdict(set)
        for fact in facts:
            if fact.relation in ORDER_RELATIONS:
                self.order.add_edge(fact.child, fact.parent)
                if fact.relation == "subclass":
                    self.subclass.add_edge(fact.child, fact.parent)
            elif fact.relation == "instance":
                self.instance_of[fact.child].add(fact.parent)
        self._supers = {}

    def __contains__(self, concept):
        return concept in self.order or concept in self.instance_of

    def supers(self, concept) -> FrozenSet[str]:
        """Strict super-concepts: the transitive closure over subclass,
        subrelation and subAttribute, plus one instance hop from any of those
        followed by subclass closure."""
        cached = self._supers.get(concept)
        if cached is not None:
            return cached

        up = set(nx.descendants(self.order, concept)) if concept in self.order else set()
        through_instance = set()
        for node in up | {concept}:
            for cls in self.instance_of.get(node, ()):
                through_instance.add(cls)
                if cls in self.subclass:
                    through_instance |= nx.descendants(self.subclass, cls)

        result = frozenset((up | through_instance) - {concept})
        self._supers[concept] = result
        return result

    def cycles(self, limit=100):
        found = []
        for cycle in nx.simple_cycles(self.order):
            found.append(sorted(cycle))
            if len(found) >= limit:
                break
        return sorted(found)


def most_specific_core_supers(concept, taxonomy, core):
    if concept in core:
        return {concept}

    candidates = taxonomy.supers(concept) & set(core)
    minimal = set()
    for c in candidates:
        dominated = False
        for d in candidates:
            if d == c or c not in taxonomy.supers(d):
                continue
            # on a cycle both are supers of each other; keep the smaller name
            if d not in taxonomy.supers(c) or d < c:
                dominated = True
                break
        if not dominated:
            minimal.add(c)
    return minimal


@dataclass
class ProjectionStats:
    non_core_concepts: int = 0
    multiple_supers: int = 0
    single_super: int = 0
    dangling: int = 0
    entity_fallback_synsets: int = 0
    multi_mapped_synsets: Dict[str, int] = field(default_factory=dict)
    dangling_concepts: List[str] = field(default_factory=list)
    cycles: List[List[str]] = field(default_factory=list)


@dataclass
class ProjectedMapping:
    mapping: Dict[SynsetId, List[MappingEntry]]
    stats: ProjectionStats

    def to_json(self):
        return {
            "format": "sumo-cq-projection",
            "version": PROJECTION_FORMAT,
            "mapping": {str(sid): [e.to_json() for e in entries] for sid, entries in self.mapping.items()},
            "stats": asdict(self.stats),
        }

    @classmethod
    def from_json(cls, d):
        if d.get("format") != "sumo-cq-projection" or d.get("version") != PROJECTION_FORMAT:
            raise InputFormatError(f"unsupported projection format {d.get('format')} v{d.get('version')}")
        return cls({SynsetId.parse(k): [MappingEntry.from_json(e) for e in v] for k, v in d["mapping"].items()},
                   ProjectionStats(**d["stats"]))

    def save(self, path):
        write_json(path, self.to_json())

    @classmethod
    def load(cls, path):
        return cls.from_json(read_json(path))


def _lift(entry, supers):
    relation = MappingRelation.SUBSUMPTION if entry.relation is MappingRelation.EQUIVALENCE else entry.relation
    return [MappingEntry(s, relation) for s in sorted(supers)]


def project_mapping(raw, taxonomy, core, synsets=None, parallelism=1):
    """Re-maps every synset onto core concepts (or Entity).

    `synsets` optionally names the full synset universe, so that synsets with
    no mapping line at all fall back to Entity as well. Positions for the
    per-part-of-speech counters come from it when given as a dict of Synset.
    """
    start = timer()
    core = frozenset(core) | {TOP}
    stats = ProjectionStats()

    non_core = sorted({e.concept for entries in raw.values() for e in entries if e.concept not in core})
    for sid, entries in raw.items():
        for e in entries:
            if e.relation.is_complement and e.concept not in core:
                raise ProjectionError(f"{sid}: complement mapping {e} on non-core concept {e.concept}")

    closure = functools.partial(most_specific_core_supers, taxonomy=taxonomy, core=core)
    if parallelism > 1 and len(non_core) > 1:
        with multiprocessing.pool.ThreadPool(parallelism) as p:
            lifted = dict(zip(non_core, p.map(closure, non_core)))
    else:
        lifted = {c: closure(c) for c in non_core}

    stats.non_core_concepts = len(non_core)
    for concept in non_core:
        n = len(lifted[concept])
        if n > 1:
            stats.multiple_supers += 1
        elif n == 1:
            stats.single_super += 1
        else:
            stats.dangling += 1
            stats.dangling_concepts.append(concept)

    universe = set(raw)
    if synsets is not None:
        universe |= set(synsets)

    projected = {}
    multi = collections.Counter()
    for sid in sorted(universe):
        out = []
        for e in raw.get(sid, ()):
            replacement = [e] if e.concept in core else _lift(e, lifted[e.concept])
            for r in replacement:
                if r not in out:
                    out.append(r)
        if not out:
            out = [MappingEntry(TOP, MappingRelation.SUBSUMPTION)]
            stats.entity_fallback_synsets += 1
        out.sort(key=lambda e: (e.concept, e.relation.value))
        projected[sid] = out
        if len(out) > 1:
            pos = synsets[sid].pos if isinstance(synsets, dict) and sid in synsets else sid.pos
            multi[pos] += 1

    stats.multi_mapped_synsets = dict(sorted(multi.items()))
    stats.cycles = taxonomy.cycles()
    if stats.cycles:
        logger.warning(f"taxonomy contains {len(stats.cycles)} cycles, e.g. {stats.cycles[0]}")
    logger.info(f"projected {len(projected)} synsets, {stats.non_core_concepts} non-core concepts, "
                f"{stats.entity_fallback_synsets} sent to {TOP} in {timer(start):.06}s")
    return ProjectedMapping(projected, stats)


def projection_rows(stats, reference=None):
    rows = [
        ("non_core_concepts", stats.non_core_concepts),
        ("multiple_supers", stats.multiple_supers),
        ("single_super", stats.single_super),
        ("dangling", stats.dangling),
        ("entity_fallback_synsets", stats.entity_fallback_synsets),
    ]
    for pos, n in sorted(stats.multi_mapped_synsets.items()):
        rows.append((f"multi_mapped_synsets.{pos}", n))
    rows.append(("cycles", len(stats.cycles)))

    if reference is None:
        return [(name, value, "") for name, value in rows]
    flat = dict(reference)
    for pos, n in flat.pop("multi_mapped_synsets", {}).items():
        flat[f"multi_mapped_synsets.{pos}"] = n
    return [(name, value, flat.get(name, "")) for name, value in rows]


def write_projection_report(stats, text_path, table_path, reference=None):
    rows = projection_rows(stats, reference)
    table = "statistic\tvalue\treference\n" + "".join(f"{n}\t{v}\t{r}\n" for n, v, r in rows)
    write_text(table_path, table)

    width = max(len(n) for n, _, _ in rows)
    lines = ["Mapping projection onto the core", ""]
    for n, v, r in rows:
        lines.append(f"  {n.ljust(width)}  {v:>8}" + (f"   (reference {r})" if r != "" else ""))
    if stats.dangling_concepts:
        lines += ["", f"Dangling concepts ({len(stats.dangling_concepts)}):"]
        lines += [f"  {c}" for c in stats.dangling_concepts]
    if stats.cycles:
        lines += ["", f"Taxonomy cycles ({len(stats.cycles)}):"]
        lines += ["  " + " -> ".join(c) for c in stats.cycles]
    write_text(text_path, "\n".join(lines) + "\n")
