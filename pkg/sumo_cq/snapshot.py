"""The knowledge snapshot: everything ingested, merged into one versioned file."""
import collections
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List

from sumo_cq.errors import InputFormatError
from sumo_cq.mapping import MappingEntry, apply_corrections, parse_mapping_files, suffix_table
from sumo_cq.morphosemantic import parse_morphosemantic_links
from sumo_cq.taxonomy import ConceptKind, TaxonomyFact, parse_suo_kif_taxonomy, read_core_manifest
from sumo_cq.util import exists, read_json, timer, write_json
from sumo_cq.wordnet import (DATA_FILES, LexicalLink, SenseIndex, Synset, SynsetId, parse_sense_index,
                             parse_wordnet_data)

logger = logging.getLogger(__name__)

SNAPSHOT_FORMAT = 1


@dataclass
class KnowledgeSnapshot:
    synsets: Dict[SynsetId, Synset]
    links: List[LexicalLink]
    mapping: Dict[SynsetId, List[MappingEntry]]
    facts: List[TaxonomyFact]
    kinds: Dict[str, ConceptKind]
    core: FrozenSet[str]
    unmapped: List[SynsetId] = field(default_factory=list)
    dangling: List[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def links_of(self, *kinds):
        return [link for link in self.links if link.kind in kinds]

    def to_json(self):
        return {
            "format": "sumo-cq-snapshot",
            "version": SNAPSHOT_FORMAT,
            "synsets": [s.to_json() for s in self.synsets.values()],
            "links": [link.to_json() for link in self.links],
            "mapping": {str(sid): [e.to_json() for e in entries] for sid, entries in self.mapping.items()},
            "facts": [f.to_json() for f in self.facts],
            "kinds": {c: k.value for c, k in self.kinds.items()},
            "core": sorted(self.core),
            "unmapped": [str(sid) for sid in self.unmapped],
            "dangling": list(self.dangling),
            "stats": self.stats,
        }

    @classmethod
    def from_json(cls, d):
        if d.get("format") != "sumo-cq-snapshot" or d.get("version") != SNAPSHOT_FORMAT:
            raise InputFormatError(f"unsupported snapshot format {d.get('format')} v{d.get('version')}")
        synsets = [Synset.from_json(s) for s in d["synsets"]]
        return cls(
            synsets={s.id: s for s in synsets},
            links=[LexicalLink.from_json(row) for row in d["links"]],
            mapping={SynsetId.parse(k): [MappingEntry.from_json(e) for e in v] for k, v in d["mapping"].items()},
            facts=[TaxonomyFact.from_json(row) for row in d["facts"]],
            kinds={c: ConceptKind(k) for c, k in d["kinds"].items()},
            core=frozenset(d["core"]),
            unmapped=[SynsetId.parse(s) for s in d["unmapped"]],
            dangling=list(d["dangling"]),
            stats=d.get("stats", {}),
        )

    def save(self, path):
        write_json(path, self.to_json())

    @classmethod
    def load(cls, path):
        return cls.from_json(read_json(path))


def _wordnet_paths(wordnet_dir):
    paths = {}
    for pos, name in DATA_FILES.items():
        path = os.path.join(wordnet_dir, name)
        if exists(path):
            paths[pos] = path
        else:
            logger.warning(f"{path} missing, no {name[5:]} synsets")
    return paths


def ingest(cfg):
    """Parses every configured input into a KnowledgeSnapshot."""
    start = timer()

    wn = parse_wordnet_data(_wordnet_paths(cfg.wordnet_dir))
    synsets = wn.synsets
    links = list(wn.antonyms) + list(wn.similars)

    sense_index = SenseIndex()
    if cfg.sense_index and exists(cfg.sense_index):
        sense_index = parse_sense_index(cfg.sense_index)

    morpho_stats = {}
    if cfg.morphosemantic_table:
        ms = parse_morphosemantic_links(cfg.morphosemantic_table, sense_index, **cfg.morphosemantic)
        unknown = [link for link in ms.links if link.source not in synsets or link.target not in synsets]
        if unknown:
            logger.warning(f"{len(unknown)} morphosemantic links name synsets missing from the database")
        links.extend(link for link in ms.links if link.source in synsets and link.target in synsets)
        morpho_stats = {
            "rows": ms.rows,
            "unresolved_senses": len(ms.unresolved),
            "links_to_unknown_synsets": len(unknown),
            "skipped_relations": dict(sorted(ms.skipped_relations.items())),
        }

    md = parse_mapping_files(cfg.mapping_files, suffix_table(cfg.mapping_suffixes))
    mapping = apply_corrections(md.mapping, cfg.concept_corrections)
    missing = [sid for sid in mapping if sid not in synsets]
    if missing:
        logger.warning(f"{len(missing)} mapped synsets are missing from the database, dropped")
        mapping = {sid: entries for sid, entries in mapping.items() if sid in synsets}
    unmapped = [sid for sid in md.unmapped if sid in synsets]

    concepts = sorted({e.concept for entries in mapping.values() for e in entries})
    core_files = read_core_manifest(cfg.core_manifest) if cfg.core_manifest else []
    tx = parse_suo_kif_taxonomy(cfg.taxonomy_files, core_files, extra_concepts=concepts)

    with_facts = set()
    for f in tx.facts:
        with_facts.add(f.child)
        with_facts.add(f.parent)
    dangling = [c for c in concepts if c not in with_facts and c not in tx.core]

    counts_by_pos = collections.Counter(s.pos for s in synsets.values())
    stats = {
        "synsets": dict(sorted(counts_by_pos.items())),
        "links": dict(sorted(collections.Counter(link.kind.value for link in links).items())),
        "ignored_pointers": dict(sorted(wn.ignored_pointers.items())),
        "morphosemantic": morpho_stats,
        "mapping": {
            "synsets": len(mapping),
            "unmapped": dict(sorted(collections.Counter(synsets[s].pos for s in unmapped).items())),
            "multi_mapped": dict(sorted(collections.Counter(
                synsets[s].pos for s, e in mapping.items() if len(e) > 1).items())),
            "duplicate_entries": md.duplicates,
            "missing_synsets": len(missing),
        },
        "taxonomy": {
            "facts": len(tx.facts),
            "core_concepts": len(tx.core),
            "skipped_expressions": sum(tx.skipped.values()),
            "self_loops": tx.self_loops,
            "ambiguous_kinds": [[c, ks] for c, ks in tx.ambiguous],
        },
        "dangling_concepts": len(dangling),
    }

    snapshot = KnowledgeSnapshot(
        synsets=synsets,
        links=sorted(set(links)),
        mapping=mapping,
        facts=tx.facts,
        kinds=tx.kinds,
        core=tx.core,
        unmapped=unmapped,
        dangling=dangling,
        stats=stats,
    )
    logger.info(f"ingested {len(synsets)} synsets, {len(snapshot.links)} links, {len(mapping)} mapped synsets, "
                f"{len(dangling)} dangling concepts in {timer(start):.06}s")
    return snapshot

